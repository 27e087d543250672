"""
Parameterized-by-(k + ell) routes.

build_triangled_pair turns ALPP into subgraph containment: subdivide every edge
once, then hang a triangle on every terminal (host G'') and on both ends of k
paths with 2 ell + 1 vertices (pattern H''). solve_color_coding is the engine
actually used for decisions: random colourings with k(ell + 1) colours, a DP
over colourful (A, ell)-paths and a cover DP over colour sets.
"""

import logging
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher, categorical_node_match

from alpp.errors import ContractViolation, ResourceLimitError
from alpp.formats import instance_digest
from alpp.graph import (
    Graph,
    Instance,
    PathPacking,
    SolveResult,
    trivial_no_reason,
    verify_packing,
)
from config import Config

logger = logging.getLogger(__name__)

# vertex roles used to keep path interiors away from terminals
TERMINAL = "terminal"
INNER = "inner"
SUBDIVISION = "subdivision"
TRIANGLE = "triangle"


@dataclass(frozen=True)
class TriangledPatternPair:
    host: Graph
    host_roles: tuple[str, ...]
    pattern: Graph
    pattern_roles: tuple[str, ...]
    # pattern vertex ids along each of the k subdivided paths
    pattern_paths: tuple[tuple[int, ...], ...]
    # host id -> edge of G for subdivision vertices, -> terminal for triangle vertices
    subdivided: dict[int, tuple[int, int]]
    triangle_of: dict[int, int]
    original_n: int

    def as_networkx(self) -> tuple[nx.Graph, nx.Graph]:
        host = self.host.to_networkx()
        nx.set_node_attributes(host, dict(enumerate(self.host_roles)), "role")
        pattern = self.pattern.to_networkx()
        nx.set_node_attributes(pattern, dict(enumerate(self.pattern_roles)), "role")
        return host, pattern


def build_triangled_pair(instance: Instance) -> TriangledPatternPair:
    g = instance.graph
    n, A = g.n, instance.terminals
    edges: list[tuple[int, int]] = []
    roles = [TERMINAL if v in A else INNER for v in range(n)]
    subdivided = {}
    for i, (u, v) in enumerate(g.edges):
        s = n + i
        subdivided[s] = (u, v)
        roles.append(SUBDIVISION)
        edges.extend(((u, s), (s, v)))
    triangle_of = {}
    for a in instance.sorted_terminals:
        t1, t2 = len(roles), len(roles) + 1
        triangle_of[t1] = triangle_of[t2] = a
        roles.extend((TRIANGLE, TRIANGLE))
        edges.extend(((a, t1), (a, t2), (t1, t2)))
    host = Graph.from_edges(len(roles), edges)

    p_edges: list[tuple[int, int]] = []
    p_roles: list[str] = []
    paths = []
    for _ in range(instance.k):
        base = len(p_roles)
        path = tuple(range(base, base + 2 * instance.ell + 1))
        for pos in range(len(path)):
            if pos in (0, len(path) - 1):
                p_roles.append(TERMINAL)
            else:
                p_roles.append(SUBDIVISION if pos % 2 else INNER)
        p_edges.extend(zip(path, path[1:]))
        for end in (path[0], path[-1]):
            t1, t2 = len(p_roles), len(p_roles) + 1
            p_roles.extend((TRIANGLE, TRIANGLE))
            p_edges.extend(((end, t1), (end, t2), (t1, t2)))
        paths.append(path)
    pattern = Graph.from_edges(len(p_roles), p_edges)
    logger.debug(f"triangled pair: host {host.n} vertices, pattern {pattern.n} vertices")
    return TriangledPatternPair(
        host, tuple(roles), pattern, tuple(p_roles), tuple(paths), subdivided, triangle_of, n
    )


def _matcher(pair: TriangledPatternPair, respect_roles: bool) -> GraphMatcher:
    host, pattern = pair.as_networkx()
    if respect_roles:
        return GraphMatcher(host, pattern, node_match=categorical_node_match("role", None))
    return GraphMatcher(host, pattern)


def contains_pattern(pair: TriangledPatternPair, respect_roles: bool = True) -> bool:
    """Whether G'' has a subgraph isomorphic to H'' (VF2 monomorphism).

    Without roles a pattern path may run through a terminal whose triangle is
    unused, which no (A, ell)-path may do; roles forbid exactly that.
    """
    return _matcher(pair, respect_roles).subgraph_is_monomorphic()


def find_pattern_packing(pair: TriangledPatternPair) -> Optional[PathPacking]:
    """Decode one embedding of H'' into k disjoint (A, ell)-paths of G."""
    for mapping in _matcher(pair, True).subgraph_monomorphisms_iter():
        image = {p: h for h, p in mapping.items()}
        paths = []
        for path in pair.pattern_paths:
            hosted = [image[p] for p in path[::2]]
            if any(v >= pair.original_n for v in hosted):
                raise ContractViolation(f"embedding maps a path vertex outside G: {hosted}")
            paths.append(tuple(hosted))
        return PathPacking(tuple(paths)).canonical()
    return None


@dataclass(frozen=True)
class ColorAssignment:
    colors: tuple[int, ...]
    palette: int
    trial: int

    def __post_init__(self):
        if any(not 0 <= c < self.palette for c in self.colors):
            raise ContractViolation(f"colour outside 0..{self.palette - 1}")

    @classmethod
    def draw(cls, n: int, palette: int, seed: str, trial: int) -> "ColorAssignment":
        rng = random.Random(f"{seed}:{trial}")
        return cls(tuple(rng.randrange(palette) for _ in range(n)), palette, trial)


def trial_count(palette: int, failure_prob: float) -> int:
    """Trials T = ceil(e^c ln(1/eps)) so a fixed solution stays colourful w.p. >= 1 - eps."""
    if not 0 < failure_prob < 1:
        raise ValueError(f"failure probability must lie in (0, 1), got {failure_prob}")
    return math.ceil(math.exp(palette) * math.log(1 / failure_prob))


def _good_color_sets(instance: Instance, coloring: ColorAssignment) -> set[int]:
    """Colour masks S with |S| = ell + 1 carried by some colourful (A, ell)-path."""
    g, A, ell = instance.graph, instance.terminals, instance.ell
    color = coloring.colors
    level: dict[int, set[int]] = {}
    for a in instance.sorted_terminals:
        level.setdefault(1 << color[a], set()).add(a)
    good: set[int] = set()
    for step in range(1, ell + 1):
        following: dict[int, set[int]] = {}
        for mask, ends in level.items():
            for v in ends:
                for w in g.adjacency[v]:
                    bit = 1 << color[w]
                    if mask & bit:
                        continue
                    if step == ell:
                        if w in A:
                            good.add(mask | bit)
                    elif w not in A:
                        following.setdefault(mask | bit, set()).add(w)
        level = following
    return good


def _cover(good: set[int], full: int) -> Optional[list[int]]:
    """Partition `full` into colour sets from `good`, splitting off the lowest colour first."""

    @lru_cache(maxsize=None)
    def split(mask: int) -> Optional[tuple[int, ...]]:
        if mask == 0:
            return ()
        low = mask & -mask
        for part in good:
            if part & low and part & mask == part:
                rest = split(mask ^ part)
                if rest is not None:
                    return (part,) + rest
        return None

    found = split(full)
    return list(found) if found is not None else None


def _colorful_path(instance: Instance, coloring: ColorAssignment, mask: int) -> tuple[int, ...]:
    g, A, ell = instance.graph, instance.terminals, instance.ell
    color = coloring.colors

    def extend(path: list[int], used: int) -> Optional[tuple[int, ...]]:
        v = path[-1]
        for w in g.adjacency[v]:
            bit = 1 << color[w]
            if not mask & bit or used & bit:
                continue
            if len(path) == ell:
                if w in A:
                    return tuple(path) + (w,)
            elif w not in A:
                found = extend(path + [w], used | bit)
                if found:
                    return found
        return None

    for a in instance.sorted_terminals:
        bit = 1 << color[a]
        if mask & bit:
            found = extend([a], bit)
            if found:
                return found
    raise ContractViolation(f"no colourful path for colour set {mask:b}")


def solve_color_coding(
    instance: Instance,
    failure_prob: Optional[float] = None,
    seed: Optional[int] = None,
    max_trials: Optional[int] = None,
) -> SolveResult:
    """One-sided Monte Carlo decision: "no" may be wrong with probability <= eps, "yes" never."""
    eps = failure_prob if failure_prob is not None else Config.CC_EPSILON
    seed = seed if seed is not None else Config.DEFAULT_SEED
    cap = max_trials if max_trials is not None else Config.CC_MAX_TRIALS
    if trivial_no_reason(instance) or instance.ell >= instance.n:
        return SolveResult(False, stats={"precheck": 1}, algorithm="colorcoding")
    palette = instance.k * (instance.ell + 1)
    if palette > Config.CC_MAX_COLORS:
        raise ResourceLimitError(
            f"colour coding limited to k(ell+1) <= {Config.CC_MAX_COLORS}, got {palette}"
        )
    trials = trial_count(palette, eps)
    if trials > cap:
        raise ResourceLimitError(f"colour coding needs {trials} trials, limit is {cap}")
    stats = {"colors": palette, "trials_budget": trials}
    digest = instance_digest(instance)
    full = (1 << palette) - 1
    for trial in range(trials):
        coloring = ColorAssignment.draw(instance.n, palette, f"{digest}:{seed}", trial)
        good = _good_color_sets(instance, coloring)
        if len(good) < instance.k:
            continue
        parts = _cover(good, full)
        if parts is None:
            continue
        packing = PathPacking(
            tuple(_colorful_path(instance, coloring, part) for part in parts)
        ).canonical()
        verdict = verify_packing(instance, packing)
        if not verdict:
            raise ContractViolation(f"colour coding produced an invalid packing: {verdict}")
        stats["trials"] = trial + 1
        logger.debug(f"colour coding: witness after {trial + 1} trials")
        return SolveResult(True, packing, stats, algorithm="colorcoding")
    stats["trials"] = trials
    return SolveResult(False, stats=stats, algorithm="colorcoding")
