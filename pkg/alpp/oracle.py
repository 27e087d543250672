"""
Exhaustive ground-truth solvers for desk-scale inputs.

Everything here is exponential and guarded by an OracleBudget: exceeding the
budget raises ResourceLimitError instead of returning a possibly wrong answer.
"""

import logging
import time
from contextlib import closing
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

import networkx as nx

from alpp.errors import ResourceLimitError
from alpp.graph import ExtendedInstance, Graph, Instance, PathPacking
from config import Config

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleBudget:
    max_vertices: int = field(default_factory=lambda: Config.ORACLE_MAX_VERTICES)
    max_nodes: int = field(default_factory=lambda: Config.ORACLE_MAX_NODES)
    time_limit: float = field(default_factory=lambda: Config.ORACLE_TIME_LIMIT)

    def __post_init__(self):
        if self.max_vertices <= 0 or self.max_nodes <= 0 or self.time_limit <= 0:
            raise ValueError("oracle budget limits must be positive")


class _Meter:
    """Counts search nodes and enforces the node and wall-clock budget."""

    def __init__(self, budget: OracleBudget):
        self.budget = budget
        self.nodes = 0
        self.deadline = time.monotonic() + budget.time_limit

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise ResourceLimitError(
                f"oracle exceeded {self.budget.max_nodes} search nodes"
            )
        if self.nodes & 1023 == 0 and time.monotonic() > self.deadline:
            raise ResourceLimitError(
                f"oracle exceeded {self.budget.time_limit}s time limit"
            )


def _check_size(instance: Instance, budget: OracleBudget):
    if instance.n > budget.max_vertices:
        raise ResourceLimitError(
            f"oracle limited to {budget.max_vertices} vertices, instance has {instance.n}"
        )


def _paths_from(
    g: Graph,
    start: int,
    targets: set[int],
    terminals: frozenset[int],
    used: list[bool],
    lengths: range,
    meter: _Meter,
) -> Iterator[tuple[int, ...]]:
    """Simple paths start -> b (b in targets) with length in `lengths`, internals outside A."""
    path = [start]
    longest = lengths.stop - 1

    def extend(v: int) -> Iterator[tuple[int, ...]]:
        meter.tick()
        depth = len(path)  # edges after stepping to a neighbour
        for w in g.adjacency[v]:
            if used[w] or w == start:
                continue
            if w in terminals:
                if w in targets and depth in lengths:
                    yield tuple(path) + (w,)
                continue
            if depth < longest:
                used[w] = True
                path.append(w)
                try:
                    yield from extend(w)
                finally:
                    path.pop()
                    used[w] = False

    yield from extend(start)


def _max_packing(
    instance: Instance, lengths: range, budget: Optional[OracleBudget]
) -> tuple[int, PathPacking]:
    budget = budget or OracleBudget()
    _check_size(instance, budget)
    g = instance.graph
    if len(lengths) == 0:
        return 0, PathPacking()

    meter = _Meter(budget)
    used = [False] * g.n
    best: list = [0, ()]
    chosen: list[tuple[int, ...]] = []

    def search(free: tuple[int, ...]):
        meter.tick()
        if len(chosen) > best[0]:
            best[0], best[1] = len(chosen), tuple(chosen)
        if len(chosen) + len(free) // 2 <= best[0] or len(free) < 2:
            return
        a, rest = free[0], free[1:]
        used[a] = True
        paths = _paths_from(g, a, set(rest), instance.terminals, used, lengths, meter)
        with closing(paths):
            for path in paths:
                # the suspended generator still holds the interior of `path` in `used`
                b = path[-1]
                used[b] = True
                chosen.append(path)
                search(tuple(x for x in rest if x != b))
                chosen.pop()
                used[b] = False
                if best[0] == len(instance.terminals) // 2:
                    break
        used[a] = False
        # a stays unmatched
        search(rest)

    search(instance.sorted_terminals)
    logger.debug(f"oracle: max={best[0]} after {meter.nodes} nodes")
    return best[0], PathPacking(best[1]).canonical()


def oracle_max_packing(
    instance: Instance, budget: Optional[OracleBudget] = None
) -> tuple[int, PathPacking]:
    """Exact maximum number of vertex-disjoint (A, ell)-paths and a witness."""
    # no simple path has n or more edges
    ell = instance.ell
    lengths = range(ell, ell + 1) if ell < instance.n else range(0)
    return _max_packing(instance, lengths, budget)


def oracle_max_short_packing(
    instance: Instance, budget: Optional[OracleBudget] = None
) -> tuple[int, PathPacking]:
    """Exact maximum number of vertex-disjoint A-paths of length 1..ell."""
    return _max_packing(instance, range(1, min(instance.ell, instance.n - 1) + 1), budget)


def oracle_exact_pathwidth(graph: Graph, max_vertices: Optional[int] = None) -> int:
    """Pathwidth as the vertex separation number, by a DP over vertex subsets.

    f(S) is the best width of a layout whose first |S| vertices are S:
    f(S) = max(|boundary(S)|, min_v f(S - v)).
    """
    cap = max_vertices if max_vertices is not None else Config.PATHWIDTH_MAX_VERTICES
    n = graph.n
    if n > cap:
        raise ResourceLimitError(f"exact pathwidth limited to {cap} vertices, got {n}")
    if n == 0:
        return 0
    masks = [sum(1 << u for u in graph.adjacency[v]) for v in range(n)]
    full = (1 << n) - 1
    f = [0] * (1 << n)
    for S in range(1, full + 1):
        boundary = 0
        best = n
        rest = S
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            if masks[v] & ~S:
                boundary += 1
            if f[S ^ low] < best:
                best = f[S ^ low]
            rest ^= low
        f[S] = max(boundary, best)
    return f[full]


def _weighted_nx(x: ExtendedInstance) -> nx.Graph:
    g = x.graph.to_networkx()
    nx.set_edge_attributes(g, {e: w for e, w in x.weights.items()}, "weight")
    return g


def iter_weighted_paths(
    x: ExtendedInstance,
    s: int,
    t: int,
    length: int,
    blocked: Iterable[int] = (),
    meter: Optional[_Meter] = None,
    distances: Optional[dict[int, int]] = None,
) -> Iterator[tuple[int, ...]]:
    """Every simple s-t path of total weight exactly `length` avoiding `blocked`.

    Paths are produced in lexicographic neighbour order; weighted distances to
    t prune branches that can no longer reach t within the remaining weight.
    """
    meter = meter or _Meter(OracleBudget())
    if distances is None:
        distances = nx.single_source_dijkstra_path_length(_weighted_nx(x), t)
    g = x.graph
    blocked = set(blocked)
    if s in blocked or t in blocked or s not in distances:
        return
    on_path = {s}
    path = [s]

    def extend(v: int, weight: int) -> Iterator[tuple[int, ...]]:
        meter.tick()
        for w in g.adjacency[v]:
            if w in on_path or w in blocked or w not in distances:
                continue
            total = weight + x.weight(v, w)
            if total + distances[w] > length:
                continue
            if w == t:
                if total == length:
                    yield tuple(path) + (t,)
                continue
            on_path.add(w)
            path.append(w)
            yield from extend(w, total)
            path.pop()
            on_path.discard(w)

    yield from extend(s, 0)


def oracle_weighted_disjoint_paths(
    x: ExtendedInstance,
    budget: Optional[OracleBudget] = None,
    max_triples: Optional[int] = None,
) -> tuple[bool, Optional[tuple[tuple[int, ...], ...]]]:
    """Decide Extended-ALPP by backtracking over the triples in order."""
    budget = budget or OracleBudget()
    cap = max_triples if max_triples is not None else Config.WEIGHTED_ORACLE_MAX_TRIPLES
    if x.r > cap:
        raise ResourceLimitError(f"weighted oracle limited to {cap} triples, got {x.r}")
    meter = _Meter(budget)
    g = _weighted_nx(x)
    distances = [nx.single_source_dijkstra_path_length(g, t) for _, t, _ in x.triples]
    endpoints = {v for s, t, _ in x.triples for v in (s, t)}
    used: set[int] = set()
    chosen: list[tuple[int, ...]] = []

    def search(i: int) -> bool:
        if i == x.r:
            return True
        s, t, length = x.triples[i]
        blocked = used | (endpoints - {s, t})
        for path in iter_weighted_paths(x, s, t, length, blocked, meter, distances[i]):
            used.update(path)
            chosen.append(path)
            if search(i + 1):
                return True
            chosen.pop()
            used.difference_update(path)
        return False

    found = search(0)
    logger.debug(f"weighted oracle: {'yes' if found else 'no'} after {meter.nodes} nodes")
    return found, (tuple(chosen) if found else None)


def brute_force_matching_size(graph: Graph, budget: Optional[OracleBudget] = None) -> int:
    """Maximum matching size by exhaustive branching (independent of blossoms).

    The lowest unmatched vertex is either left single or matched to one of its
    unmatched neighbours.
    """
    meter = _Meter(budget or OracleBudget())

    def best(free: frozenset[int]) -> int:
        meter.tick()
        if len(free) < 2:
            return 0
        v = min(free)
        rest = free - {v}
        result = best(rest)
        for u in graph.adjacency[v]:
            if u in rest and result < 1 + len(rest - {u}) // 2:
                result = max(result, 1 + best(rest - {u}))
        return result

    return best(frozenset(range(graph.n)))
