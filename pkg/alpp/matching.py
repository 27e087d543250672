"""
Polynomial-time ALPP for ell in {1, 2, 3} through maximum matching.

ell = 1 is a matching in G[A]. ell = 2 is turned into ell = 3 by giving every
non-terminal a true twin. ell = 3 is decided on the auxiliary graph
G' = (A + V1 + V2, E_A1 + E_12 + E_22): (G, A, k, 3) is a yes-instance iff G'
has a matching of size k + |V - A|. Witness paths come from a maximum
matching that saturates V1 + V2.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import networkx as nx

from alpp.errors import ContractViolation
from alpp.graph import (
    Graph,
    Instance,
    PathPacking,
    SolveResult,
    edge_key,
    trivial_no_reason,
)

logger = logging.getLogger(__name__)

HARDNESS_NOTE = (
    "ALPP stays NP-complete for every fixed ell >= 4, so the matching "
    "algorithm only covers ell <= 3"
)


@dataclass(frozen=True)
class Matching:
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        object.__setattr__(
            self, "edges", frozenset(edge_key(u, v) for u, v in self.edges)
        )
        seen: set[int] = set()
        for u, v in self.edges:
            if u in seen or v in seen:
                raise ContractViolation(f"edges share a vertex at {u}-{v}")
            seen.update((u, v))

    @property
    def size(self) -> int:
        return len(self.edges)

    def mates(self) -> dict[int, int]:
        mate = {}
        for u, v in self.edges:
            mate[u] = v
            mate[v] = u
        return mate


def max_matching(graph: Graph) -> Matching:
    """Maximum-cardinality matching of a general graph.

    networkx' blossom implementation handles the odd cycles that appear in
    auxiliary graphs; unit weights with maxcardinality=True give maximum
    cardinality.
    """
    matched = nx.max_weight_matching(graph.to_networkx(), maxcardinality=True)
    return Matching(frozenset(matched))


class Part(str, Enum):
    A = "A"
    V1 = "V1"
    V2 = "V2"


class EdgeClass(str, Enum):
    A1 = "E_A1"
    ONE_TWO = "E_12"
    TWO_TWO = "E_22"


@dataclass(frozen=True)
class AuxiliaryMatchingGraph:
    """G' on A + V1 + V2 with a map back to the vertices of G."""

    graph: Graph
    parts: tuple[Part, ...]
    origin: tuple[int, ...]
    copy1: dict[int, int]
    copy2: dict[int, int]
    terminal: dict[int, int]

    @classmethod
    def build(cls, instance: Instance) -> "AuxiliaryMatchingGraph":
        g = instance.graph
        A = instance.terminals
        parts: list[Part] = []
        origin: list[int] = []
        terminal, copy1, copy2 = {}, {}, {}
        for a in instance.sorted_terminals:
            terminal[a] = len(origin)
            parts.append(Part.A)
            origin.append(a)
        for v in instance.non_terminals:
            copy1[v] = len(origin)
            parts.append(Part.V1)
            origin.append(v)
        for v in instance.non_terminals:
            copy2[v] = len(origin)
            parts.append(Part.V2)
            origin.append(v)

        edges = []
        for u, v in g.edges:
            if u in A and v in A:
                continue
            if u in A or v in A:
                a, w = (u, v) if u in A else (v, u)
                edges.append((terminal[a], copy1[w]))
            else:
                edges.append((copy2[u], copy2[v]))
        edges.extend((copy1[v], copy2[v]) for v in instance.non_terminals)
        aux = Graph.from_edges(len(origin), edges)
        logger.debug(f"auxiliary graph: {aux.n} vertices, {aux.m} edges")
        return cls(aux, tuple(parts), tuple(origin), copy1, copy2, terminal)

    def edge_class(self, u: int, v: int) -> EdgeClass:
        pu, pv = self.parts[u], self.parts[v]
        if Part.A in (pu, pv):
            return EdgeClass.A1
        if pu != pv:
            return EdgeClass.ONE_TWO
        return EdgeClass.TWO_TWO

    @property
    def side_size(self) -> int:
        return len(self.copy1)


def solve_ell1(instance: Instance) -> SolveResult:
    if instance.ell != 1:
        raise ContractViolation(f"solve_ell1 needs ell=1, got ell={instance.ell}")
    reason = trivial_no_reason(instance)
    if reason:
        return SolveResult(False, stats={"precheck": 1}, algorithm="matching")
    sub, keep = instance.graph.induced(instance.terminals)
    m = max_matching(sub)
    stats = {"matching_size": m.size}
    if m.size < instance.k:
        return SolveResult(False, stats=stats, maximum=m.size, algorithm="matching")
    paths = sorted(edge_key(keep[u], keep[v]) for u, v in m.edges)[: instance.k]
    return SolveResult(
        True, PathPacking(tuple(paths)), stats, maximum=m.size, algorithm="matching"
    )


@dataclass(frozen=True)
class TwinMap:
    """twin[v] = v' for every non-terminal v of the ell=2 instance."""

    twin: dict[int, int]
    original_n: int

    def original(self, v: int) -> int:
        if v < self.original_n:
            return v
        return self._back[v]

    @property
    def _back(self) -> dict[int, int]:
        return {t: u for u, t in self.twin.items()}


def build_true_twin_instance(instance: Instance) -> tuple[Instance, TwinMap]:
    """The equivalent (G', A, k, 3) instance for an ell=2 instance.

    Edges inside A and inside V - A lie on no (A, 2)-path and are dropped
    before each non-terminal v receives a true twin v'.
    """
    if instance.ell != 2:
        raise ContractViolation(f"twin transform needs ell=2, got ell={instance.ell}")
    g = instance.graph
    A = instance.terminals
    kept = [(u, v) for u, v in g.edges if (u in A) != (v in A)]
    twin = {v: g.n + i for i, v in enumerate(instance.non_terminals)}
    edges = list(kept)
    edges.extend((v, twin[v]) for v in instance.non_terminals)
    for u, v in kept:
        a, w = (u, v) if u in A else (v, u)
        edges.append((a, twin[w]))
    twinned = Graph.from_edges(g.n + len(twin), edges)
    return (
        Instance(twinned, A, instance.k, 3, instance.kind),
        TwinMap(twin, g.n),
    )


def saturate_matching(aux: AuxiliaryMatchingGraph, m: Matching) -> Matching:
    """Exchange edges until every vertex of V1 + V2 is matched.

    Case 1 (v1 matched to a terminal u, v2 free): swap {u, v1} for {v1, v2}.
    Case 2 (v1 free, v2 matched to w2): swap {v2, w2} for {v1, v2}; w is then
    repaired as in case 1. Both keep |M| and cover one more vertex of V1 + V2.
    """
    if m.size != max_matching(aux.graph).size:
        raise ContractViolation("saturate_matching needs a maximum matching")
    mate = m.mates()

    def unmatch(x: int):
        y = mate.pop(x)
        del mate[y]

    def match(x: int, y: int):
        mate[x] = y
        mate[y] = x

    def repair(v: int):
        v1, v2 = aux.copy1[v], aux.copy2[v]
        if v1 in mate and v2 in mate:
            return
        if v1 not in mate and v2 not in mate:
            raise ContractViolation(
                f"matching is not maximum: edge {v1}-{v2} can be added"
            )
        if v2 not in mate:
            unmatch(v1)  # drops {u, v1}
            match(v1, v2)
            return
        w2 = mate[v2]
        unmatch(v2)
        match(v1, v2)
        w = aux.origin[w2]
        if aux.copy1[w] not in mate:
            raise ContractViolation(
                f"matching is not maximum: {aux.copy1[w]}-{w2} can be added"
            )
        repair(w)

    for v in aux.copy1:
        repair(v)
    return Matching(frozenset((x, y) for x, y in mate.items() if x < y))


def _extract_paths(aux: AuxiliaryMatchingGraph, m: Matching, k: int) -> list[tuple[int, ...]]:
    mate = m.mates()
    middles = sorted(
        edge_key(aux.origin[u], aux.origin[v])
        for u, v in m.edges
        if aux.edge_class(u, v) is EdgeClass.TWO_TWO
    )
    if len(middles) < k:
        raise ContractViolation(
            f"saturated matching has {len(middles)} E_22 edges, expected at least {k}"
        )
    paths = []
    for u, v in middles[:k]:
        x = aux.origin[mate[aux.copy1[u]]]
        y = aux.origin[mate[aux.copy1[v]]]
        paths.append((x, u, v, y))
    return paths


def solve_ell3(instance: Instance) -> SolveResult:
    if instance.ell != 3:
        raise ContractViolation(f"solve_ell3 needs ell=3, got ell={instance.ell}")
    if trivial_no_reason(instance):
        return SolveResult(False, stats={"precheck": 1}, algorithm="matching")
    aux = AuxiliaryMatchingGraph.build(instance)
    m = max_matching(aux.graph)
    need = instance.k + aux.side_size
    stats = {
        "aux_vertices": aux.graph.n,
        "aux_edges": aux.graph.m,
        "matching_size": m.size,
        "required_size": need,
    }
    # every E_A1 / E_12 edge consumes one V1 vertex, the surplus lies in E_22
    maximum = max(0, m.size - aux.side_size)
    if m.size < need:
        return SolveResult(False, stats=stats, maximum=maximum, algorithm="matching")
    saturated = saturate_matching(aux, m)
    paths = _extract_paths(aux, saturated, instance.k)
    return SolveResult(
        True, PathPacking(tuple(paths)).canonical(), stats, maximum, algorithm="matching"
    )


def _pull_back_twins(packing: PathPacking, twins: TwinMap) -> PathPacking:
    paths = []
    for x, u, v, y in packing:
        # the middle of every (A, 3)-path in the twin graph is a pair {w, w'}
        middle = twins.original(u)
        if twins.original(v) != middle:
            raise ContractViolation(f"path ({x},{u},{v},{y}) does not cross a twin pair")
        paths.append((x, middle, y))
    return PathPacking(tuple(paths)).canonical()


def solve_small_ell(instance: Instance) -> SolveResult:
    """Dispatch ell=1, 2, 3 to the matching algorithms."""
    if instance.ell == 1:
        return solve_ell1(instance)
    if instance.ell == 3:
        return solve_ell3(instance)
    if instance.ell == 2:
        twinned, twins = build_true_twin_instance(instance)
        result = solve_ell3(twinned)
        witness: Optional[PathPacking] = None
        if result.witness is not None:
            witness = _pull_back_twins(result.witness, twins)
        return SolveResult(
            result.decision, witness, result.stats, result.maximum, "matching"
        )
    raise ContractViolation(f"{HARDNESS_NOTE}; got ell={instance.ell}")
