"""
Graph, instance and solution vocabulary shared by every module.

Vertices are dense integer ids 0..n-1. Everything here is immutable after
construction, so objects can be shared freely between solvers and threads.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional, Sequence
import logging

import networkx as nx

from alpp.errors import MalformedInputError

logger = logging.getLogger(__name__)

ALPP = "alpp"
SAPP = "sapp"
KINDS = (ALPP, SAPP)


def edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with sorted neighbour lists."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 0 or len(self.adjacency) != self.n:
            raise MalformedInputError("adjacency must list exactly n vertices")
        for v, nbrs in enumerate(self.adjacency):
            for i, u in enumerate(nbrs):
                if u == v:
                    raise MalformedInputError(f"self-loop at vertex {v}")
                if not 0 <= u < self.n:
                    raise MalformedInputError(f"vertex id {u} out of range")
                if i and nbrs[i - 1] >= u:
                    raise MalformedInputError(
                        f"neighbours of {v} not strictly increasing"
                    )
        for v, nbrs in enumerate(self.adjacency):
            for u in nbrs:
                if v not in self.neighbor_sets[u]:
                    raise MalformedInputError(f"edge {v}-{u} is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise MalformedInputError(f"edge {u}-{v} has an out-of-range id")
            if u == v:
                raise MalformedInputError(f"self-loop at vertex {u}")
            if v in nbrs[u]:
                raise MalformedInputError(f"duplicate edge {u}-{v}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, tuple(() for _ in range(n)))

    @cached_property
    def neighbor_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(nbrs) for nbrs in self.adjacency)

    @property
    def m(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(
            (v, u) for v, nbrs in enumerate(self.adjacency) for u in nbrs if v < u
        )

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbor_sets[u]

    def min_degree(self) -> int:
        return min((len(nbrs) for nbrs in self.adjacency), default=0)

    def add_vertices_and_edges(
        self, extra: int, edges: Iterable[tuple[int, int]]
    ) -> "Graph":
        return Graph.from_edges(self.n + extra, list(self.edges) + list(edges))

    def remove_edges(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        drop = {edge_key(u, v) for u, v in edges}
        return Graph.from_edges(self.n, [e for e in self.edges if e not in drop])

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", tuple[int, ...]]:
        """Induced subgraph on `vertices`, relabelled densely in sorted order.

        Returns the subgraph and the tuple mapping new ids to old ids.
        """
        keep = tuple(sorted(set(vertices)))
        index = {v: i for i, v in enumerate(keep)}
        edges = [
            (index[u], index[v])
            for u, v in self.edges
            if u in index and v in index
        ]
        return Graph.from_edges(len(keep), edges), keep

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> tuple["Graph", tuple]:
        nodes = tuple(sorted(g.nodes))
        index = {v: i for i, v in enumerate(nodes)}
        return (
            cls.from_edges(len(nodes), [(index[u], index[v]) for u, v in g.edges]),
            nodes,
        )


@dataclass(frozen=True)
class Instance:
    """The tuple (G, A, k, ell); `kind` selects exact (alpp) or short (sapp) paths."""

    graph: Graph
    terminals: frozenset[int]
    k: int
    ell: int
    kind: str = ALPP
    # dense id -> id used in the source file
    labels: Optional[tuple[int, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terminals", frozenset(self.terminals))
        if self.kind not in KINDS:
            raise MalformedInputError(f"unknown problem kind {self.kind!r}")
        if self.k < 1:
            raise MalformedInputError(f"k must be positive, got {self.k}")
        if self.ell < 1:
            raise MalformedInputError(f"ell must be positive, got {self.ell}")
        for a in self.terminals:
            if not 0 <= a < self.graph.n:
                raise MalformedInputError(f"terminal {a} out of range")
        if self.labels is not None and (
            len(self.labels) != self.graph.n or len(set(self.labels)) != self.graph.n
        ):
            raise MalformedInputError("labels must name every vertex exactly once")

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def is_short(self) -> bool:
        return self.kind == SAPP

    @property
    def is_full(self) -> bool:
        return 2 * self.k == len(self.terminals)

    @cached_property
    def sorted_terminals(self) -> tuple[int, ...]:
        return tuple(sorted(self.terminals))

    @cached_property
    def non_terminals(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.graph.n) if v not in self.terminals)

    def label(self, v: int) -> int:
        return self.labels[v] if self.labels is not None else v

    def with_k(self, k: int) -> "Instance":
        return replace(self, k=k)


def canonicalize(instance: Instance) -> Instance:
    """Drop file labels; dense ids become the canonical names."""
    return replace(instance, labels=None)


def trivial_no_reason(instance: Instance) -> Optional[str]:
    if 2 * instance.k > len(instance.terminals):
        return f"k={instance.k} exceeds |A|/2={len(instance.terminals) // 2}"
    return None


@dataclass(frozen=True)
class PathPacking:
    paths: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(tuple(p) for p in self.paths))

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.paths)

    def canonical(self) -> "PathPacking":
        """Orient every path from its smaller endpoint and sort the paths."""
        oriented = (p if p[0] <= p[-1] else tuple(reversed(p)) for p in self.paths)
        return PathPacking(tuple(sorted(oriented)))

    def vertices(self) -> set[int]:
        return {v for p in self.paths for v in p}

    def relabel(self, mapping: Sequence[int]) -> "PathPacking":
        return PathPacking(tuple(tuple(mapping[v] for v in p) for p in self.paths))


class Violation(str, Enum):
    LENGTH = "length"
    TRIVIAL = "trivial-path"
    ENDPOINT = "endpoint-membership"
    INTERNAL = "internal-membership"
    DISJOINT = "disjointness"
    COUNT = "count"
    ADJACENCY = "adjacency"
    WEIGHT = "weight"


@dataclass(frozen=True)
class Verdict:
    ok: bool
    rule: Optional[Violation] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return f"invalid: {self.rule.value}: {self.detail}"


VALID = Verdict(True)


def _check_ids(n: int, paths: Iterable[Sequence[int]]):
    for p in paths:
        for v in p:
            if not isinstance(v, int) or not 0 <= v < n:
                raise MalformedInputError(f"vertex id {v!r} out of range 0..{n - 1}")


def _verify(
    instance: Instance,
    packing: PathPacking,
    short: bool,
    expected_count: Optional[int],
) -> Verdict:
    g = instance.graph
    A = instance.terminals
    _check_ids(g.n, packing.paths)

    for i, p in enumerate(packing.paths):
        length = len(p) - 1
        if short and length < 1:
            return Verdict(False, Violation.TRIVIAL, f"path {i} has no edge")
        if short and length > instance.ell:
            return Verdict(
                False, Violation.LENGTH, f"path {i} has length {length} > {instance.ell}"
            )
        if not short and length != instance.ell:
            return Verdict(
                False,
                Violation.LENGTH,
                f"path {i} has length {length}, expected {instance.ell}",
            )
    for i, p in enumerate(packing.paths):
        if p[0] not in A or p[-1] not in A:
            return Verdict(False, Violation.ENDPOINT, f"path {i} ends outside A")
    for i, p in enumerate(packing.paths):
        inner = [v for v in p[1:-1] if v in A]
        if inner:
            return Verdict(
                False, Violation.INTERNAL, f"path {i} passes through terminal {inner[0]}"
            )
    seen: dict[int, int] = {}
    for i, p in enumerate(packing.paths):
        for v in p:
            if v in seen:
                where = "itself" if seen[v] == i else f"path {seen[v]}"
                return Verdict(
                    False, Violation.DISJOINT, f"path {i} shares vertex {v} with {where}"
                )
            seen[v] = i
    want = instance.k if expected_count is None else expected_count
    if len(packing) != want:
        return Verdict(False, Violation.COUNT, f"{len(packing)} paths, expected {want}")
    for i, p in enumerate(packing.paths):
        for u, v in zip(p, p[1:]):
            if not g.has_edge(u, v):
                return Verdict(
                    False, Violation.ADJACENCY, f"path {i} uses non-edge {u}-{v}"
                )
    return VALID


def verify_packing(
    instance: Instance, packing: PathPacking, expected_count: Optional[int] = None
) -> Verdict:
    """Check that `packing` is k vertex-disjoint (A, ell)-paths.

    `expected_count` overrides k, for witnesses of maximisation results.
    Raises MalformedInputError when the packing names a vertex outside the graph.
    """
    return _verify(instance, packing, False, expected_count)


def verify_short_packing(
    instance: Instance, packing: PathPacking, expected_count: Optional[int] = None
) -> Verdict:
    """Same as verify_packing with path lengths anywhere in 1..ell."""
    return _verify(instance, packing, True, expected_count)


def verify_for(instance: Instance, packing: PathPacking, **kwargs) -> Verdict:
    verify = verify_short_packing if instance.is_short else verify_packing
    return verify(instance, packing, **kwargs)


@dataclass(frozen=True)
class SolveResult:
    decision: bool
    witness: Optional[PathPacking] = None
    stats: dict[str, int] = field(default_factory=dict)
    maximum: Optional[int] = None
    algorithm: str = ""


@dataclass(frozen=True, eq=False)
class ExtendedInstance:
    """Weighted graph plus triples (s_i, t_i, ell_i) with 2r distinct endpoints."""

    graph: Graph
    weights: Mapping[tuple[int, int], int]
    triples: tuple[tuple[int, int, int], ...]
    names: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "triples", tuple(tuple(t) for t in self.triples))
        keys = set(self.graph.edges)
        if set(self.weights) != keys:
            raise MalformedInputError("every edge needs exactly one weight")
        for e, w in self.weights.items():
            if w < 1:
                raise MalformedInputError(f"edge {e} has non-positive weight {w}")
        ends = [v for s, t, _ in self.triples for v in (s, t)]
        if len(set(ends)) != len(ends):
            raise MalformedInputError("triple endpoints must be pairwise distinct")
        for s, t, length in self.triples:
            if not (0 <= s < self.graph.n and 0 <= t < self.graph.n):
                raise MalformedInputError(f"triple ({s},{t}) out of range")
            if length < 1:
                raise MalformedInputError(f"triple ({s},{t}) has length {length} < 1")

    @property
    def r(self) -> int:
        return len(self.triples)

    @property
    def max_weight(self) -> int:
        return max(self.weights.values(), default=0)

    def weight(self, u: int, v: int) -> int:
        return self.weights[edge_key(u, v)]

    def path_weight(self, path: Sequence[int]) -> int:
        return sum(self.weight(u, v) for u, v in zip(path, path[1:]))

    def name(self, v: int) -> str:
        return self.names[v] if self.names is not None else str(v)


def verify_extended_packing(x: ExtendedInstance, paths: Sequence[Sequence[int]]) -> Verdict:
    """Path i must join s_i to t_i with weight exactly ell_i; paths disjoint."""
    g = x.graph
    _check_ids(g.n, paths)
    if len(paths) != x.r:
        return Verdict(False, Violation.COUNT, f"{len(paths)} paths, expected {x.r}")
    seen: dict[int, int] = {}
    for i, (p, (s, t, length)) in enumerate(zip(paths, x.triples)):
        if not p or {p[0], p[-1]} != {s, t} or len(p) < 2:
            return Verdict(False, Violation.ENDPOINT, f"path {i} does not join {s} and {t}")
        for v in p:
            if v in seen:
                return Verdict(False, Violation.DISJOINT, f"vertex {v} used twice")
            seen[v] = i
        for u, v in zip(p, p[1:]):
            if not g.has_edge(u, v):
                return Verdict(False, Violation.ADJACENCY, f"path {i} uses non-edge {u}-{v}")
        w = x.path_weight(p)
        if w != length:
            return Verdict(False, Violation.WEIGHT, f"path {i} weighs {w}, expected {length}")
    return VALID
