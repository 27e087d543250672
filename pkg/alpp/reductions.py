"""
Executable reductions and hardness-instance generators.

    reduce_sapp_to_alpp           short paths -> exact-length paths (edge detours)
    generate_from_hamiltonian     Hamiltonian cycle -> Full-ALPP, any even |A|
    generate_from_path_partition  lambda-path partition -> Full-ALPP, ell = lambda + 2
    reduce_extended_to_full       weighted linkage with lengths -> Full-ALPP
    generate_mcc_extended         multicoloured clique -> weighted linkage

Every construction that needs to move witnesses returns a ReductionTrace
naming the target vertices and paths the transport functions walk.
"""

import logging
from dataclasses import asdict, dataclass, field
from functools import cached_property
from itertools import combinations, product
from math import comb
from typing import Any, Optional, Sequence

from alpp.errors import ConstructionError, ContractViolation, MalformedInputError, ResourceLimitError
from alpp.graph import (
    ALPP,
    SAPP,
    ExtendedInstance,
    Graph,
    Instance,
    PathPacking,
    edge_key,
)
from config import Config

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class McccInput:
    """k colour classes of n vertices each, numbered 1..n; edges join distinct classes."""

    k: int
    n: int
    edges: tuple[tuple[tuple[int, int], tuple[int, int]], ...]

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise MalformedInputError(f"need k >= 1 and n >= 1, got k={self.k}, n={self.n}")
        normalized = set()
        for (c1, j1), (c2, j2) in self.edges:
            if not (1 <= c1 <= self.k and 1 <= c2 <= self.k):
                raise MalformedInputError(f"class out of range 1..{self.k} in edge {c1}:{j1}-{c2}:{j2}")
            if not (1 <= j1 <= self.n and 1 <= j2 <= self.n):
                raise MalformedInputError(f"vertex out of range 1..{self.n} in edge {c1}:{j1}-{c2}:{j2}")
            if c1 == c2:
                raise MalformedInputError(f"edge {c1}:{j1}-{c2}:{j2} stays inside one class")
            edge = ((c1, j1), (c2, j2)) if c1 < c2 else ((c2, j2), (c1, j1))
            if edge in normalized:
                raise MalformedInputError(f"duplicate edge {c1}:{j1}-{c2}:{j2}")
            normalized.add(edge)
        object.__setattr__(self, "edges", tuple(sorted(normalized)))

    @cached_property
    def _edge_set(self) -> frozenset:
        return frozenset(self.edges)

    def has_edge(self, c1: int, j1: int, c2: int, j2: int) -> bool:
        edge = ((c1, j1), (c2, j2)) if c1 < c2 else ((c2, j2), (c1, j1))
        return edge in self._edge_set

    def is_clique(self, sigma: Sequence[int]) -> bool:
        """sigma[i - 1] is the vertex picked from class i."""
        if len(sigma) != self.k:
            return False
        chosen = [(i + 1, j) for i, j in enumerate(sigma)]
        return all((a, b) in self._edge_set for a, b in combinations(chosen, 2))

    def find_clique(self) -> Optional[tuple[int, ...]]:
        for sigma in product(range(1, self.n + 1), repeat=self.k):
            if self.is_clique(sigma):
                return sigma
        return None


@dataclass(frozen=True)
class ReductionTrace:
    """Target-side names and routes needed to carry witnesses across a reduction."""

    source: str
    target: str
    params: dict[str, int] = field(default_factory=dict)
    # gadget or source object -> target vertex
    named: dict[tuple, int] = field(default_factory=dict)
    # named target paths, e.g. detours, subdivided edges, attachments
    routes: dict[tuple, tuple[int, ...]] = field(default_factory=dict)

    def route(self, *key) -> tuple[int, ...]:
        try:
            return self.routes[key]
        except KeyError:
            raise ContractViolation(f"trace has no route {key}")

    def as_dict(self) -> dict[str, Any]:
        def name(key: tuple) -> str:
            return ":".join(str(part) for part in key)

        return {
            "source": self.source,
            "target": self.target,
            "params": dict(self.params),
            "named": {name(k): v for k, v in self.named.items()},
            "routes": {name(k): list(p) for k, p in self.routes.items()},
        }


class _Builder:
    """Grows a weighted graph one named vertex or path at a time."""

    def __init__(self, n: int = 0, names: Optional[Sequence[str]] = None):
        self.names = list(names) if names is not None else [str(v) for v in range(n)]
        self.weights: dict[tuple[int, int], int] = {}

    @property
    def n(self) -> int:
        return len(self.names)

    def vertex(self, name: str) -> int:
        self.names.append(name)
        return len(self.names) - 1

    def edge(self, u: int, v: int, weight: int = 1):
        key = edge_key(u, v)
        if key in self.weights:
            raise ContractViolation(f"edge {u}-{v} added twice")
        self.weights[key] = weight

    def path(self, start: int, length: int, prefix: str, end: Optional[int] = None) -> tuple[int, ...]:
        """A fresh path of `length` unit edges from start (to end, when given)."""
        vertices = [start]
        for step in range(1, length + 1):
            if step == length and end is not None:
                nxt = end
            else:
                nxt = self.vertex(f"{prefix}{step}")
            self.edge(vertices[-1], nxt)
            vertices.append(nxt)
        return tuple(vertices)

    def graph(self) -> Graph:
        return Graph.from_edges(self.n, self.weights)


def reduce_sapp_to_alpp(instance: Instance) -> tuple[Instance, ReductionTrace]:
    """Replace every edge uv by detours of lengths 1..ell.

    A short path of length L then stretches to exactly ell by swapping one of
    its edges for the detour of length ell - L + 1.
    """
    g, ell = instance.graph, instance.ell
    b = _Builder(g.n)
    routes = {}
    for u, v in g.edges:
        b.edge(u, v)
        routes[("detour", u, v, 1)] = (u, v)
        for length in range(2, ell + 1):
            routes[("detour", u, v, length)] = b.path(u, length, f"d{u}_{v}_{length}_", end=v)
    target = Instance(b.graph(), instance.terminals, instance.k, ell, ALPP)
    trace = ReductionTrace(
        SAPP, ALPP, {"n": g.n, "m": g.m, "ell": ell, "original_n": g.n}, routes=routes
    )
    logger.debug(f"sapp->alpp: {g.n} -> {target.n} vertices, {g.m} -> {target.graph.m} edges")
    return target, trace


def transport_short_packing(trace: ReductionTrace, packing: PathPacking) -> PathPacking:
    """SAPP witness -> ALPP witness: stretch the first edge of every short path."""
    ell = trace.params["ell"]
    stretched = []
    for path in packing:
        missing = ell - (len(path) - 1)
        if missing < 0:
            raise ContractViolation(f"path {path} is longer than ell={ell}")
        if missing == 0:
            stretched.append(tuple(path))
            continue
        u, v = path[0], path[1]
        detour = trace.route("detour", *edge_key(u, v), missing + 1)
        if detour[0] != u:
            detour = tuple(reversed(detour))
        stretched.append(detour + tuple(path[2:]))
    return PathPacking(tuple(stretched)).canonical()


def pull_back_alpp_packing(trace: ReductionTrace, packing: PathPacking) -> PathPacking:
    """ALPP witness -> SAPP witness: contract every detour to its original edge."""
    original_n = trace.params["original_n"]
    return PathPacking(
        tuple(tuple(v for v in path if v < original_n) for path in packing)
    ).canonical()


def _trivial_no_instance(alpha: int) -> Instance:
    return Instance(Graph.empty(alpha), frozenset(range(alpha)), alpha // 2, 1, ALPP)


def generate_from_hamiltonian(g: Graph, alpha: int) -> Instance:
    """Full-ALPP instance with |A| = alpha that is yes iff g has a Hamiltonian cycle.

    A degree-2 vertex v (neighbours u, w) lies on every Hamiltonian cycle with
    both its edges, so the cycle is a u-w path of length n - 2 in g - v.
    alpha/2 - 1 isolated paths of that length pad A to the requested size.
    """
    if alpha < 2 or alpha % 2:
        raise ConstructionError(f"|A| must be even and at least 2, got {alpha}")
    if g.n < 3 or g.min_degree() < 2:
        logger.info("minimum degree below 2: emitting a trivial no-instance")
        return _trivial_no_instance(alpha)
    low = [v for v in range(g.n) if g.degree(v) == 2]
    if not low:
        raise ConstructionError(
            f"no vertex of degree 2 (minimum degree {g.min_degree()}); grid-like input expected"
        )
    v = low[0]
    u, w = g.adjacency[v]
    rest, keep = g.induced(x for x in range(g.n) if x != v)
    index = {old: new for new, old in enumerate(keep)}
    ell = g.n - 2
    b = _Builder(rest.n)
    for x, y in rest.edges:
        b.edge(x, y)
    terminals = {index[u], index[w]}
    for c in range(alpha // 2 - 1):
        start = b.vertex(f"q{c}_0")
        path = b.path(start, ell, f"q{c}_")
        terminals.update((path[0], path[-1]))
    return Instance(b.graph(), frozenset(terminals), alpha // 2, ell, ALPP)


def generate_from_path_partition(g: Graph, lam: int) -> Instance:
    """Full-ALPP instance that is yes iff g splits into paths of length lam."""
    if lam < 2:
        raise ConstructionError(f"path length must be at least 2, got {lam}")
    if g.n == 0 or g.n % (lam + 1):
        raise ConstructionError(f"|V|={g.n} is not a positive multiple of lambda+1={lam + 1}")
    k = g.n // (lam + 1)
    terminals = range(g.n, g.n + 2 * k)
    edges = list(g.edges) + [(v, a) for a in terminals for v in range(g.n)]
    return Instance(
        Graph.from_edges(g.n + 2 * k, edges), frozenset(terminals), k, lam + 2, ALPP
    )


def _attachment_lengths(p: int, triples) -> list[tuple[int, int]]:
    lengths = []
    for i, (s, t, li) in enumerate(triples, start=1):
        tail = p * p - i * p - li
        if tail <= 0:
            raise ConstructionError(
                f"triple {i} ({s}, {t}, {li}): attachment length p^2 - ip - l_i = {tail} is not positive"
            )
        lengths.append((p * p + i * p, tail))
    return lengths


def reduce_extended_to_full(
    x: ExtendedInstance,
    max_weight: Optional[int] = None,
    max_vertices: Optional[int] = None,
) -> tuple[Instance, ReductionTrace]:
    """Full-ALPP instance with |A| = 2r and ell = 2p^2, p the size of the unweighted graph."""
    weight_cap = max_weight if max_weight is not None else Config.REDUCTION_MAX_WEIGHT
    vertex_cap = max_vertices if max_vertices is not None else Config.REDUCTION_MAX_VERTICES
    if x.max_weight > weight_cap:
        raise ResourceLimitError(f"edge weight {x.max_weight} exceeds the reduction cap {weight_cap}")
    if x.graph.n > vertex_cap:
        raise ResourceLimitError(f"{x.graph.n} vertices exceed the reduction cap {vertex_cap}")

    b = _Builder(x.graph.n, [x.name(v) for v in range(x.graph.n)])
    routes = {}
    for u, v in x.graph.edges:
        routes[("edge", u, v)] = b.path(u, x.weight(u, v), f"w{u}_{v}_", end=v)
    p = b.n
    ell = 2 * p * p
    lengths = _attachment_lengths(p, x.triples)
    named = {}
    terminals = set()
    for i, ((s, t, _), (head, tail)) in enumerate(zip(x.triples, lengths), start=1):
        s_prime = b.vertex(f"s'{i}")
        routes[("attach-s", i)] = b.path(s_prime, head, f"as{i}_", end=s)
        t_prime = b.vertex(f"t'{i}")
        routes[("attach-t", i)] = tuple(reversed(b.path(t_prime, tail, f"at{i}_", end=t)))
        named[("s'", i)], named[("t'", i)] = s_prime, t_prime
        routes[("ends", i)] = (s, t)
        terminals.update((s_prime, t_prime))
    target = Instance(b.graph(), frozenset(terminals), x.r, ell, ALPP)
    trace = ReductionTrace(
        "xalpp", "full-alpp", {"p": p, "ell": ell, "r": x.r}, named=named, routes=routes
    )
    logger.info(f"xalpp->full-alpp: p={p}, ell={ell}, {target.n} vertices")
    return target, trace


def transport_extended_packing(trace: ReductionTrace, paths: Sequence[Sequence[int]]) -> PathPacking:
    """Extended witness -> Full-ALPP witness: expand edges, add both attachments."""
    full = []
    for i, path in enumerate(paths, start=1):
        s, t = trace.route("ends", i)
        path = tuple(path) if path[0] == s else tuple(reversed(path))
        walk = [s]
        for u, v in zip(path, path[1:]):
            piece = trace.route("edge", *edge_key(u, v))
            if piece[0] != u:
                piece = tuple(reversed(piece))
            walk.extend(piece[1:])
        full.append(trace.route("attach-s", i) + tuple(walk[1:]) + trace.route("attach-t", i)[1:])
    return PathPacking(tuple(full)).canonical()


def _odd_size(n: int) -> int:
    # at least three columns, an odd number of them
    return max(3, n if n % 2 else n + 1)


def generate_mcc_extended(mcc: McccInput) -> tuple[ExtendedInstance, ReductionTrace]:
    """Weighted linkage instance that has a solution iff mcc has a multicoloured clique.

    Class i becomes n vertical paths P(i, j) of length k joined by horizontal
    edges along their tops a(i, j) and bottoms b(i, j); the triple
    (a(i, 1), a(i, n), L1) must skip exactly one P(i, j), which selects j.
    Class pair (i1, i2) gets hubs s, p, t and four heavy edges per cross edge;
    a length-L2 s-t path exists only through the x vertices of selected,
    adjacent choices.
    """
    k = mcc.k
    n = _odd_size(mcc.n)
    L1 = (k + 1) * (n - 1)
    L2 = 60 * n**6
    quarter = L2 // 4
    b = _Builder()
    named: dict[tuple, int] = {}
    triples = []
    for i in range(1, k + 1):
        for j in range(1, n + 1):
            column = [b.vertex(f"a{i}_{j}")]
            named[("a", i, j)] = column[0]
            for other in range(1, k + 1):
                if other != i:
                    column.append(b.vertex(f"x{i}_{j}_{other}"))
                    named[("x", i, j, other)] = column[-1]
            column.append(b.vertex(f"b{i}_{j}"))
            named[("b", i, j)] = column[-1]
            for u, v in zip(column, column[1:]):
                b.edge(u, v)
        for j in range(1, n):
            b.edge(named[("a", i, j)], named[("a", i, j + 1)])
            b.edge(named[("b", i, j)], named[("b", i, j + 1)])
        triples.append((named[("a", i, 1)], named[("a", i, n)], L1))

    heavy: dict[tuple[int, int], list[int]] = {}
    for i1, i2 in combinations(range(1, k + 1), 2):
        for role in ("s", "p", "t"):
            named[(role, i1, i2)] = b.vertex(f"{role}{i1}_{i2}")
        triples.append((named[("s", i1, i2)], named[("t", i1, i2)], L2))
    for (i1, j1), (i2, j2) in mcc.edges:
        left, right = named[("x", i1, j1, i2)], named[("x", i2, j2, i1)]
        shift = j1 * n**4 + j2 * n**2
        for hub, gadget, w in (
            (named[("s", i1, i2)], left, quarter + shift),
            (named[("p", i1, i2)], left, quarter),
            (named[("p", i1, i2)], right, quarter),
            (named[("t", i1, i2)], right, quarter - shift),
        ):
            heavy.setdefault((hub, gadget), [])
            if w not in heavy[(hub, gadget)]:
                heavy[(hub, gadget)].append(w)

    routes = {}
    midpoints = 0
    for (hub, gadget), weights in heavy.items():
        for index, w in enumerate(weights):
            if index == 0:
                b.edge(hub, gadget, w)
                routes[("heavy", hub, gadget, w)] = (hub, gadget)
                continue
            # a parallel edge keeps its total weight through one subdivision
            mid = b.vertex(f"m{hub}_{gadget}_{w}")
            b.edge(hub, mid, w - 1)
            b.edge(mid, gadget, 1)
            routes[("heavy", hub, gadget, w)] = (hub, mid, gadget)
            midpoints += 1

    x = ExtendedInstance(b.graph(), dict(b.weights), tuple(triples), tuple(b.names))
    params = {
        "k": k,
        "n": mcc.n,
        "padded_n": n,
        "L1": L1,
        "L2": L2,
        "r": x.r,
        "midpoints": midpoints,
        "pathwidth_bound": 3 * comb(k, 2) + 4,
    }
    logger.info(f"mcc->xalpp: {x.graph.n} vertices, r={x.r}, W={x.max_weight}")
    return x, ReductionTrace("mcc", "xalpp", params, named=named, routes=routes)


def _selection_path(trace: ReductionTrace, i: int, skip: int) -> tuple[int, ...]:
    """The L1 path of class i: zig-zag through every P(i, j) except j = skip."""
    named, n = trace.named, trace.params["padded_n"]
    k = trace.params["k"]
    inner = [o for o in range(1, k + 1) if o != i]
    top = True
    walk = [named[("a", i, 1)]]
    for j in range(1, n + 1):
        if j != skip:
            column = [named[("a", i, j)]] + [named[("x", i, j, o)] for o in inner] + [named[("b", i, j)]]
            if not top:
                column.reverse()
            walk.extend(column[1:])
            top = not top
        if j < n:
            walk.append(named[("a" if top else "b", i, j + 1)])
    if not top:
        raise ContractViolation(f"class {i}: zig-zag ended on the bottom row")
    return tuple(walk)


def clique_witness(
    x: ExtendedInstance, trace: ReductionTrace, sigma: Sequence[int]
) -> tuple[tuple[int, ...], ...]:
    """Witness paths of the weighted instance built from a multicoloured clique sigma."""
    k, n = trace.params["k"], trace.params["padded_n"]
    quarter = trace.params["L2"] // 4
    if len(sigma) != k:
        raise ConstructionError(f"sigma must pick one vertex in each of {k} classes")
    paths = [_selection_path(trace, i, sigma[i - 1]) for i in range(1, k + 1)]
    for i1, i2 in combinations(range(1, k + 1), 2):
        j1, j2 = sigma[i1 - 1], sigma[i2 - 1]
        shift = j1 * n**4 + j2 * n**2
        left = trace.named[("x", i1, j1, i2)]
        right = trace.named[("x", i2, j2, i1)]
        s, p, t = (trace.named[(role, i1, i2)] for role in "spt")
        try:
            legs = (
                trace.route("heavy", s, left, quarter + shift),
                tuple(reversed(trace.route("heavy", p, left, quarter))),
                trace.route("heavy", p, right, quarter),
                tuple(reversed(trace.route("heavy", t, right, quarter - shift))),
            )
        except ContractViolation:
            raise ConstructionError(f"sigma picks non-adjacent {i1}:{j1} and {i2}:{j2}")
        walk = list(legs[0])
        for leg in legs[1:]:
            walk.extend(leg[1:])
        paths.append(tuple(walk))
    return tuple(paths)


@dataclass(frozen=True)
class ReductionSummary:
    """Exact sizes of the MCC -> weighted linkage -> Full-ALPP composition."""

    k: int
    n: int
    padded_n: int
    r: int
    terminals: int
    L1: int
    L2: int
    extended_vertices: int
    extended_edges: int
    max_weight: int
    p: int
    ell: int
    full_vertices: int
    full_edges: int
    pathwidth_bound_extended: int
    pathwidth_bound_full: int

    def as_dict(self) -> dict[str, int]:
        return asdict(self)


def plan_mcc_to_full(mcc: McccInput) -> ReductionSummary:
    """Sizes of the composed reduction without materialising the Full-ALPP graph."""
    x, trace = generate_mcc_extended(mcc)
    extra = sum(w - 1 for w in x.weights.values())
    p = x.graph.n + extra
    lengths = _attachment_lengths(p, x.triples)
    attached = sum(head + tail for head, tail in lengths)
    terminals = 2 * x.r
    if terminals != 2 * (mcc.k + comb(mcc.k, 2)):
        raise ContractViolation(f"|A|={terminals} does not match 2(k + C(k, 2))")
    bound = trace.params["pathwidth_bound"]
    return ReductionSummary(
        k=mcc.k,
        n=mcc.n,
        padded_n=trace.params["padded_n"],
        r=x.r,
        terminals=terminals,
        L1=trace.params["L1"],
        L2=trace.params["L2"],
        extended_vertices=x.graph.n,
        extended_edges=x.graph.m,
        max_weight=x.max_weight,
        p=p,
        ell=2 * p * p,
        full_vertices=p + attached,
        full_edges=sum(x.weights.values()) + attached,
        pathwidth_bound_extended=bound,
        pathwidth_bound_full=bound + 2,
    )


def reduce_mcc_to_full(
    mcc: McccInput,
    max_weight: Optional[int] = None,
    max_vertices: Optional[int] = None,
) -> Instance:
    """Compose both reductions; raises ResourceLimitError above the reduction caps."""
    summary = plan_mcc_to_full(mcc)
    logger.info(
        f"mcc->full-alpp: |A|={summary.terminals}, ell={summary.ell}, "
        f"{summary.full_vertices} vertices, pathwidth <= {summary.pathwidth_bound_full}"
    )
    x, _ = generate_mcc_extended(mcc)
    full, _ = reduce_extended_to_full(x, max_weight, max_vertices)
    return full
