"""
Tree decompositions: heuristic and exact acquisition, validation, and
conversion to nice form (leaf / introduce / forget / join nodes).
"""

import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import networkx as nx
from networkx.algorithms.approximation import treewidth_min_degree, treewidth_min_fill_in

from alpp.errors import ContractViolation, ResourceLimitError
from alpp.graph import Graph
from config import Config

logger = logging.getLogger(__name__)

MIN_DEGREE = "min-degree"
MIN_FILL = "min-fill"
STRATEGIES = (MIN_DEGREE, MIN_FILL)


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset[int], ...]
    tree_edges: tuple[tuple[int, int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def problems(self, graph: Graph) -> list[str]:
        """Every violated tree-decomposition condition (empty when valid)."""
        found = []
        nb = len(self.bags)
        if nb == 0:
            return ["no bags"]
        t = nx.Graph()
        t.add_nodes_from(range(nb))
        for i, j in self.tree_edges:
            if not (0 <= i < nb and 0 <= j < nb) or i == j:
                found.append(f"tree edge {i}-{j} is invalid")
            else:
                t.add_edge(i, j)
        if not found and not nx.is_tree(t):
            found.append("bags are not connected as a tree")
        holders: dict[int, list[int]] = {v: [] for v in range(graph.n)}
        for i, bag in enumerate(self.bags):
            for v in bag:
                if v not in holders:
                    found.append(f"bag {i} names unknown vertex {v}")
                else:
                    holders[v].append(i)
        for v, where in holders.items():
            if not where:
                found.append(f"vertex {v} is in no bag")
            elif not found and not nx.is_connected(t.subgraph(where)):
                found.append(f"bags holding vertex {v} are not connected")
        for u, v in graph.edges:
            if not any(u in bag and v in bag for bag in self.bags):
                found.append(f"edge {u}-{v} is in no bag")
        return found

    def validate(self, graph: Graph):
        problems = self.problems(graph)
        if problems:
            raise ContractViolation("invalid tree decomposition: " + "; ".join(problems))


def _from_networkx_decomposition(graph: Graph, decomp: nx.Graph) -> TreeDecomposition:
    bags = list(decomp.nodes)
    if not bags:
        bags = [frozenset()]
    index = {b: i for i, b in enumerate(bags)}
    edges = tuple(sorted(tuple(sorted((index[a], index[b]))) for a, b in decomp.edges))
    td = TreeDecomposition(tuple(frozenset(b) for b in bags), edges)
    return _connect_forest(td)


def _connect_forest(td: TreeDecomposition) -> TreeDecomposition:
    """Join the components of a bag forest into one tree."""
    t = nx.Graph()
    t.add_nodes_from(range(len(td.bags)))
    t.add_edges_from(td.tree_edges)
    roots = [min(c) for c in nx.connected_components(t)]
    extra = tuple((roots[0], r) for r in roots[1:])
    return TreeDecomposition(td.bags, td.tree_edges + extra)


def heuristic_tree_decomposition(graph: Graph, strategy: str = MIN_DEGREE) -> TreeDecomposition:
    """Elimination-ordering decomposition from networkx' greedy heuristics."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown decomposition strategy {strategy!r}")
    if graph.n == 0:
        return TreeDecomposition((frozenset(),), ())
    heuristic = treewidth_min_degree if strategy == MIN_DEGREE else treewidth_min_fill_in
    width, decomp = heuristic(graph.to_networkx())
    td = _from_networkx_decomposition(graph, decomp)
    logger.debug(f"{strategy} decomposition: width {td.width}, {len(td.bags)} bags")
    return td


def decomposition_from_order(graph: Graph, order: Sequence[int]) -> TreeDecomposition:
    """Tree decomposition induced by eliminating vertices in `order`."""
    position = {v: i for i, v in enumerate(order)}
    fill = [set(graph.adjacency[v]) for v in range(graph.n)]
    bags = []
    for v in order:
        higher = {u for u in fill[v] if position[u] > position[v]}
        bags.append(frozenset(higher | {v}))
        for u in higher:
            fill[u] |= higher - {u}
    edges = []
    for i, v in enumerate(order):
        higher = bags[i] - {v}
        if higher:
            parent = min(higher, key=position.__getitem__)
            edges.append((i, position[parent]))
    if not bags:
        return TreeDecomposition((frozenset(),), ())
    return _connect_forest(TreeDecomposition(tuple(bags), tuple(edges)))


def exact_treewidth_small(
    graph: Graph, max_vertices: Optional[int] = None
) -> tuple[int, TreeDecomposition]:
    """Exact treewidth by the subset DP over elimination orderings.

    TW(S) = min over v in S of max(TW(S - v), |Q(S - v, v)|), where Q(S, v)
    is the set of vertices outside S + v reachable from v through S.
    """
    cap = max_vertices if max_vertices is not None else Config.TREEWIDTH_MAX_VERTICES
    n = graph.n
    if n > cap:
        raise ResourceLimitError(f"exact treewidth limited to {cap} vertices, got {n}")
    if n == 0:
        return -1, TreeDecomposition((frozenset(),), ())
    masks = [sum(1 << u for u in graph.adjacency[v]) for v in range(n)]

    def q_size(S: int, v: int) -> int:
        seen = 1 << v
        frontier = masks[v]
        reach = 0
        while frontier:
            low = frontier & -frontier
            frontier ^= low
            if seen & low:
                continue
            seen |= low
            if S & low:
                frontier |= masks[low.bit_length() - 1] & ~seen
            else:
                reach += 1
        return reach

    full = (1 << n) - 1
    tw = [0] * (1 << n)
    choice = [0] * (1 << n)
    tw[0] = -1
    for S in range(1, full + 1):
        best = n
        rest = S
        while rest:
            low = rest & -rest
            rest ^= low
            v = low.bit_length() - 1
            value = max(tw[S ^ low], q_size(S ^ low, v))
            if value < best:
                best, choice[S] = value, v
        tw[S] = best
    order = []
    S = full
    while S:
        v = choice[S]
        order.append(v)
        S ^= 1 << v
    order.reverse()
    td = decomposition_from_order(graph, order)
    if td.width != tw[full] and graph.m:
        raise ContractViolation(f"elimination order width {td.width} != {tw[full]}")
    return tw[full], td


class NodeKind(str, Enum):
    LEAF = "leaf"
    INTRODUCE = "introduce"
    FORGET = "forget"
    JOIN = "join"


@dataclass(frozen=True)
class NiceNode:
    kind: NodeKind
    bag: frozenset[int]
    children: tuple[int, ...] = ()
    vertex: Optional[int] = None


@dataclass(frozen=True)
class NiceTreeDecomposition:
    """Nodes are stored children-first; the last node is the root."""

    nodes: tuple[NiceNode, ...]

    @property
    def root(self) -> int:
        return len(self.nodes) - 1

    @property
    def width(self) -> int:
        return max(len(node.bag) for node in self.nodes) - 1

    def kind_problems(self) -> list[str]:
        found = []
        for i, node in enumerate(self.nodes):
            kids = [self.nodes[c] for c in node.children]
            if any(c >= i for c in node.children):
                found.append(f"node {i} precedes a child")
            elif node.kind is NodeKind.LEAF:
                if kids or node.bag:
                    found.append(f"leaf {i} must be childless with an empty bag")
            elif node.kind is NodeKind.INTRODUCE:
                if len(kids) != 1 or node.vertex in kids[0].bag or kids[0].bag | {node.vertex} != node.bag:
                    found.append(f"introduce {i} is malformed")
            elif node.kind is NodeKind.FORGET:
                if len(kids) != 1 or node.vertex not in kids[0].bag or kids[0].bag - {node.vertex} != node.bag:
                    found.append(f"forget {i} is malformed")
            elif len(kids) != 2 or any(k.bag != node.bag for k in kids):
                found.append(f"join {i} is malformed")
        used = [c for node in self.nodes for c in node.children]
        if len(used) != len(set(used)) or len(used) != len(self.nodes) - 1:
            found.append("nodes do not form a rooted tree")
        return found

    def as_tree_decomposition(self) -> TreeDecomposition:
        edges = tuple((c, i) for i, node in enumerate(self.nodes) for c in node.children)
        return TreeDecomposition(tuple(node.bag for node in self.nodes), edges)

    def validate(self, graph: Graph):
        problems = self.kind_problems() or self.as_tree_decomposition().problems(graph)
        if problems:
            raise ContractViolation("invalid nice decomposition: " + "; ".join(problems))


def make_nice(td: TreeDecomposition, graph: Optional[Graph] = None) -> NiceTreeDecomposition:
    """Convert a tree decomposition to nice form of the same width.

    Bag 0 is the root. Each child subtree is walked up to its parent's bag by
    forgetting then introducing one vertex at a time; parents with several
    children get a binary cascade of joins over identical bags.
    """
    if graph is not None:
        td.validate(graph)
    nodes: list[NiceNode] = []

    def add(node: NiceNode) -> int:
        nodes.append(node)
        return len(nodes) - 1

    def chain(top: int, target: frozenset[int]) -> int:
        bag = nodes[top].bag
        for v in sorted(bag - target):
            bag = bag - {v}
            top = add(NiceNode(NodeKind.FORGET, bag, (top,), v))
        for v in sorted(target - bag):
            bag = bag | {v}
            top = add(NiceNode(NodeKind.INTRODUCE, bag, (top,), v))
        return top

    adjacency: dict[int, list[int]] = {i: [] for i in range(len(td.bags))}
    for i, j in td.tree_edges:
        adjacency[i].append(j)
        adjacency[j].append(i)
    parent = {0: -1}
    order = []
    queue = deque([0])
    while queue:
        i = queue.popleft()
        order.append(i)
        for j in sorted(adjacency[i]):
            if j not in parent:
                parent[j] = i
                queue.append(j)
    if len(order) != len(td.bags):
        raise ContractViolation("tree decomposition is not connected")

    top_of: dict[int, int] = {}
    for i in reversed(order):
        bag = td.bags[i]
        kids = [top_of[j] for j in sorted(adjacency[i]) if parent.get(j) == i]
        if not kids:
            tops = [chain(add(NiceNode(NodeKind.LEAF, frozenset())), bag)]
        else:
            tops = [chain(k, bag) for k in kids]
        while len(tops) > 1:
            merged = []
            for a, b in zip(tops[::2], tops[1::2]):
                merged.append(add(NiceNode(NodeKind.JOIN, bag, (a, b))))
            if len(tops) % 2:
                merged.append(tops[-1])
            tops = merged
        top_of[i] = tops[0]

    root = top_of[0]
    if root != len(nodes) - 1:
        raise ContractViolation("root must be the last nice node")
    nice = NiceTreeDecomposition(tuple(nodes))
    if graph is not None:
        nice.validate(graph)
    logger.debug(f"nice decomposition: {len(nodes)} nodes, width {nice.width}")
    return nice
