import random

import networkx as nx
import pytest

from alpp.decomposition import (
    MIN_DEGREE,
    MIN_FILL,
    NiceNode,
    NiceTreeDecomposition,
    NodeKind,
    TreeDecomposition,
    decomposition_from_order,
    exact_treewidth_small,
    heuristic_tree_decomposition,
    make_nice,
)
from alpp.errors import ContractViolation, ResourceLimitError
from alpp.graph import Graph


def from_nx(g):
    return Graph.from_networkx(g)[0]


def path_graph(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


SMALL_GRAPHS = [
    Graph.empty(1),
    Graph.empty(4),
    path_graph(6),
    from_nx(nx.cycle_graph(7)),
    from_nx(nx.complete_graph(5)),
    from_nx(nx.grid_2d_graph(3, 4)),
    from_nx(nx.petersen_graph()),
    Graph.from_edges(6, [(0, 1), (1, 2), (3, 4)]),
]


@pytest.mark.parametrize("strategy", [MIN_DEGREE, MIN_FILL])
@pytest.mark.parametrize("graph", SMALL_GRAPHS)
def test_heuristic_decompositions_are_valid(graph, strategy):
    td = heuristic_tree_decomposition(graph, strategy)
    assert td.problems(graph) == []
    assert td.width >= exact_treewidth_small(graph)[0]


def test_heuristic_on_empty_graph():
    td = heuristic_tree_decomposition(Graph.empty(0))
    assert td.bags == (frozenset(),)
    assert td.width == -1


def test_unknown_strategy():
    with pytest.raises(ValueError):
        heuristic_tree_decomposition(path_graph(3), "random")


@pytest.mark.parametrize(
    "graph, expected",
    [
        (Graph.empty(0), -1),
        (Graph.empty(3), 0),
        (path_graph(7), 1),
        (from_nx(nx.balanced_tree(2, 2)), 1),
        (from_nx(nx.cycle_graph(8)), 2),
        (from_nx(nx.complete_graph(6)), 5),
        (from_nx(nx.grid_2d_graph(3, 3)), 3),
        (from_nx(nx.petersen_graph()), 4),
    ],
)
def test_exact_treewidth(graph, expected):
    tw, td = exact_treewidth_small(graph)
    assert tw == expected
    assert td.problems(graph) == []
    assert td.width == max(expected, 0) or graph.n == 0


def test_exact_treewidth_cap():
    with pytest.raises(ResourceLimitError):
        exact_treewidth_small(path_graph(13))
    assert exact_treewidth_small(path_graph(13), max_vertices=13)[0] == 1


def test_decomposition_from_order_follows_elimination():
    cycle = from_nx(nx.cycle_graph(5))
    td = decomposition_from_order(cycle, [0, 1, 2, 3, 4])
    assert td.problems(cycle) == []
    assert td.width == 2
    assert td.bags[0] == frozenset({0, 1, 4})


def test_problems_are_reported():
    g = path_graph(3)
    missing_vertex = TreeDecomposition((frozenset({0, 1}),), ())
    assert any("vertex 2" in p for p in missing_vertex.problems(g))
    assert any("edge 1-2" in p for p in missing_vertex.problems(g))
    split = TreeDecomposition(
        (frozenset({0, 1}), frozenset({2}), frozenset({1, 2})), ((0, 1), (1, 2))
    )
    assert any("not connected" in p for p in split.problems(g))
    cyclic = TreeDecomposition(
        (frozenset({0, 1}), frozenset({1, 2}), frozenset({1})), ((0, 1), (1, 2), (2, 0))
    )
    assert any("not connected as a tree" in p for p in cyclic.problems(g))
    with pytest.raises(ContractViolation):
        split.validate(g)
    assert TreeDecomposition((), ()).problems(g) == ["no bags"]


@pytest.mark.parametrize("graph", SMALL_GRAPHS)
def test_make_nice_keeps_width_and_validity(graph):
    td = heuristic_tree_decomposition(graph)
    nice = make_nice(td, graph)
    assert nice.kind_problems() == []
    assert nice.width == td.width
    assert nice.root == len(nice.nodes) - 1
    assert nice.nodes[nice.root].bag == td.bags[0]
    kinds = {node.kind for node in nice.nodes}
    assert NodeKind.LEAF in kinds


def test_make_nice_builds_join_cascade():
    star = TreeDecomposition(
        (frozenset({0}), frozenset({0, 1}), frozenset({0, 2}), frozenset({0, 3})),
        ((0, 1), (0, 2), (0, 3)),
    )
    g = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    nice = make_nice(star, g)
    joins = [node for node in nice.nodes if node.kind is NodeKind.JOIN]
    assert len(joins) == 2
    assert all(node.bag == frozenset({0}) for node in joins)


def test_make_nice_rejects_invalid_input():
    g = path_graph(3)
    with pytest.raises(ContractViolation):
        make_nice(TreeDecomposition((frozenset({0, 1}),), ()), g)


def test_kind_problems_flag_bad_nodes():
    bad = NiceTreeDecomposition(
        (
            NiceNode(NodeKind.LEAF, frozenset({1})),
            NiceNode(NodeKind.FORGET, frozenset({1}), (0,), 2),
        )
    )
    problems = bad.kind_problems()
    assert any("leaf 0" in p for p in problems)
    assert any("forget 1" in p for p in problems)


def test_make_nice_on_random_graphs():
    rng = random.Random(5)
    for _ in range(15):
        graph = from_nx(nx.gnp_random_graph(rng.randint(1, 10), 0.35, seed=rng.randint(0, 10**6)))
        nice = make_nice(heuristic_tree_decomposition(graph, MIN_FILL), graph)
        nice.validate(graph)
