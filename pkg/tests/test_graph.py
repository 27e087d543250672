import pytest

from alpp.errors import MalformedInputError
from alpp.graph import (
    SAPP,
    Graph,
    Instance,
    PathPacking,
    Violation,
    canonicalize,
    trivial_no_reason,
    verify_for,
    verify_packing,
    verify_short_packing,
)


def path_graph(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def two_paths_instance():
    # 0-1-2-3 and 4-5-6-7, terminals at the ends
    g = Graph.from_edges(8, [(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7)])
    return Instance(g, {0, 3, 4, 7}, 2, 3)


def test_graph_from_edges_sorts_neighbours():
    g = Graph.from_edges(4, [(2, 0), (0, 1), (3, 0)])
    assert g.adjacency[0] == (1, 2, 3)
    assert g.m == 3
    assert g.edges == ((0, 1), (0, 2), (0, 3))
    assert g.degree(0) == 3
    assert g.min_degree() == 1
    assert g.has_edge(2, 0)
    assert not g.has_edge(1, 2)


@pytest.mark.parametrize(
    "edges",
    [
        [(0, 0)],
        [(0, 1), (1, 0)],
        [(0, 5)],
    ],
)
def test_graph_rejects_bad_edges(edges):
    with pytest.raises(MalformedInputError):
        Graph.from_edges(3, edges)


def test_graph_rejects_asymmetric_adjacency():
    with pytest.raises(MalformedInputError):
        Graph(2, ((1,), ()))


def test_induced_relabels_in_sorted_order():
    g = path_graph(5)
    sub, keep = g.induced([4, 2, 3])
    assert keep == (2, 3, 4)
    assert sub.edges == ((0, 1), (1, 2))


def test_remove_and_add_edges():
    g = path_graph(4)
    smaller = g.remove_edges([(2, 1)])
    assert smaller.edges == ((0, 1), (2, 3))
    bigger = g.add_vertices_and_edges(1, [(3, 4)])
    assert bigger.n == 5 and bigger.has_edge(3, 4)


def test_networkx_round_trip_keeps_node_order():
    g = path_graph(4)
    back, nodes = Graph.from_networkx(g.to_networkx())
    assert back == g
    assert nodes == (0, 1, 2, 3)


def test_instance_validation():
    g = path_graph(3)
    with pytest.raises(MalformedInputError):
        Instance(g, {0, 2}, 0, 2)
    with pytest.raises(MalformedInputError):
        Instance(g, {0, 2}, 1, 0)
    with pytest.raises(MalformedInputError):
        Instance(g, {0, 7}, 1, 2)
    with pytest.raises(MalformedInputError):
        Instance(g, {0, 2}, 1, 2, kind="other")


def test_instance_helpers():
    inst = two_paths_instance()
    assert inst.sorted_terminals == (0, 3, 4, 7)
    assert inst.non_terminals == (1, 2, 5, 6)
    assert inst.is_full
    assert not inst.is_short
    assert inst.with_k(1).k == 1
    assert trivial_no_reason(inst) is None
    assert "exceeds" in trivial_no_reason(inst.with_k(3))


def test_canonicalize_drops_labels():
    inst = Instance(path_graph(2), {0, 1}, 1, 1, labels=(10, 20))
    assert inst.label(1) == 20
    assert canonicalize(inst).labels is None
    assert canonicalize(inst) == inst


def test_packing_canonical_orients_and_sorts():
    packing = PathPacking(((7, 6, 5, 4), (0, 1, 2, 3)))
    assert packing.canonical().paths == ((0, 1, 2, 3), (4, 5, 6, 7))
    assert packing.vertices() == set(range(8))
    assert packing.relabel(list(range(10, 18))).paths[1] == (10, 11, 12, 13)


def test_verify_accepts_valid_packing():
    inst = two_paths_instance()
    verdict = verify_packing(inst, PathPacking(((0, 1, 2, 3), (7, 6, 5, 4))))
    assert verdict
    assert str(verdict) == "ok"


@pytest.mark.parametrize(
    "paths, rule",
    [
        (((0, 1, 2),), Violation.LENGTH),
        (((1, 2, 3, 4),), Violation.ENDPOINT),
        (((0, 1, 2, 3), (0, 1, 2, 3)), Violation.DISJOINT),
        (((0, 1, 2, 3),), Violation.COUNT),
        (((0, 1, 5, 4), (3, 2, 6, 7)), Violation.ADJACENCY),
    ],
)
def test_verify_reports_first_broken_rule(paths, rule):
    verdict = verify_packing(two_paths_instance(), PathPacking(paths))
    assert not verdict
    assert verdict.rule == rule
    assert str(verdict).startswith(f"invalid: {rule.value}")


def test_verify_rejects_terminal_inside_path():
    g = path_graph(5)
    inst = Instance(g, {0, 2, 4}, 1, 4)
    verdict = verify_packing(inst, PathPacking(((0, 1, 2, 3, 4),)))
    assert verdict.rule == Violation.INTERNAL


def test_verify_rejects_repeated_vertex_inside_one_path():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 0), (2, 3)])
    inst = Instance(g, {0, 3}, 1, 4)
    verdict = verify_packing(inst, PathPacking(((0, 1, 2, 0, 3),)))
    assert not verdict


def test_verify_out_of_range_vertex_is_malformed():
    with pytest.raises(MalformedInputError):
        verify_packing(two_paths_instance(), PathPacking(((0, 1, 2, 99),)))


def test_expected_count_overrides_k():
    inst = two_paths_instance()
    assert verify_packing(inst, PathPacking(((0, 1, 2, 3),)), expected_count=1)
    assert verify_packing(inst, PathPacking(), expected_count=0)


def test_short_packing_accepts_any_length_up_to_ell():
    g = Graph.from_edges(5, [(0, 1), (2, 3), (3, 4)])
    inst = Instance(g, {0, 1, 2, 4}, 2, 2, kind=SAPP)
    packing = PathPacking(((0, 1), (2, 3, 4)))
    assert verify_short_packing(inst, packing)
    assert verify_for(inst, packing)
    assert verify_short_packing(inst, PathPacking(((0,), (2, 3, 4)))).rule == Violation.TRIVIAL
    assert not verify_packing(Instance(g, {0, 1, 2, 4}, 2, 2), packing)
