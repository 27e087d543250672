import random

import networkx as nx
import pytest

from alpp.errors import ContractViolation
from alpp.graph import Graph, Instance, verify_packing
from alpp.matching import (
    AuxiliaryMatchingGraph,
    EdgeClass,
    Matching,
    Part,
    build_true_twin_instance,
    max_matching,
    saturate_matching,
    solve_ell1,
    solve_ell3,
    solve_small_ell,
)
from alpp.oracle import brute_force_matching_size, oracle_max_packing


def random_instance(rng, n, p, ell):
    g, _ = Graph.from_networkx(nx.gnp_random_graph(n, p, seed=rng.randint(0, 10**6)))
    terminals = rng.sample(range(n), rng.randint(2, n))
    return Instance(g, terminals, 1, ell)


def test_matching_rejects_shared_vertex():
    with pytest.raises(ContractViolation):
        Matching(frozenset({(0, 1), (1, 2)}))


def test_max_matching_on_odd_cycle_and_path():
    c5 = Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
    assert max_matching(c5).size == 2
    p4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    assert max_matching(p4).edges == frozenset({(0, 1), (2, 3)})


def test_auxiliary_graph_parts_and_edge_classes():
    # terminals 0, 3; path 0-1-2-3
    inst = Instance(Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)]), {0, 3}, 1, 3)
    aux = AuxiliaryMatchingGraph.build(inst)
    assert aux.parts.count(Part.A) == 2
    assert aux.parts.count(Part.V1) == aux.parts.count(Part.V2) == 2
    assert aux.side_size == 2
    assert aux.graph.n == 6
    # two E_A1, one E_22 and the two copy edges
    assert aux.graph.m == 5
    classes = sorted(aux.edge_class(u, v).value for u, v in aux.graph.edges)
    assert classes == sorted(["E_A1", "E_A1", "E_22", "E_12", "E_12"])
    assert aux.edge_class(aux.copy1[1], aux.copy2[1]) is EdgeClass.ONE_TWO


def test_ell1_is_a_matching_on_terminals():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    inst = Instance(g, {0, 1, 2, 3}, 2, 1)
    result = solve_ell1(inst)
    assert result.decision
    assert result.maximum == 2
    assert verify_packing(inst, result.witness)
    assert not solve_ell1(inst.with_k(3)).decision


def test_ell3_path_instance():
    inst = Instance(Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)]), {0, 3}, 1, 3)
    result = solve_ell3(inst)
    assert result.decision
    assert result.witness.paths == ((0, 1, 2, 3),)
    assert result.stats["required_size"] == 3


def test_ell3_identity_against_brute_force_matching():
    rng = random.Random(3)
    for _ in range(30):
        inst = random_instance(rng, rng.randint(4, 8), 0.45, 3)
        aux = AuxiliaryMatchingGraph.build(inst)
        maximum = oracle_max_packing(inst)[0]
        assert brute_force_matching_size(aux.graph) == maximum + aux.side_size


def test_saturation_covers_both_copies():
    rng = random.Random(11)
    for _ in range(20):
        inst = random_instance(rng, rng.randint(4, 8), 0.5, 3)
        aux = AuxiliaryMatchingGraph.build(inst)
        saturated = saturate_matching(aux, max_matching(aux.graph))
        covered = saturated.mates()
        assert saturated.size == max_matching(aux.graph).size
        assert all(aux.copy1[v] in covered and aux.copy2[v] in covered for v in aux.copy1)


def test_saturation_needs_a_maximum_matching():
    inst = Instance(Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)]), {0, 3}, 1, 3)
    aux = AuxiliaryMatchingGraph.build(inst)
    with pytest.raises(ContractViolation):
        saturate_matching(aux, Matching(frozenset()))


def test_twin_instance_shape():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (0, 3), (1, 3)])
    inst = Instance(g, {0, 2}, 1, 2)
    twinned, twins = build_true_twin_instance(inst)
    assert twinned.ell == 3
    assert twinned.n == 6
    assert twins.twin == {1: 4, 3: 5}
    assert twins.original(5) == 3
    # the non-terminal edge 1-3 is gone
    assert not twinned.graph.has_edge(1, 3)
    assert twinned.graph.has_edge(0, 4) and twinned.graph.has_edge(1, 4)


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_small_ell_agrees_with_oracle(ell):
    rng = random.Random(100 + ell)
    for _ in range(40):
        inst = random_instance(rng, rng.randint(2, 9), 0.4, ell)
        maximum = oracle_max_packing(inst)[0]
        for k in (1, 2, 3):
            result = solve_small_ell(inst.with_k(k))
            assert result.decision == (maximum >= k)
            if result.decision:
                assert verify_packing(inst.with_k(k), result.witness)


def test_small_ell_refuses_ell_four():
    inst = Instance(Graph.from_edges(5, [(i, i + 1) for i in range(4)]), {0, 4}, 1, 4)
    with pytest.raises(ContractViolation, match="NP-complete"):
        solve_small_ell(inst)


@pytest.mark.parametrize("solver, ell", [(solve_ell1, 2), (solve_ell3, 1)])
def test_wrong_ell_is_a_contract_violation(solver, ell):
    inst = Instance(Graph.from_edges(3, [(0, 1), (1, 2)]), {0, 2}, 1, ell)
    with pytest.raises(ContractViolation):
        solver(inst)


@pytest.mark.slow
def test_ell3_identity_sweep():
    rng = random.Random(203)
    for _ in range(200):
        inst = random_instance(rng, rng.randint(4, 12), rng.uniform(0.2, 0.5), 3)
        aux = AuxiliaryMatchingGraph.build(inst)
        size = max_matching(aux.graph).size
        if aux.graph.n <= 14:
            assert brute_force_matching_size(aux.graph) == size
        maximum, packing = oracle_max_packing(inst)
        assert verify_packing(inst, packing, expected_count=maximum)
        assert size == maximum + aux.side_size
        for k in (1, 2, 3):
            assert solve_ell3(inst.with_k(k)).decision == (maximum >= k)
