import random

import networkx as nx
import pytest

from alpp.decomposition import (
    MIN_FILL,
    TreeDecomposition,
    exact_treewidth_small,
    heuristic_tree_decomposition,
    make_nice,
)
from alpp.dp import COUNTED, SUBSET, solve_dp
from alpp.errors import ContractViolation
from alpp.graph import Graph, Instance, verify_packing
from alpp.oracle import oracle_max_packing


def nice_for(instance, strategy="min-degree"):
    return make_nice(heuristic_tree_decomposition(instance.graph, strategy), instance.graph)


def random_instance(rng, n, p, ell):
    g, _ = Graph.from_networkx(nx.gnp_random_graph(n, p, seed=rng.randint(0, 10**6)))
    terminals = rng.sample(range(n), rng.randint(2, n))
    return Instance(g, terminals, 1, ell)


def test_single_path():
    inst = Instance(Graph.from_edges(5, [(i, i + 1) for i in range(4)]), {0, 4}, 1, 4)
    result = solve_dp(inst, nice_for(inst))
    assert result.decision
    assert result.maximum == 1
    assert result.witness.paths == ((0, 1, 2, 3, 4),)
    assert result.algorithm == "dp"
    assert set(result.stats) == {"dp_nodes", "dp_states", "max_table", "width"}


def test_terminal_cannot_be_inside_a_path():
    inst = Instance(Graph.from_edges(5, [(i, i + 1) for i in range(4)]), {0, 2, 4}, 1, 4)
    result = solve_dp(inst, nice_for(inst))
    assert not result.decision
    assert result.maximum == 0
    assert result.witness is None


def test_ell_at_least_n_is_a_no_instance():
    inst = Instance(Graph.from_edges(3, [(0, 1), (1, 2)]), {0, 2}, 1, 3)
    result = solve_dp(inst, nice_for(inst))
    assert not result.decision and result.maximum == 0


def test_grid_packing():
    grid, _ = Graph.from_networkx(nx.grid_2d_graph(3, 4))
    # rows 0 and 2 become two (A, 3)-paths
    inst = Instance(grid, {0, 3, 8, 11}, 2, 3)
    result = solve_dp(inst, nice_for(inst))
    assert result.decision
    assert verify_packing(inst, result.witness)


def test_modes_agree_on_cycle():
    cycle, _ = Graph.from_networkx(nx.cycle_graph(10))
    inst = Instance(cycle, {0, 4, 5, 9}, 2, 4)
    ntd = nice_for(inst)
    subset = solve_dp(inst, ntd, SUBSET)
    counted = solve_dp(inst, ntd, COUNTED)
    assert subset.maximum == counted.maximum == 2


def test_unknown_state_mode():
    inst = Instance(Graph.from_edges(2, [(0, 1)]), {0, 1}, 1, 1)
    with pytest.raises(ValueError):
        solve_dp(inst, nice_for(inst), "lossy")


def test_decomposition_of_another_graph_is_rejected():
    inst = Instance(Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)]), {0, 3}, 1, 3)
    other = Graph.from_edges(4, [(0, 1)])
    ntd = make_nice(heuristic_tree_decomposition(other), other)
    with pytest.raises(ContractViolation):
        solve_dp(inst, ntd)


def test_user_decomposition_with_large_bag():
    inst = Instance(Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)]), {0, 3}, 1, 3)
    td = TreeDecomposition((frozenset(range(4)),), ())
    result = solve_dp(inst, make_nice(td, inst.graph))
    assert result.maximum == 1
    assert result.stats["width"] == 3


@pytest.mark.parametrize("mode", [SUBSET, COUNTED])
@pytest.mark.parametrize("ell", [1, 2, 3, 4, 5])
def test_dp_agrees_with_oracle(mode, ell):
    rng = random.Random(1000 * ell + len(mode))
    for _ in range(12):
        inst = random_instance(rng, rng.randint(2, 9), 0.35, ell)
        maximum = oracle_max_packing(inst)[0]
        result = solve_dp(inst, nice_for(inst, MIN_FILL), mode)
        assert result.maximum == maximum
        for k in (1, 2):
            assert solve_dp(inst.with_k(k), nice_for(inst), mode).decision == (maximum >= k)


def test_exact_decomposition_gives_same_answer():
    rng = random.Random(42)
    for _ in range(8):
        inst = random_instance(rng, rng.randint(5, 9), 0.4, 4)
        _, td = exact_treewidth_small(inst.graph)
        exact = solve_dp(inst, make_nice(td, inst.graph))
        heuristic = solve_dp(inst, nice_for(inst))
        assert exact.maximum == heuristic.maximum
        assert exact.stats["width"] <= heuristic.stats["width"]


@pytest.mark.slow
def test_dp_sweep_against_oracle():
    rng = random.Random(2024)
    for _ in range(60):
        ell = rng.randint(2, 7)
        inst = random_instance(rng, rng.randint(6, 12), 0.3, ell)
        maximum = oracle_max_packing(inst)[0]
        assert solve_dp(inst, nice_for(inst), COUNTED).maximum == maximum


@pytest.mark.slow
def test_ladder_with_sixty_vertices():
    rng = random.Random(60)
    g, _ = Graph.from_networkx(nx.grid_2d_graph(2, 30))
    for _ in range(3):
        inst = Instance(g, rng.sample(range(g.n), 8), 2, rng.randint(4, 6))
        ntd = nice_for(inst)
        assert ntd.width <= 4
        result = solve_dp(inst, ntd, COUNTED)
        if result.witness is not None:
            assert verify_packing(inst.with_k(len(result.witness)), result.witness)
