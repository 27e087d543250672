import pytest

from alpp.errors import ConstructionError
from alpp.formats import instance_digest
from alpp.generators import random_gnp, random_grid_subgraph, random_mcc
from alpp.graph import SAPP


def test_gnp_is_reproducible():
    a = random_gnp(12, 0.3, 0.5, 2, 3, seed=4)
    b = random_gnp(12, 0.3, 0.5, 2, 3, seed=4)
    c = random_gnp(12, 0.3, 0.5, 2, 3, seed=5)
    assert instance_digest(a) == instance_digest(b)
    assert instance_digest(a) != instance_digest(c)


@pytest.mark.parametrize(
    "n, a_frac, k, expected",
    [(10, 0.5, 1, 5), (10, 0.1, 2, 4), (3, 0.2, 5, 3), (10, 0.0, 1, 2)],
)
def test_terminal_count(n, a_frac, k, expected):
    inst = random_gnp(n, 0.5, a_frac, k, 2, seed=0)
    assert len(inst.terminals) == expected


def test_gnp_kind_and_parameters():
    inst = random_gnp(8, 1.0, 0.5, 2, 3, seed=1, kind=SAPP)
    assert inst.is_short
    assert inst.graph.m == 8 * 7 // 2
    assert inst.k == 2 and inst.ell == 3


@pytest.mark.parametrize("n, p, a_frac", [(0, 0.5, 0.5), (5, 1.5, 0.5), (5, 0.5, 2.0)])
def test_gnp_rejects_bad_parameters(n, p, a_frac):
    with pytest.raises(ConstructionError):
        random_gnp(n, p, a_frac, 1, 2, seed=0)


def test_grid_subgraph_bounds():
    full = random_grid_subgraph(3, 4, 1.0, 0.3, 1, 3, seed=2)
    assert full.n == 12
    assert full.graph.m == 3 * 3 + 4 * 2
    none = random_grid_subgraph(3, 4, 0.0, 0.3, 1, 3, seed=2)
    assert none.graph.m == 0
    some = random_grid_subgraph(3, 4, 0.5, 0.3, 1, 3, seed=2)
    assert set(some.graph.edges) <= set(full.graph.edges)
    assert some == random_grid_subgraph(3, 4, 0.5, 0.3, 1, 3, seed=2)


def test_grid_rejects_bad_parameters():
    with pytest.raises(ConstructionError):
        random_grid_subgraph(0, 4, 0.5, 0.3, 1, 3, seed=0)
    with pytest.raises(ConstructionError):
        random_grid_subgraph(2, 2, 1.5, 0.3, 1, 3, seed=0)


def test_planted_mcc_has_a_clique():
    for seed in range(5):
        mcc = random_mcc(3, 4, 0.2, seed)
        assert mcc.find_clique() is not None
        assert mcc == random_mcc(3, 4, 0.2, seed)


def test_unplanted_sparse_mcc():
    mcc = random_mcc(3, 4, 0.0, seed=1, plant=False)
    assert mcc.edges == ()
    assert mcc.find_clique() is None
    dense = random_mcc(2, 3, 1.0, seed=1, plant=False)
    assert len(dense.edges) == 9


def test_mcc_rejects_bad_probability():
    with pytest.raises(ConstructionError):
        random_mcc(2, 3, -0.1, seed=0)
