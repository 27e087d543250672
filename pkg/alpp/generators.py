"""
Seeded random instance families. Same arguments and seed, same instance.
"""

import logging
import random

import networkx as nx

from alpp.errors import ConstructionError
from alpp.graph import ALPP, Graph, Instance
from alpp.reductions import McccInput

logger = logging.getLogger(__name__)


def _pick_terminals(n: int, a_frac: float, k: int, rng: random.Random) -> frozenset[int]:
    if not 0 <= a_frac <= 1:
        raise ConstructionError(f"terminal fraction must lie in [0, 1], got {a_frac}")
    count = min(n, max(2 * k, round(a_frac * n)))
    return frozenset(rng.sample(range(n), count))


def random_gnp(
    n: int, p: float, a_frac: float, k: int, ell: int, seed: int, kind: str = ALPP
) -> Instance:
    """Erdos-Renyi G(n, p) with round(a_frac * n) terminals (at least 2k)."""
    if n < 1 or not 0 <= p <= 1:
        raise ConstructionError(f"need n >= 1 and 0 <= p <= 1, got n={n}, p={p}")
    graph, _ = Graph.from_networkx(nx.gnp_random_graph(n, p, seed=seed))
    terminals = _pick_terminals(n, a_frac, k, random.Random(f"terminals:{seed}"))
    logger.debug(f"random-gnp: n={n}, m={graph.m}, |A|={len(terminals)}")
    return Instance(graph, terminals, k, ell, kind)


def random_grid_subgraph(
    rows: int,
    cols: int,
    keep: float,
    a_frac: float,
    k: int,
    ell: int,
    seed: int,
    kind: str = ALPP,
) -> Instance:
    """rows x cols grid where each edge survives with probability `keep`."""
    if rows < 1 or cols < 1 or not 0 <= keep <= 1:
        raise ConstructionError(f"need a non-empty grid and 0 <= keep <= 1, got {rows}x{cols}, {keep}")
    grid = nx.grid_2d_graph(rows, cols)
    rng = random.Random(f"edges:{seed}")
    for e in sorted(grid.edges):
        if rng.random() >= keep:
            grid.remove_edge(*e)
    graph, _ = Graph.from_networkx(grid)
    terminals = _pick_terminals(graph.n, a_frac, k, random.Random(f"terminals:{seed}"))
    logger.debug(f"random-grid-subgraph: {rows}x{cols}, m={graph.m}, |A|={len(terminals)}")
    return Instance(graph, terminals, k, ell, kind)


def random_mcc(k: int, n: int, edge_p: float, seed: int, plant: bool = True) -> McccInput:
    """k classes of n vertices with cross edges kept w.p. edge_p, optionally planting a clique."""
    if not 0 <= edge_p <= 1:
        raise ConstructionError(f"edge probability must lie in [0, 1], got {edge_p}")
    rng = random.Random(f"mcc:{seed}")
    edges = set()
    for c1 in range(1, k + 1):
        for c2 in range(c1 + 1, k + 1):
            for j1 in range(1, n + 1):
                for j2 in range(1, n + 1):
                    if rng.random() < edge_p:
                        edges.add(((c1, j1), (c2, j2)))
    if plant:
        sigma = [rng.randint(1, n) for _ in range(k)]
        for c1 in range(1, k + 1):
            for c2 in range(c1 + 1, k + 1):
                edges.add(((c1, sigma[c1 - 1]), (c2, sigma[c2 - 1])))
    return McccInput(k, n, tuple(sorted(edges)))
