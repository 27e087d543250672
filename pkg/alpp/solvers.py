"""
One entry point for every algorithm, exact-length (alpp) or short (sapp).
"""

import logging
from typing import Optional, Union

from alpp.color_coding import solve_color_coding
from alpp.decomposition import (
    MIN_DEGREE,
    TreeDecomposition,
    exact_treewidth_small,
    heuristic_tree_decomposition,
    make_nice,
)
from alpp.dp import SUBSET, solve_dp
from alpp.errors import ContractViolation
from alpp.graph import Instance, PathPacking, SolveResult, verify_short_packing
from alpp.matching import solve_small_ell
from alpp.oracle import OracleBudget, oracle_max_packing, oracle_max_short_packing
from alpp.reductions import pull_back_alpp_packing, reduce_sapp_to_alpp

logger = logging.getLogger(__name__)

AUTO = "auto"
ORACLE = "oracle"
MATCHING = "matching"
DP = "dp"
COLORCODING = "colorcoding"
ALGORITHMS = (ORACLE, MATCHING, DP, COLORCODING)

HEURISTIC_TD = "heuristic"
EXACT_TD = "exact"


def select_algorithm(instance: Instance) -> str:
    """Matching whenever ell <= 3, otherwise the tree-decomposition DP."""
    return MATCHING if instance.ell <= 3 else DP


def acquire_decomposition(
    instance: Instance,
    td: Union[str, TreeDecomposition] = HEURISTIC_TD,
    strategy: str = MIN_DEGREE,
) -> TreeDecomposition:
    if isinstance(td, TreeDecomposition):
        td.validate(instance.graph)
        return td
    if td == EXACT_TD:
        return exact_treewidth_small(instance.graph)[1]
    if td == HEURISTIC_TD:
        return heuristic_tree_decomposition(instance.graph, strategy)
    raise ValueError(f"unknown decomposition source {td!r}")


def _oracle(instance: Instance, budget: Optional[OracleBudget]) -> SolveResult:
    solve = oracle_max_short_packing if instance.is_short else oracle_max_packing
    maximum, packing = solve(instance, budget)
    decision = maximum >= instance.k
    witness = PathPacking(packing.paths[: instance.k]) if decision else None
    return SolveResult(decision, witness, {"vertices": instance.n}, maximum, ORACLE)


def _solve_alpp(instance: Instance, algo: str, **options) -> SolveResult:
    if algo == ORACLE:
        return _oracle(instance, options.get("budget"))
    if algo == MATCHING:
        return solve_small_ell(instance)
    if algo == DP:
        td = acquire_decomposition(
            instance, options.get("td", HEURISTIC_TD), options.get("strategy", MIN_DEGREE)
        )
        ntd = make_nice(td, instance.graph)
        return solve_dp(instance, ntd, options.get("state_mode", SUBSET))
    if algo == COLORCODING:
        return solve_color_coding(
            instance, options.get("epsilon"), options.get("seed"), options.get("max_trials")
        )
    raise ValueError(f"unknown algorithm {algo!r}")


def solve_sapp(instance: Instance, algo: str, **options) -> SolveResult:
    """Short paths through the detour reduction; the oracle answers them directly."""
    if algo == ORACLE:
        return _oracle(instance, options.get("budget"))
    reduced, trace = reduce_sapp_to_alpp(instance)
    result = _solve_alpp(reduced, algo, **options)
    witness = None
    if result.witness is not None:
        witness = pull_back_alpp_packing(trace, result.witness)
        verdict = verify_short_packing(instance, witness)
        if not verdict:
            raise ContractViolation(f"pulled-back packing is {verdict}")
    stats = dict(result.stats, reduced_vertices=reduced.n, reduced_edges=reduced.graph.m)
    return SolveResult(result.decision, witness, stats, result.maximum, result.algorithm)


def solve(instance: Instance, algo: str = AUTO, **options) -> SolveResult:
    if algo == AUTO:
        algo = select_algorithm(instance)
        logger.info(f"auto-selected {algo} for ell={instance.ell}")
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}")
    if instance.is_short:
        result = solve_sapp(instance, algo, **options)
    else:
        result = _solve_alpp(instance, algo, **options)
    logger.info(f"{algo}: decision {'yes' if result.decision else 'no'}")
    return result
