"""
Command-line surface: solve, verify, generate, reduce, bench.

Exit codes: 0 done (a "no" decision is a result, not a failure), 1 partial
bench run or invalid packing, 2 usage / malformed input / construction
precondition, 3 resource budget exhausted, 4 cross-algorithm disagreement.
"""

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

import networkx as nx

from alpp.errors import (
    ConstructionError,
    ContractViolation,
    DisagreementError,
    MalformedInputError,
    ResourceLimitError,
)
from alpp.formats import (
    instance_digest,
    parse_extended,
    parse_instance,
    parse_mcc,
    parse_packing,
    parse_td,
    serialize_extended,
    serialize_instance,
    serialize_packing,
)
from alpp.generators import random_gnp, random_grid_subgraph, random_mcc
from alpp.graph import ALPP, KINDS, Graph, Instance, verify_packing, verify_short_packing
from alpp.matching import HARDNESS_NOTE
from alpp.reductions import (
    generate_from_hamiltonian,
    generate_from_path_partition,
    generate_mcc_extended,
    plan_mcc_to_full,
    reduce_extended_to_full,
    reduce_sapp_to_alpp,
)
from alpp.solvers import (
    ALGORITHMS,
    AUTO,
    COLORCODING,
    EXACT_TD,
    HEURISTIC_TD,
    MATCHING,
    select_algorithm,
    solve,
)
from config import Config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_DISAGREEMENT = 4

REPRO_SUFFIX = ".repro.alpp"


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    digest: str
    algorithm: str
    decision: bool
    seconds: float
    stats: dict = field(default_factory=dict)
    maximum: Optional[int] = None
    witness_path: Optional[str] = None
    seed: Optional[int] = None

    def lines(self) -> list[str]:
        out = [
            f"instance: {self.digest}",
            f"algorithm: {self.algorithm}",
            f"decision: {'yes' if self.decision else 'no'}",
        ]
        if self.maximum is not None:
            out.append(f"maximum: {self.maximum}")
        out.append(f"seconds: {self.seconds:.6f}")
        if self.seed is not None:
            out.append(f"seed: {self.seed}")
        if self.witness_path:
            out.append(f"witness: {self.witness_path}")
        out.extend(f"stat {name}: {value}" for name, value in sorted(self.stats.items()))
        return out

    def as_dict(self) -> dict:
        return asdict(self)


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def _write(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    logger.info(f"wrote {path}")


def _solver_options(args) -> dict:
    options = {
        "state_mode": args.state_mode,
        "strategy": args.strategy,
        "epsilon": args.epsilon,
        "seed": args.seed,
        "max_trials": args.max_trials,
    }
    return {k: v for k, v in options.items() if v is not None}


def cmd_solve(args) -> int:
    instance = parse_instance(_read(args.instance))
    if args.ell_override is not None:
        instance = replace(instance, ell=args.ell_override)
    if args.k_override is not None:
        instance = replace(instance, k=args.k_override)
    algo = args.algo if args.algo != AUTO else select_algorithm(instance)
    if algo == MATCHING and instance.ell > 3:
        raise UsageError(f"--algo matching needs ell <= 3, got ell={instance.ell}: {HARDNESS_NOTE}")
    options = _solver_options(args)
    if args.td not in (HEURISTIC_TD, EXACT_TD):
        options["td"] = parse_td(_read(args.td), instance)
    elif args.td == EXACT_TD:
        options["td"] = EXACT_TD

    started = time.perf_counter()
    result = solve(instance, algo, **options)
    seconds = time.perf_counter() - started

    report = RunReport(
        digest=instance_digest(instance),
        algorithm=result.algorithm or algo,
        decision=result.decision,
        seconds=seconds,
        stats=dict(result.stats),
        maximum=result.maximum,
        witness_path=args.witness,
        seed=(args.seed if args.seed is not None else Config.DEFAULT_SEED) if algo == COLORCODING else None,
    )
    if args.witness:
        _write(args.witness, serialize_packing(result.witness, result.decision, instance))
    print("\n".join(report.lines()))
    if args.json:
        print("# report-json")
        print(json.dumps(report.as_dict(), sort_keys=True))
    return EXIT_OK


def cmd_verify(args) -> int:
    instance = parse_instance(_read(args.instance))
    _, packing = parse_packing(_read(args.packing), instance)
    short = args.short or instance.is_short
    verdict = (verify_short_packing if short else verify_packing)(instance, packing)
    print(verdict)
    return EXIT_OK if verdict else EXIT_PARTIAL


def _graph_source(args) -> Graph:
    if args.graph:
        return parse_instance(_read(args.graph)).graph
    if args.cycle:
        return Graph.from_networkx(nx.cycle_graph(args.cycle))[0]
    raise UsageError("give an input graph with --graph FILE or --cycle N")


def _generate_mcc_chain(args) -> int:
    mcc = random_mcc(args.k, args.n, args.edge_p, args.seed, plant=not args.no_plant)
    clique = mcc.find_clique() if mcc.n ** mcc.k <= 100_000 else None
    summary = plan_mcc_to_full(mcc)
    x, trace = generate_mcc_extended(mcc)
    provenance = [
        f"alpp generate mcc-chain --k {args.k} --n {args.n} --edge-p {args.edge_p} --seed {args.seed}",
        f"mcc edges: {len(mcc.edges)}",
    ]
    sidecar = {"summary": summary.as_dict(), "clique": clique, "extended": trace.as_dict()}
    stage = args.stage
    text = None
    if stage in ("auto", "full"):
        try:
            full, full_trace = reduce_extended_to_full(x, args.max_weight, args.max_vertices)
            text = serialize_instance(full, provenance + ["stage: full-alpp"])
            sidecar["full"] = {"params": full_trace.params}
            stage = "full"
        except ResourceLimitError as e:
            if stage == "full":
                raise
            logger.warning(f"full-alpp stage over budget ({e}); emitting the weighted instance")
            stage = "xalpp"
    if text is None:
        text = serialize_extended(x, provenance + ["stage: xalpp"])
    sidecar["stage"] = stage
    _write(args.out, text)
    if args.out and args.out != "-":
        _write(args.out + ".trace.json", json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_generate(args) -> int:
    family = args.family
    provenance = [f"alpp generate {family} seed={args.seed}"]
    if family == "random-gnp":
        instance = random_gnp(args.n, args.p, args.a_frac, args.k, args.ell, args.seed, args.kind)
        provenance.append(f"n={args.n} p={args.p} a-frac={args.a_frac}")
    elif family == "random-grid-subgraph":
        instance = random_grid_subgraph(
            args.rows, args.cols, args.keep, args.a_frac, args.k, args.ell, args.seed, args.kind
        )
        provenance.append(f"rows={args.rows} cols={args.cols} keep={args.keep}")
    elif family == "hc":
        instance = generate_from_hamiltonian(_graph_source(args), args.alpha)
        provenance.append(f"hamiltonian cycle, alpha={args.alpha}")
    elif family == "lpp":
        instance = generate_from_path_partition(_graph_source(args), args.lam)
        provenance.append(f"path partition, lambda={args.lam}")
    elif family == "mcc-chain":
        return _generate_mcc_chain(args)
    else:
        raise UsageError(f"unknown family {family!r}")
    _write(args.out, serialize_instance(instance, provenance))
    return EXIT_OK


def cmd_reduce(args) -> int:
    source, target = args.source, args.target
    text = _read(args.input)
    comments = [f"alpp reduce --from {source} --to {target}"]
    if source == "sapp" and target == "alpp":
        instance = parse_instance(text)
        if not instance.is_short:
            raise UsageError("input must be a 'p sapp' instance")
        reduced, _ = reduce_sapp_to_alpp(instance)
        output = serialize_instance(reduced, comments)
    elif source == "hc" and target == "full-alpp":
        output = serialize_instance(
            generate_from_hamiltonian(parse_instance(text).graph, args.alpha), comments
        )
    elif source == "lpp" and target == "full-alpp":
        output = serialize_instance(
            generate_from_path_partition(parse_instance(text).graph, args.lam), comments
        )
    elif source == "mcc" and target == "xalpp":
        x, _ = generate_mcc_extended(parse_mcc(text))
        output = serialize_extended(x, comments)
    elif source == "mcc" and target == "full-alpp":
        x, _ = generate_mcc_extended(parse_mcc(text))
        full, _ = reduce_extended_to_full(x, args.max_weight, args.max_vertices)
        output = serialize_instance(full, comments)
    elif source == "xalpp" and target == "full-alpp":
        full, _ = reduce_extended_to_full(parse_extended(text), args.max_weight, args.max_vertices)
        output = serialize_instance(full, comments)
    else:
        raise UsageError(f"no reduction from {source} to {target}")
    _write(args.out, output)
    return EXIT_OK


def _applicable(instance: Instance, algo: str) -> bool:
    return algo != MATCHING or instance.ell <= 3


def _decide(instance: Instance, algo: str, options: dict) -> Optional[bool]:
    try:
        return solve(instance, algo, **options).decision
    except (ResourceLimitError, ContractViolation):
        return None


def _bench_file(path: str, algos: list[str], repetitions: int, options: dict) -> dict:
    """Solve one corpus file with every algorithm; runs in worker processes."""
    try:
        instance = parse_instance(_read(path))
    except (MalformedInputError, OSError) as e:
        return {"path": path, "error": str(e)}
    rows = []
    for algo in algos:
        if not _applicable(instance, algo):
            continue
        for repetition in range(repetitions):
            started = time.perf_counter()
            try:
                result = solve(instance, algo, **options)
            except ResourceLimitError as e:
                rows.append({"algorithm": algo, "repetition": repetition, "limit": str(e)})
                break
            rows.append(
                {
                    "algorithm": algo,
                    "repetition": repetition,
                    "decision": result.decision,
                    "maximum": result.maximum,
                    "seconds": time.perf_counter() - started,
                    "stats": dict(result.stats),
                }
            )
    return {"path": path, "digest": instance_digest(instance), "rows": rows}


def _disagrees(instance: Instance, algos: list[str], options: dict) -> bool:
    decisions = {_decide(instance, algo, options) for algo in algos if _applicable(instance, algo)}
    decisions.discard(None)
    return len(decisions) > 1


def minimize_disagreement(instance: Instance, algos: list[str], options: dict) -> Instance:
    """Greedily delete edges, then terminals, while the algorithms still disagree."""
    current = instance
    shrinking = True
    while shrinking:
        shrinking = False
        for e in current.graph.edges:
            candidate = replace(current, graph=current.graph.remove_edges([e]))
            if _disagrees(candidate, algos, options):
                current, shrinking = candidate, True
                break
        if shrinking:
            continue
        for a in current.sorted_terminals:
            candidate = replace(current, terminals=current.terminals - {a})
            if _disagrees(candidate, algos, options):
                current, shrinking = candidate, True
                break
    logger.info(f"minimized disagreement to {current.graph.m} edges, {len(current.terminals)} terminals")
    return current


def _record(uri: Optional[str], corpus: str, outcomes: list[dict]):
    from alpp.models import BenchRun, open_session

    session = open_session(uri)
    for outcome in outcomes:
        for row in outcome.get("rows", ()):
            if "decision" not in row:
                continue
            session.add(
                BenchRun(
                    corpus=corpus,
                    instance=os.path.basename(outcome["path"]),
                    digest=outcome["digest"],
                    algorithm=row["algorithm"],
                    decision=row["decision"],
                    maximum=row["maximum"],
                    seconds=row["seconds"],
                    repetition=row["repetition"],
                    stats=row["stats"],
                )
            )
    session.commit()
    session.close()


def _corpus_files(corpus: str) -> list[str]:
    files = []
    for path in sorted(Path(corpus).iterdir()):
        if path.name.endswith(REPRO_SUFFIX) or path.suffix not in (".alpp", ".sapp"):
            continue
        files.append(str(path))
    return files


def cmd_bench(args) -> int:
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    unknown = [a for a in algos if a not in ALGORITHMS]
    if unknown:
        raise UsageError(f"unknown algorithms: {', '.join(unknown)}")
    options = _solver_options(args)
    files = _corpus_files(args.corpus)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(
                pool.map(
                    _bench_file,
                    files,
                    [algos] * len(files),
                    [args.repetitions] * len(files),
                    [options] * len(files),
                )
            )
    else:
        outcomes = [_bench_file(f, algos, args.repetitions, options) for f in files]

    partial = False
    print(f"{'instance':<32} {'algorithm':<12} {'decision':<8} {'maximum':>7} {'seconds':>10}")
    for outcome in outcomes:
        name = os.path.basename(outcome["path"])
        if "error" in outcome:
            logger.warning(f"skipping {name}: {outcome['error']}")
            partial = True
            continue
        decisions = {}
        for row in outcome["rows"]:
            if "limit" in row:
                print(f"{name:<32} {row['algorithm']:<12} {'limit':<8}")
                continue
            decisions.setdefault(row["algorithm"], row["decision"])
            maximum = "-" if row["maximum"] is None else row["maximum"]
            print(
                f"{name:<32} {row['algorithm']:<12} {'yes' if row['decision'] else 'no':<8} "
                f"{maximum:>7} {row['seconds']:>10.4f}"
            )
        if len(set(decisions.values())) > 1:
            instance = parse_instance(_read(outcome["path"]))
            small = minimize_disagreement(instance, list(decisions), options)
            repro = os.path.join(os.path.dirname(outcome["path"]), Path(name).stem + REPRO_SUFFIX)
            answers = ", ".join(f"{a}={'yes' if d else 'no'}" for a, d in sorted(decisions.items()))
            _write(repro, serialize_instance(small, [f"disagreement on {name}: {answers}"]))
            raise DisagreementError(f"{name}: {answers} (reproduction in {repro})", small, decisions)

    if args.record is not None:
        _record(args.record or None, args.corpus, outcomes)
    return EXIT_PARTIAL if partial else EXIT_OK


def _add_solver_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--td", default=HEURISTIC_TD, help="heuristic, exact, or a decomposition file")
    parser.add_argument("--strategy", choices=("min-degree", "min-fill"), default=None)
    parser.add_argument("--state-mode", choices=("subset", "counted"), default=None)
    parser.add_argument("--epsilon", type=float, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--max-trials", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alpp", description="Disjoint (A, ell)-path packing toolkit")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("solve", help="decide an instance file")
    p.add_argument("instance")
    p.add_argument("--algo", choices=(AUTO,) + ALGORITHMS, default=AUTO)
    p.add_argument("--ell-override", type=int, default=None)
    p.add_argument("--k-override", type=int, default=None)
    p.add_argument("--witness", default=None, help="write the packing here")
    p.add_argument("--json", action="store_true", help="append a machine-readable report")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = commands.add_parser("verify", help="check a packing against an instance")
    p.add_argument("instance")
    p.add_argument("packing")
    p.add_argument("--short", action="store_true", help="accept path lengths 1..ell")
    p.set_defaults(func=cmd_verify)

    p = commands.add_parser("generate", help="emit a generated instance")
    p.add_argument(
        "family", choices=("random-gnp", "random-grid-subgraph", "hc", "lpp", "mcc-chain")
    )
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--p", type=float, default=0.3)
    p.add_argument("--a-frac", type=float, default=0.4)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--ell", type=int, default=3)
    p.add_argument("--kind", choices=KINDS, default=ALPP)
    p.add_argument("--rows", type=int, default=3)
    p.add_argument("--cols", type=int, default=4)
    p.add_argument("--keep", type=float, default=0.8)
    p.add_argument("--graph", default=None, help="instance file whose graph is the source")
    p.add_argument("--cycle", type=int, default=None, help="use the cycle on N vertices")
    p.add_argument("--alpha", type=int, default=2)
    p.add_argument("--lam", type=int, default=2)
    p.add_argument("--edge-p", type=float, default=0.5)
    p.add_argument("--no-plant", action="store_true")
    p.add_argument("--stage", choices=("auto", "xalpp", "full"), default="auto")
    p.add_argument("--max-weight", type=int, default=None)
    p.add_argument("--max-vertices", type=int, default=None)
    p.add_argument("--seed", type=int, default=Config.DEFAULT_SEED)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_generate)

    p = commands.add_parser("reduce", help="apply a reduction to an input file")
    p.add_argument("input")
    p.add_argument("--from", dest="source", required=True, choices=("sapp", "hc", "lpp", "mcc", "xalpp"))
    p.add_argument("--to", dest="target", required=True, choices=("alpp", "full-alpp", "xalpp"))
    p.add_argument("--alpha", type=int, default=2)
    p.add_argument("--lam", type=int, default=2)
    p.add_argument("--max-weight", type=int, default=None)
    p.add_argument("--max-vertices", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_reduce)

    p = commands.add_parser("bench", help="cross-check algorithms over a corpus directory")
    p.add_argument("corpus")
    p.add_argument("--algos", default=",".join(ALGORITHMS))
    p.add_argument("--repetitions", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--record", nargs="?", const="", default=None, metavar="URI")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = Config.LOG_LEVEL
    if args.verbose:
        level = "DEBUG" if args.verbose > 1 else "INFO"
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except DisagreementError as e:
        logger.error(f"disagreement: {e}")
        return EXIT_DISAGREEMENT
    except ResourceLimitError as e:
        logger.error(f"resource limit: {e}")
        return EXIT_RESOURCE
    except (UsageError, MalformedInputError, ConstructionError, ContractViolation, ValueError, OSError) as e:
        logger.error(str(e))
        return EXIT_USAGE
