import argparse

from ..core.exceptions.numeric_exceptions import NonConvergenceError
from ..core.logger import logging
from ..eigen.extract import check_result_convergence
from ..graph import load_graph
from ..schemas.report import (
    ConfigRecord,
    ConformanceRecord,
    EigenRecord,
    KeysRecord,
    RunReport,
    TimingRecord,
    TranscriptRecord,
)
from ..sim.accounting import account
from ..sim.evaluation import evaluate_accuracy, storage_record
from ..sim.runner import run_protocol
from .options import add_common_arguments, add_run_config_arguments, config_from_args, write_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFORMANCE = 1
EXIT_NON_CONVERGENCE = 2


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("e2e", help="collect a graph and compute its leading eigenpairs")
    parser.add_argument("--graph", required=True, help="edge-list path or synthetic:<kind>,<N>,<param>")
    parser.add_argument("--directed", action="store_true", help="read the edge list as directed arcs")
    parser.add_argument("--timings", action="store_true", help="append measured per-phase wall time to the report")
    add_common_arguments(parser)
    add_run_config_arguments(parser)
    parser.set_defaults(handler=run)


async def run(args: argparse.Namespace) -> int:
    config = config_from_args(args)
    graph = load_graph(args.graph, seed=config.seed, directed=args.directed)
    report = RunReport()
    report.add(
        ConfigRecord(
            values=config.model_dump(mode="json"),
            graph=args.graph,
            n_nodes=graph.n_nodes,
            n_arcs=graph.n_arcs,
            d_max=config.resolve_d_max(graph.n_nodes),
            compare_backend=config.resolve_backend().value,
        )
    )

    outcome = await run_protocol(config, graph, check_convergence=False)
    for transcript in outcome.transcripts:
        report.add(TranscriptRecord(transcript=transcript))
    if args.timings:
        for transcript in outcome.transcripts:
            timing = TimingRecord(phase=transcript.phase, compute_ms=transcript.compute_ms, wall_ms=transcript.wall_ms)
            report.add(timing)
    report.add(KeysRecord(count=outcome.key_count, total_bytes=outcome.key_bytes, domain_bits=outcome.domain_bits))

    result = outcome.result
    failure: NonConvergenceError | None = None
    try:
        check_result_convergence(result, config.convergence_tol)
    except NonConvergenceError as e:
        failure = e
    report.add(
        EigenRecord(
            eigenvalues=result.eigenvalues.tolist(),
            sigma=result.sigma,
            shift=result.shift,
            max_subdiagonal=result.max_subdiagonal,
            converged=failure is None,
        )
    )
    if failure is None:
        report.add(evaluate_accuracy(graph, config, result))
    report.add(
        storage_record(
            graph, config, config.bins, binning_map=outcome.binning_map, binned_bytes=outcome.share_file_bytes
        )
    )
    checks = account(outcome.transcripts, outcome.shape())
    report.add(ConformanceRecord(checks=checks, passed=all(check.passed for check in checks)))
    write_report(report, args.out)

    if failure is not None:
        logger.error(f"Non-convergent spectrum: {failure.message}")
        return EXIT_NON_CONVERGENCE
    if not report.passed:
        return EXIT_CONFORMANCE
    return EXIT_OK
