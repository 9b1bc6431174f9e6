import argparse

from ..core.logger import logging
from ..graph import load_graph
from ..schemas.report import RunReport
from ..sim.evaluation import storage_record
from .options import (
    add_common_arguments,
    add_run_config_arguments,
    config_from_args,
    float_list,
    int_list,
    write_report,
)

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("storage", help="encrypted local-view size: dense, single-bin and binned")
    parser.add_argument("--graph", required=True, help="edge-list path or synthetic:<kind>,<N>,<param>")
    parser.add_argument("--directed", action="store_true")
    parser.add_argument("--bins", dest="bin_counts", type=int_list, default=None, help="comma-separated bin counts")
    parser.add_argument("--epsilon", dest="epsilons", type=float_list, default=None, help="comma-separated budgets")
    parser.add_argument("--dense", action="store_true", help="include the dense-sharing baseline")
    add_common_arguments(parser)
    add_run_config_arguments(parser, skip=("--bins", "--epsilon"))
    parser.set_defaults(handler=run)


async def run(args: argparse.Namespace) -> int:
    config = config_from_args(args)
    graph = load_graph(args.graph, seed=config.seed, directed=args.directed)
    report = RunReport()
    for epsilon in args.epsilons or [config.epsilon]:
        for bins in args.bin_counts or [1, config.bins]:
            record = storage_record(graph, config, bins, epsilon=epsilon, include_dense=args.dense)
            logger.info(f"epsilon={epsilon:g}, B={bins}: {record.binned_bytes} bytes per server")
            report.add(record)
    write_report(report, args.out)
    return 0
