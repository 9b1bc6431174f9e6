import argparse

from . import bench_compare, bench_qr, e2e, storage

COMMANDS = (e2e, bench_qr, storage, bench_compare)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sge", description="Private eigendecomposition over decentralized graphs")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser
