import argparse

import numpy as np

from ..core.config import CompareBackendOption
from ..core.exceptions.protocol_exceptions import ProtocolError
from ..core.logger import logging
from ..mpc.compare import ge_const, ge_const_demand
from ..mpc.ring import Ring
from ..mpc.sharing import reconstruct_bits, share
from ..schemas.report import CompareBenchRecord, RunReport
from ..schemas.transcript import Transcript
from ..sim.dealer import Dealer
from ..sim.session import TwoPartySession
from .options import add_common_arguments, float_list, int_list, write_report

logger = logging.getLogger(__name__)

BACKENDS = (CompareBackendOption.FSS, CompareBackendOption.ASS)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("bench-compare", help="secure comparison cost against latency and bit length")
    parser.add_argument("--latency", type=float_list, default=float_list("0,1,2,5"), help="one-way delays in ms")
    parser.add_argument("--bits", type=int_list, default=int_list("16,32,64"), help="ring sizes")
    parser.add_argument("--count", type=int, default=100, help="comparisons per batch")
    parser.add_argument("--seed", type=int, default=0)
    add_common_arguments(parser)
    parser.set_defaults(handler=run)


async def measure_compare(
    backend: CompareBackendOption, bits: int, latency_ms: float, count: int, seed: int = 0
) -> Transcript:
    """Compare ``count`` shared values against one public threshold and check the opened bits."""
    ring = Ring(bits)
    rng = np.random.default_rng([seed, bits])
    bound = 1 << (bits - 1)
    values = rng.integers(0, bound, size=count, dtype=np.uint64)
    threshold = int(rng.integers(0, bound, dtype=np.uint64))
    shares = share(values, ring, rng)
    dealer = Dealer(seed, ge_const_demand(backend, bits))
    session = TwoPartySession(dealer, seed, latency_ms)

    async def program(ctx):
        return await ge_const(ctx, shares[ctx.party - 1], threshold, backend)

    first, second = await session.run_phase("compare", program)
    if not np.array_equal(reconstruct_bits(first, second), (values >= threshold).astype(np.uint8)):
        raise ProtocolError(f"{backend.value} comparison over {bits} bits disagrees with the plaintext result")
    return session.transcript("compare")


async def run(args: argparse.Namespace) -> int:
    report = RunReport()
    for bits in args.bits:
        for latency in args.latency:
            for backend in BACKENDS:
                transcript = await measure_compare(backend, bits, latency, args.count, args.seed)
                report.add(
                    CompareBenchRecord(
                        backend=backend.value,
                        bits=bits,
                        latency_ms=latency,
                        count=args.count,
                        rounds=transcript.rounds,
                        bytes=transcript.total_bytes,
                        network_ms=transcript.network_ms,
                        wall_ms=transcript.wall_ms,
                    )
                )
    write_report(report, args.out)
    return 0
