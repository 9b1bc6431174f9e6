import argparse

import numpy as np

from ..core.config import EIGEN_RING_BITS, QrVariant, RunConfig, eigen_fractional_bits
from ..core.logger import logging
from ..eigen.qr import QR_TAG, qr_demand, qr_matmul_elements, secure_qr
from ..mpc.ring import Ring, encode
from ..mpc.sharing import share
from ..reference.qr import random_hessenberg
from ..schemas.report import QrBenchRecord, RunReport
from ..schemas.transcript import Transcript
from ..sim.dealer import Dealer
from ..sim.session import TwoPartySession
from .options import add_common_arguments, int_list, write_report

logger = logging.getLogger(__name__)

DEFAULT_SIZES = "2,5,15"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("bench-qr", help="traffic of basic against optimized secure QR")
    parser.add_argument("--m", type=int_list, default=int_list(DEFAULT_SIZES), help="comma-separated dimensions")
    parser.add_argument("--k", type=int, default=1, help="QR sweeps per run")
    parser.add_argument("--omega", type=int, default=RunConfig.model_fields["omega"].default)
    parser.add_argument(
        "--ring-bits",
        type=int_list,
        default=list(EIGEN_RING_BITS),
        help="comma-separated share widths of the eigen stage",
    )
    parser.add_argument("--seed", type=int, default=0)
    add_common_arguments(parser)
    parser.set_defaults(handler=run)


async def measure_qr(
    h: np.ndarray, sweeps: int, omega: int, variant: QrVariant, seed: int = 0, ring_bits: int = 128
) -> Transcript:
    """Run one secure QR on shares of ``h`` over Z_2^``ring_bits`` and return its transcript."""
    m = h.shape[0]
    ring = Ring(ring_bits)
    dealer = Dealer(seed, qr_demand(m, sweeps, omega, variant))
    session = TwoPartySession(dealer, seed, fractional_bits=eigen_fractional_bits(ring_bits))
    shares = share(encode(h, session.fractional_bits, ring), ring, np.random.default_rng([seed, m]))

    async def program(ctx):
        return await secure_qr(ctx, shares[ctx.party - 1], sweeps, omega, variant)

    await session.run_phase("qr", program)
    return session.transcript("qr")


def _saving(basic: int, optimized: int) -> float:
    return 1.0 - optimized / basic if basic else 0.0


def _tag_bytes(transcript: Transcript) -> int:
    traffic = transcript.tag(QR_TAG)
    return traffic.bytes_p1_to_p2 + traffic.bytes_p2_to_p1


async def run(args: argparse.Namespace) -> int:
    report = RunReport()
    rng = np.random.default_rng(args.seed)
    for m in args.m:
        h = random_hessenberg(m, rng)
        for ring_bits in args.ring_bits:
            basic = await measure_qr(h, args.k, args.omega, QrVariant.BASIC, args.seed, ring_bits)
            optimized = await measure_qr(h, args.k, args.omega, QrVariant.OPTIMIZED, args.seed, ring_bits)
            record = QrBenchRecord(
                m=m,
                sweeps=args.k,
                ring_bits=ring_bits,
                basic_elements=basic.tag(QR_TAG).elements(),
                optimized_elements=optimized.tag(QR_TAG).elements(),
                basic_bytes=_tag_bytes(basic),
                optimized_bytes=_tag_bytes(optimized),
                saving=_saving(basic.tag(QR_TAG).elements(), optimized.tag(QR_TAG).elements()),
                formula_saving=_saving(
                    qr_matmul_elements(m, args.k, QrVariant.BASIC), qr_matmul_elements(m, args.k, QrVariant.OPTIMIZED)
                ),
            )
            logger.info(f"M={m}, Z_2^{ring_bits}: optimized QR saves {100 * record.saving:.1f}% of rotation traffic")
            report.add(record)
    write_report(report, args.out)
    return 0
