"""Equal-population degree bins from the shared histogram.

The servers walk the degrees in order, accumulating ``D_i``. Whenever the running count reaches
``sizeB = floor(S / B)`` a boundary bit is set and the accumulator is reset through a
binary-times-arithmetic product with the negated bit. Only the boundary bits are released (to users).
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core.config import CompareBackendOption
from ..core.exceptions.input_exceptions import InvalidParameterError
from ..models.collection import SharedHistogram
from ..models.ldp import BinningMap
from ..models.shares import ArithShare, BinShare
from ..mpc.compare import ge_const, ge_const_demand
from ..mpc.ring import RING32
from ..mpc.sharing import flip, mul_bin_arith, reconstruct_bits

if TYPE_CHECKING:
    from ..sim.context import PartyContext


def bin_size(sample_size: int, bins: int) -> int:
    if bins < 1:
        raise InvalidParameterError(f"Bin count must be positive, got {bins}")
    return max(1, sample_size // bins)


async def generate_binning_map(
    ctx: PartyContext,
    histogram: SharedHistogram,
    bins: int,
    backend: CompareBackendOption = CompareBackendOption.AUTO,
) -> BinShare:
    """Shared boundary bits ``Inter[1..d_max]``."""
    threshold = bin_size(histogram.sample_size, bins)
    counts = histogram.counts
    accumulator = ArithShare.public(ctx.party, RING32, np.zeros(1, dtype=np.uint64))
    boundaries = []
    for degree in range(histogram.d_max):
        accumulator = accumulator + counts[degree : degree + 1]
        boundary = await ge_const(ctx, accumulator, threshold, backend)
        boundaries.append(boundary.bits)
        accumulator = await mul_bin_arith(ctx, flip(boundary), accumulator)
    return BinShare(ctx.party, np.concatenate(boundaries))


def open_binning_map(first: BinShare, second: BinShare) -> BinningMap:
    """What a user computes from the two servers' released shares."""
    return BinningMap(reconstruct_bits(first, second))


def binning_map_plain(histogram: ArrayLike, bins: int, sample_size: int) -> NDArray:
    """The same boundary walk on a plaintext histogram."""
    threshold = bin_size(sample_size, bins)
    counts = np.asarray(histogram, dtype=np.int64)
    bits = np.zeros(counts.size, dtype=np.uint8)
    accumulator = 0
    for index, count in enumerate(counts.tolist()):
        accumulator += count
        if accumulator >= threshold:
            bits[index] = 1
            accumulator = 0
    return bits


def binning_demand(d_max: int, backend: CompareBackendOption) -> dict[str, int]:
    """Dealer items consumed by :func:`generate_binning_map` with a resolved backend."""
    demand = {kind: count * d_max for kind, count in ge_const_demand(backend, RING32.bits).items()}
    demand["ot"] = d_max
    return demand
