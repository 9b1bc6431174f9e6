"""Secure comparison against a public threshold.

Two interchangeable backends compute ``[[1{x >= c}]]^B``:

* ``fss``: open ``x + r`` for a dealer mask ``r`` and evaluate a comparison gate locally (one round).
* ``ass``: take the sign bit of ``x - c`` with a Kogge-Stone prefix network over the bit
  decompositions of the two arithmetic shares (``1 + ceil(log2 k)`` rounds).
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import NDArray

from ..core.config import CompareBackendOption, resolve_compare_backend
from ..core.exceptions.input_exceptions import InvalidParameterError
from ..core.logger import logging
from ..fss.dcf import cmp_eval
from ..models.shares import ArithShare, BinShare
from .sharing import bin_and, flip

if TYPE_CHECKING:
    from ..sim.context import PartyContext

logger = logging.getLogger(__name__)


def prefix_levels(bits: int) -> int:
    """Kogge-Stone levels needed for the carry into the top bit of a ``bits``-bit value."""
    return math.ceil(math.log2(bits - 1))


def _bit_matrix(values: NDArray, bits: int) -> NDArray:
    """Little-endian bit decomposition, shape ``values.shape + (bits,)``."""
    shifts = np.arange(bits, dtype=np.uint64)
    return ((np.asarray(values, dtype=np.uint64)[..., None] >> shifts) & np.uint64(1)).astype(np.uint8)


async def msb_extract(ctx: PartyContext, x: ArithShare, tag: str = "ppa") -> BinShare:
    """Binary share of the most significant bit of ``x`` over ``Z_2^k``.

    Party 1's share ``a`` and party 2's share ``b`` are added bitwise: generate ``g = a & b`` costs
    one AND round, propagate ``p = a ^ b`` is already XOR-shared. The prefix network yields the carry
    into bit ``k - 1`` and ``msb = p_{k-1} ^ carry``.
    """
    ring = x.ring
    if ring.wide:
        raise InvalidParameterError(f"msb_extract supports rings up to 64 bits, got {ring!r}")
    k = ring.bits
    own = _bit_matrix(x.value, k)
    zeros = np.zeros_like(own)
    a_bits = BinShare(ctx.party, own if ctx.is_leader else zeros)
    b_bits = BinShare(ctx.party, zeros if ctx.is_leader else own)

    g = (await bin_and(ctx, a_bits, b_bits, tag)).bits
    p = own.copy()

    span = k - 1
    G, P = g[..., :span].copy(), p[..., :span].copy()
    distance = 1
    while distance < span:
        last = distance * 2 >= span
        width = span - distance
        lhs = [P[..., distance:]]
        rhs = [G[..., :width]]
        if not last:
            lhs.append(P[..., distance:])
            rhs.append(P[..., :width])
        stacked = await bin_and(
            ctx,
            BinShare(ctx.party, np.concatenate(lhs, axis=-1)),
            BinShare(ctx.party, np.concatenate(rhs, axis=-1)),
            tag,
        )
        G_next = G.copy()
        G_next[..., distance:] ^= stacked.bits[..., :width]
        if not last:
            P_next = P.copy()
            P_next[..., distance:] = stacked.bits[..., width:]
            P = P_next
        G = G_next
        distance *= 2

    carry = G[..., span - 1] if span > 0 else np.zeros(x.shape, dtype=np.uint8)
    return BinShare(ctx.party, np.bitwise_xor(p[..., k - 1], carry))


async def _ge_fss(ctx: PartyContext, x: ArithShare, threshold: int, tag: str) -> BinShare:
    ring = x.ring
    gate = ctx.dealer.comparison(ring.bits, threshold, max(x.size, 1))
    flat = np.ravel(x.value)
    masked_own = ring.add(flat, gate.mask_share)
    masked = ring.add(masked_own, await ctx.exchange_ring(tag, ring, masked_own))
    less = cmp_eval(gate, masked).reshape(x.shape)
    return flip(BinShare(ctx.party, less))


async def _ge_ass(ctx: PartyContext, x: ArithShare, threshold: int, tag: str) -> BinShare:
    difference = x.add_public(x.ring.neg(x.ring.reduce(threshold)))
    return flip(await msb_extract(ctx, difference, tag))


async def ge_const(
    ctx: PartyContext,
    x: ArithShare,
    threshold: int,
    backend: CompareBackendOption = CompareBackendOption.AUTO,
    tag: str = "cmp",
) -> BinShare:
    """``[[1{x >= threshold}]]^B`` for ``x`` and ``threshold`` in ``[0, 2^{l-1})``."""
    bound = 1 << (x.ring.bits - 1)
    if not 0 <= threshold < bound:
        raise InvalidParameterError(f"Comparison threshold {threshold} outside [0, 2^{x.ring.bits - 1})")
    if resolve_compare_backend(backend, ctx.latency_ms) is CompareBackendOption.FSS:
        return await _ge_fss(ctx, x, threshold, tag)
    return await _ge_ass(ctx, x, threshold, tag)


def ge_const_demand(backend: CompareBackendOption, bits: int) -> dict[str, int]:
    """Dealer items one ``ge_const`` call consumes."""
    if backend is CompareBackendOption.FSS:
        return {"cmp": 1}
    return {"bin": 1 + prefix_levels(bits)}
