"""Two-party additive and binary secret sharing.

Interactive operations run inside a :class:`~src.app.sim.context.PartyContext`: each call takes its
offline material from the dealer feed and exchanges exactly one message per party per round.
Party 1 applies the public correction terms.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core.config import TruncationMode
from ..core.exceptions.protocol_exceptions import DimensionMismatchError, ProtocolError
from ..models.preprocessing import LAYOUT_LEFT, LAYOUT_LEFT_TRANSPOSED, LAYOUT_RIGHT, CorrelatedBatch
from ..models.shares import ArithShare, BinShare
from .ring import RING128, Ring

if TYPE_CHECKING:
    from ..sim.context import PartyContext


def share(secret: ArrayLike, ring: Ring, rng: np.random.Generator) -> tuple[ArithShare, ArithShare]:
    value = ring.reduce(secret)
    first = ring.random(rng, np.shape(value))
    return ArithShare(1, ring, first), ArithShare(2, ring, ring.sub(value, first))


def reconstruct(first: ArithShare, second: ArithShare) -> NDArray:
    if {first.party, second.party} != {1, 2} or first.ring != second.ring:
        raise ProtocolError("Reconstruction needs one share from each party over the same ring")
    return first.ring.add(first.value, second.value)


def share_bits(bits: ArrayLike, rng: np.random.Generator) -> tuple[BinShare, BinShare]:
    secret = np.asarray(bits, dtype=np.uint8) & 1
    first = rng.integers(0, 2, size=secret.shape, dtype=np.uint8)
    return BinShare(1, first), BinShare(2, np.bitwise_xor(secret, first))


def reconstruct_bits(first: BinShare, second: BinShare) -> NDArray:
    return np.bitwise_xor(first.bits, second.bits)


def _own(ctx: PartyContext, *shares: ArithShare | BinShare) -> None:
    for s in shares:
        if s.party != ctx.party:
            raise ProtocolError(f"Party {ctx.party} cannot operate on a share held by party {s.party}")


def _flat(ring: Ring, parts: list[NDArray]) -> NDArray:
    return np.concatenate([np.ravel(np.asarray(part, dtype=ring.dtype)) for part in parts])


def _unflat(values: NDArray, shapes: list[tuple[int, ...]]) -> list[NDArray]:
    out, offset = [], 0
    for shape in shapes:
        size = int(np.prod(shape, dtype=np.int64))
        out.append(values[offset : offset + size].reshape(shape))
        offset += size
    return out


async def reveal(ctx: PartyContext, x: ArithShare, tag: str = "reveal") -> NDArray:
    """Open ``x`` to both parties (one round)."""
    _own(ctx, x)
    peer = await ctx.exchange_ring(tag, x.ring, x.value)
    return x.ring.add(x.value, peer)


async def reveal_bits(ctx: PartyContext, x: BinShare, tag: str = "reveal") -> NDArray:
    _own(ctx, x)
    return np.bitwise_xor(x.bits, await ctx.exchange_bits(tag, x.bits))


async def _open_pair(
    ctx: PartyContext, ring: Ring, d_own: NDArray, e_own: NDArray, tag: str
) -> tuple[NDArray, NDArray]:
    peer = await ctx.exchange_ring(tag, ring, _flat(ring, [d_own, e_own]))
    peer_d, peer_e = _unflat(peer, [np.shape(d_own), np.shape(e_own)])
    return ring.add(d_own, peer_d), ring.add(e_own, peer_e)


async def mul(ctx: PartyContext, x: ArithShare, y: ArithShare, tag: str = "mul") -> ArithShare:
    """Elementwise Beaver product (numpy broadcasting between ``x`` and ``y``); exact in the ring."""
    _own(ctx, x, y)
    if x.ring != y.ring:
        raise ProtocolError(f"Operands live in different rings ({x.ring!r}, {y.ring!r})")
    ring = x.ring
    triple = ctx.dealer.beaver("mul", ring, x.shape, y.shape)
    triple.check("mul", x, y)
    triple.consume()
    d, e = await _open_pair(ctx, ring, ring.sub(x.value, triple.a.value), ring.sub(y.value, triple.b.value), tag)
    z = ring.add(triple.c.value, ring.add(ring.mul(d, triple.b.value), ring.mul(e, triple.a.value)))
    if ctx.is_leader:
        z = ring.add(z, ring.mul(d, e))
    return ArithShare(ctx.party, ring, z)


async def matmul(ctx: PartyContext, x: ArithShare, y: ArithShare, tag: str = "matmul") -> ArithShare:
    """Vectorized Beaver matrix product: one round, ``x.size + y.size`` elements per direction."""
    _own(ctx, x, y)
    if len(x.shape) != 2 or len(y.shape) != 2 or x.shape[1] != y.shape[0]:
        raise DimensionMismatchError(f"Cannot multiply {x.shape} by {y.shape}")
    ring = x.ring
    triple = ctx.dealer.beaver("matmul", ring, x.shape, y.shape)
    triple.check("matmul", x, y)
    triple.consume()
    d, e = await _open_pair(ctx, ring, ring.sub(x.value, triple.a.value), ring.sub(y.value, triple.b.value), tag)
    z = ring.add(triple.c.value, ring.add(ring.matmul(d, triple.b.value), ring.matmul(triple.a.value, e)))
    if ctx.is_leader:
        z = ring.add(z, ring.matmul(d, e))
    return ArithShare(ctx.party, ring, z)


def _truncate_local(z: ArithShare, shift: int) -> ArithShare:
    ring = z.ring
    if z.party == 1:
        return z.with_value(ring.shift_right(z.value, shift))
    return z.with_value(ring.neg(ring.shift_right(ring.neg(z.value), shift)))


async def truncate(ctx: PartyContext, z: ArithShare, shift: int | None = None, tag: str = "trunc") -> ArithShare:
    """Divide a shared value by ``2^shift`` (floor, off by at most one unit).

    Dealer mode masks ``z`` with a truncation pair plus a public bias, so the opened value never
    wraps and the error is deterministic; it needs ``|z| < 2^{l-3}``. Local mode has each party
    shift its own share and fails with small probability.
    """
    return (await truncate_many(ctx, [z], shift, tag))[0]


async def truncate_many(
    ctx: PartyContext, shares: list[ArithShare], shift: int | None = None, tag: str = "trunc"
) -> list[ArithShare]:
    """Truncate several shares with a single pair and a single round."""
    _own(ctx, *shares)
    shift = ctx.fractional_bits if shift is None else shift
    if ctx.truncation is TruncationMode.LOCAL:
        return [_truncate_local(z, shift) for z in shares]
    ring = shares[0].ring
    flat = _flat(ring, [z.value for z in shares])
    pair = ctx.dealer.truncation(ring, flat.shape, shift)
    pair.consume()
    bias = 1 << (ring.bits - 3)
    masked = ring.add(flat, pair.r.value)
    if ctx.is_leader:
        masked = ring.add(masked, ring.reduce(bias))
    opened = ring.add(masked, await ctx.exchange_ring(tag, ring, masked))
    if ctx.is_leader:
        value = ring.sub(ring.sub(ring.shift_right(opened, shift), ring.reduce(bias >> shift)), pair.r_shifted.value)
    else:
        value = ring.neg(pair.r_shifted.value)
    return [ArithShare(ctx.party, ring, part) for part in _unflat(value, [z.shape for z in shares])]


async def mul_fixed(ctx: PartyContext, x: ArithShare, y: ArithShare, tag: str = "mul") -> ArithShare:
    return await truncate(ctx, await mul(ctx, x, y, tag))


async def matmul_fixed(ctx: PartyContext, x: ArithShare, y: ArithShare, tag: str = "matmul") -> ArithShare:
    return await truncate(ctx, await matmul(ctx, x, y, tag))


async def extend(ctx: PartyContext, x: ArithShare, target: Ring = RING128, tag: str = "extend") -> ArithShare:
    """Re-share a signed value from a narrow ring in a wider one (one round, one element per entry).

    The opened ``x + r + 2^{l-2}`` cannot wrap for ``|x| < 2^{l-2}`` and ``r < 2^{l-1}``.
    """
    _own(ctx, x)
    source = x.ring
    if target.bits <= source.bits:
        raise ProtocolError(f"Cannot extend {source!r} into {target!r}")
    mask = ctx.dealer.extension(source, target, x.shape)
    mask.consume()
    bias = 1 << (source.bits - 2)
    own = source.add(x.value, mask.r_source.value)
    if ctx.is_leader:
        own = source.add(own, source.reduce(bias))
    opened = source.add(own, await ctx.exchange_ring(tag, source, own))
    if ctx.is_leader:
        wide = target.convert(opened, source, signed=False)
        value = target.sub(target.sub(wide, target.reduce(bias)), mask.r_target.value)
    else:
        value = target.neg(mask.r_target.value)
    return ArithShare(ctx.party, target, value)


class CorrelatedMultiplier:
    """Products that all reuse one operand ``U``.

    ``U - X`` is opened once when the multiplier is created; each later product opens only
    ``V - Y``. Layouts: ``left`` computes ``U·V``, ``left_t`` computes ``Uᵀ·V`` and ``right``
    computes ``V·U``.
    """

    def __init__(self, ctx: PartyContext, batch: CorrelatedBatch, opened: NDArray, ring: Ring, tag: str) -> None:
        self._ctx = ctx
        self._batch = batch
        self._d = opened
        self._ring = ring
        self.tag = tag

    @classmethod
    async def open(
        cls, ctx: PartyContext, u: ArithShare, plan: list[tuple[str, tuple[int, ...]]], tag: str = "matmul"
    ) -> CorrelatedMultiplier:
        _own(ctx, u)
        ring = u.ring
        batch = ctx.dealer.correlated(ring, u.shape, plan)
        batch.consume()
        if batch.x.shape != u.shape:
            raise DimensionMismatchError(f"Correlated mask of shape {batch.x.shape} cannot hide {u.shape}")
        d_own = ring.sub(u.value, batch.x.value)
        opened = ring.add(d_own, await ctx.exchange_ring(tag, ring, d_own))
        return cls(ctx, batch, opened, ring, tag)

    @property
    def remaining(self) -> int:
        return self._batch.remaining

    async def mul(self, v: ArithShare, layout: str = LAYOUT_LEFT) -> ArithShare:
        return (await self.mul_many([(v, layout)]))[0]

    async def mul_many(self, operands: list[tuple[ArithShare, str]]) -> list[ArithShare]:
        """Products for several operands, all ``V - Y`` opened in one message."""
        ctx, ring = self._ctx, self._ring
        _own(ctx, *(v for v, _ in operands))
        masks = [self._batch.take(layout, v.shape) for v, layout in operands]
        e_own = [ring.sub(v.value, y.value) for (v, _), (y, _) in zip(operands, masks)]
        peer = await ctx.exchange_ring(self.tag, ring, _flat(ring, e_own))
        peer_parts = _unflat(peer, [np.shape(e) for e in e_own])
        x, d = self._batch.x.value, self._d
        results = []
        for (_, layout), (y, z), own, other in zip(operands, masks, e_own, peer_parts):
            e = ring.add(own, other)
            if layout == LAYOUT_LEFT:
                terms = [ring.matmul(d, y.value), ring.matmul(x, e)]
                public = ring.matmul(d, e)
            elif layout == LAYOUT_LEFT_TRANSPOSED:
                terms = [ring.matmul(d.T, y.value), ring.matmul(x.T, e)]
                public = ring.matmul(d.T, e)
            elif layout == LAYOUT_RIGHT:
                terms = [ring.matmul(e, x), ring.matmul(y.value, d)]
                public = ring.matmul(e, d)
            else:
                raise ProtocolError(f"Unknown correlated layout '{layout}'")
            value = ring.add(z.value, ring.add(terms[0], terms[1]))
            if ctx.is_leader:
                value = ring.add(value, public)
            results.append(ArithShare(ctx.party, ring, value))
        return results


async def mul_correlated(
    ctx: PartyContext, u: ArithShare, vs: list[ArithShare], layout: str = LAYOUT_LEFT, tag: str = "matmul"
) -> list[ArithShare]:
    """``[U·V_1, ..., U·V_k]`` with ``U`` masked and opened once."""
    multiplier = await CorrelatedMultiplier.open(ctx, u, [(layout, v.shape) for v in vs], tag)
    return await multiplier.mul_many([(v, layout) for v in vs])


def bin_xor(x: BinShare, y: BinShare) -> BinShare:
    return x ^ y


def flip(b: BinShare) -> BinShare:
    """Local NOT: party 1 flips its share."""
    return b.xor_public(np.ones(b.shape, dtype=np.uint8))


async def bin_and(ctx: PartyContext, x: BinShare, y: BinShare, tag: str = "and") -> BinShare:
    _own(ctx, x, y)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"AND of shapes {x.shape} and {y.shape}")
    triple = ctx.dealer.binary(x.shape)
    if triple.a.shape != x.shape:
        raise DimensionMismatchError(f"Binary triple of shape {triple.a.shape} used for {x.shape}")
    triple.consume()
    d_own = np.bitwise_xor(x.bits, triple.a.bits)
    e_own = np.bitwise_xor(y.bits, triple.b.bits)
    peer = await ctx.exchange_bits(tag, np.concatenate([d_own.ravel(), e_own.ravel()]))
    size = d_own.size
    d = np.bitwise_xor(d_own, peer[:size].reshape(x.shape))
    e = np.bitwise_xor(e_own, peer[size:].reshape(x.shape))
    z = triple.c.bits ^ (d & triple.b.bits) ^ (e & triple.a.bits)
    if ctx.is_leader:
        z = z ^ (d & e)
    return BinShare(ctx.party, z)


async def mul_bin_arith(ctx: PartyContext, b: BinShare, x: ArithShare, tag: str = "mux") -> ArithShare:
    """Arithmetic share of ``b·x`` for a binary-shared bit ``b`` (two rounds).

    For each arithmetic share ``x_p`` its holder acts as sender with messages
    ``m_β = (β ⊕ b_p)·x_p − r`` and the peer picks ``m_{b_q}`` through a dealer-provided random OT.
    Both directions run at once.
    """
    _own(ctx, b, x)
    if b.shape != x.shape:
        raise DimensionMismatchError(f"Bit shape {b.shape} does not match operand shape {x.shape}")
    ring = x.ring
    ot = ctx.dealer.ot(ring, x.shape)
    ot.consume()
    own_bits = np.asarray(b.bits, dtype=np.uint8)

    # receiver: announce own bit masked by the random choice
    e_peer = (await ctx.exchange_bits(tag, np.bitwise_xor(own_bits, ot.recv_choice))).astype(bool)

    # sender
    r = ring.random(ctx.rng, x.shape)
    m0 = ring.sub(ring.mul(x.value, ring.reduce(own_bits.astype(np.int64))), r)
    m1 = ring.sub(ring.mul(x.value, ring.reduce((1 - own_bits).astype(np.int64))), r)
    y0 = ring.add(m0, np.where(e_peer, ot.send_rho1, ot.send_rho0))
    y1 = ring.add(m1, np.where(e_peer, ot.send_rho0, ot.send_rho1))
    peer = await ctx.exchange_ring(tag, ring, _flat(ring, [y0, y1]))
    peer_y0, peer_y1 = _unflat(peer, [x.shape, x.shape])
    chosen = ring.sub(np.where(own_bits.astype(bool), peer_y1, peer_y0), ot.recv_rho)
    return ArithShare(ctx.party, ring, ring.add(r, chosen))
