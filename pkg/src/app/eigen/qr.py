"""Secure unshifted QR iteration with Givens rotations on a Hessenberg matrix.

One sweep rotates rows ``i, i+1`` for ``i = 0..M-2`` (``H <- G_i·H``, ``S <- S·G_iᵀ``) and then applies
the same rotations to the columns (``T <- H·G_1ᵀ···G_{M-1}ᵀ``), so ``T_k = QᵀT_{k-1}Q``.

``basic`` multiplies full ``M×M`` rotation matrices. ``optimized`` touches only the two affected
rows or columns with the ``2×2`` block, whose mask is opened once for all three products.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from ..core.config import QrVariant
from ..models.eigen import QrState
from ..models.preprocessing import LAYOUT_LEFT_TRANSPOSED, LAYOUT_RIGHT
from ..models.shares import ArithShare
from ..mpc.ring import encode
from ..mpc.sharing import CorrelatedMultiplier, matmul_fixed, mul_fixed, truncate, truncate_many
from .newton import inv_sqrt, inv_sqrt_demand, scale_exponent_for

if TYPE_CHECKING:
    from ..sim.context import PartyContext

QR_TAG = "matmul"
GIVENS_TAG = "givens"


def add_diagonal_shift(ctx: PartyContext, h: ArithShare, shift: float) -> ArithShare:
    """``H + shift·I`` with a public shift (local)."""
    if shift == 0:
        return h
    return h.add_public(encode(shift * np.eye(h.shape[0]), ctx.fractional_bits, h.ring))


def _identity(ctx: PartyContext, h: ArithShare) -> ArithShare:
    return ArithShare.public(ctx.party, h.ring, encode(np.eye(h.shape[0]), ctx.fractional_bits, h.ring))


async def givens_coefficients(
    ctx: PartyContext, a: ArithShare, b: ArithShare, omega: int, scale_exponent: int = 0
) -> tuple[ArithShare, ArithShare]:
    """``c = a/sqrt(a²+b²)`` and ``s = b/sqrt(a²+b²)``."""
    pair = ArithShare.concat([a, b])
    squares = await mul_fixed(ctx, pair, pair, GIVENS_TAG)
    y = await inv_sqrt(ctx, squares[0:1] + squares[1:2], omega, scale_exponent, tag=GIVENS_TAG)
    coefficients = await mul_fixed(ctx, y.with_value(np.repeat(y.value, 2)), pair, GIVENS_TAG)
    return coefficients[0:1], coefficients[1:2]


def _rotation_block(c: ArithShare, s: ArithShare) -> ArithShare:
    """``[[c, s], [-s, c]]``."""
    return ArithShare.stack([ArithShare.concat([c, s]), ArithShare.concat([-s, c])], axis=0)


async def _rotation(ctx: PartyContext, t: ArithShare, i: int, omega: int, scale_exponent: int) -> ArithShare:
    c, s = await givens_coefficients(ctx, t[i : i + 1, i], t[i + 1 : i + 2, i], omega, scale_exponent)
    return _rotation_block(c, s)


def _givens_exponent(shift: float) -> int:
    # column norms of sigma-scaled T are at most 1 + |shift|
    return scale_exponent_for((1.0 + abs(shift)) ** 2)


async def secure_qr_basic(ctx: PartyContext, h: ArithShare, sweeps: int, omega: int, shift: float = 0.0) -> QrState:
    m = h.shape[0]
    exponent = _givens_exponent(shift)
    t, s = h, _identity(ctx, h)
    for _ in range(sweeps):
        rotations = []
        for i in range(m - 1):
            block = await _rotation(ctx, t, i, omega, exponent)
            g = _identity(ctx, h).set_item((slice(i, i + 2), slice(i, i + 2)), block)
            t = await matmul_fixed(ctx, g, t, QR_TAG)
            s = await matmul_fixed(ctx, s, g.T, QR_TAG)
            rotations.append(g)
        for g in rotations:
            t = await matmul_fixed(ctx, t, g.T, QR_TAG)
    return QrState(t, s, sweeps)


def _correlated_plan(m: int) -> list[tuple[str, tuple[int, ...]]]:
    return [(LAYOUT_LEFT_TRANSPOSED, (2, m)), (LAYOUT_RIGHT, (m, 2)), (LAYOUT_RIGHT, (m, 2))]


async def secure_qr_optimized(
    ctx: PartyContext, h: ArithShare, sweeps: int, omega: int, shift: float = 0.0
) -> QrState:
    m = h.shape[0]
    exponent = _givens_exponent(shift)
    t, s = h, _identity(ctx, h)
    for _ in range(sweeps):
        pending = []
        for i in range(m - 1):
            block = await _rotation(ctx, t, i, omega, exponent)
            # U = gᵀ: rows need g·R = Uᵀ·R, columns need C·gᵀ = C·U
            multiplier = await CorrelatedMultiplier.open(ctx, block.T, _correlated_plan(m), QR_TAG)
            rows, cols = await multiplier.mul_many(
                [(t[i : i + 2, :], LAYOUT_LEFT_TRANSPOSED), (s[:, i : i + 2], LAYOUT_RIGHT)]
            )
            rows, cols = await truncate_many(ctx, [rows, cols])
            t = t.set_item((slice(i, i + 2), slice(None)), rows)
            s = s.set_item((slice(None), slice(i, i + 2)), cols)
            pending.append((i, multiplier))
        for i, multiplier in pending:
            cols = await truncate(ctx, await multiplier.mul(t[:, i : i + 2], LAYOUT_RIGHT))
            t = t.set_item((slice(None), slice(i, i + 2)), cols)
    return QrState(t, s, sweeps)


async def secure_qr(
    ctx: PartyContext, h: ArithShare, sweeps: int, omega: int, variant: QrVariant, shift: float = 0.0
) -> QrState:
    shifted = add_diagonal_shift(ctx, h, shift)
    if variant is QrVariant.BASIC:
        return await secure_qr_basic(ctx, shifted, sweeps, omega, shift)
    return await secure_qr_optimized(ctx, shifted, sweeps, omega, shift)


def qr_demand(m: int, sweeps: int, omega: int, variant: QrVariant) -> dict[str, int]:
    rotations = sweeps * (m - 1)
    givens = {kind: count + 2 for kind, count in inv_sqrt_demand(omega).items()}
    if variant is QrVariant.BASIC:
        return {"beaver": rotations * (givens["beaver"] + 3), "trunc": rotations * (givens["trunc"] + 3)}
    return {
        "beaver": rotations * givens["beaver"],
        "trunc": rotations * (givens["trunc"] + 2),
        "correlated": rotations,
    }


def qr_matmul_elements(m: int, sweeps: int, variant: QrVariant) -> int:
    """Ring elements one party sends for the rotation products (square roots excluded)."""
    if variant is QrVariant.BASIC:
        return 6 * sweeps * (m - 1) * m * m
    return sweeps * (m - 1) * (6 * m + 4)
