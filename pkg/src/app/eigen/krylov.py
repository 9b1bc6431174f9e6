"""Secure Krylov projection of the collected matrix.

Vectors and the projected matrix are fixed-point shares over the ring of the operator (Z_2^128 by
default, Z_2^64 in the narrow mode). The start vector is the public ``e_1``. Arnoldi orthogonalizes each
new vector against the whole basis with two rounds of classical Gram-Schmidt (each a pair of matrix
products); Lanczos uses the three-term recurrence. Both finish the last column of the projected
matrix so that ``PᵀAP`` is represented exactly.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np

from ..core.config import KrylovMethod
from ..core.exceptions.input_exceptions import InvalidParameterError
from ..core.logger import logging
from ..models.collection import SharedSparseAdjacency
from ..models.eigen import KrylovOutput, SharedOperator
from ..models.shares import ArithShare
from ..mpc.ring import RING128, Ring, encode
from ..mpc.sharing import extend, matmul_fixed, mul, mul_fixed, truncate
from ..sim.oracle import KRYLOV_NORM
from .newton import inv_sqrt, inv_sqrt_demand, scale_exponent_for

if TYPE_CHECKING:
    from ..sim.context import PartyContext

logger = logging.getLogger(__name__)

KRYLOV_TAG = "krylov"


def operator_scale(max_row_count: int, max_col_count: int, max_weight: float) -> float:
    """``sigma = 1/(w_max·sqrt(r_max·c_max))``, a public bound making ``||sigma·A||_2 <= 1``."""
    bound = max_weight * math.sqrt(max(max_row_count, 1) * max(max_col_count, 1))
    return 1.0 / bound


async def prepare_operator(
    ctx: PartyContext,
    adjacency: SharedSparseAdjacency,
    sigma: float,
    weight_fractional_bits: int = 0,
    ring: Ring = RING128,
) -> SharedOperator:
    """Bring the weight shares into ``ring`` and fold in ``sigma`` (exact, no truncation).

    Weights already in ``ring`` are used as they are; wider rings take one share extension.
    """
    weights = adjacency.weights
    if ring.bits < weights.ring.bits:
        raise InvalidParameterError(f"Cannot run the eigen stage in {ring!r} below the weight ring {weights.ring!r}")
    wide = await extend(ctx, weights, ring) if ring.bits > weights.ring.bits else weights
    factor = encode(sigma / 2.0**weight_fractional_bits, ctx.fractional_bits, ring)
    return SharedOperator(adjacency.n_nodes, adjacency.rows, adjacency.cols, wide.mul_public(factor), sigma)


async def spmv(ctx: PartyContext, operator: SharedOperator, vector: ArithShare) -> ArithShare:
    """``sigma·A*·v``: one Beaver product per stored position, accumulated per row, one truncation."""
    ring = operator.values.ring
    gathered = vector[operator.cols]
    products = await mul(ctx, operator.values, gathered, KRYLOV_TAG)
    accumulated = ring.scatter_add(operator.rows, products.value, operator.n_nodes)
    return await truncate(ctx, ArithShare(ctx.party, ring, accumulated))


def _unit_vector(ctx: PartyContext, n: int, ring: Ring) -> ArithShare:
    e1 = np.zeros(n)
    e1[0] = 1.0
    return ArithShare.public(ctx.party, ring, encode(e1, ctx.fractional_bits, ring))


async def _dot(ctx: PartyContext, x: ArithShare, y: ArithShare) -> ArithShare:
    products = await mul(ctx, x, y, KRYLOV_TAG)
    total = ArithShare(ctx.party, x.ring, x.ring.sum(products.value).reshape(1))
    return await truncate(ctx, total)


async def _normalize(ctx: PartyContext, w: ArithShare, omega: int) -> tuple[ArithShare, ArithShare]:
    """``(||w||, w/||w||)``; the norm and the new vector come out of one batched product."""
    squared = await _dot(ctx, w, w)
    ctx.observe(KRYLOV_NORM, squared.value, squared.ring)
    y = await inv_sqrt(ctx, squared, omega, scale_exponent_for(1.0), tag=KRYLOV_TAG)
    stacked = ArithShare.concat([squared, w])
    scaled = await mul_fixed(ctx, y.with_value(np.repeat(y.value, stacked.size)), stacked, KRYLOV_TAG)
    return scaled[0:1], scaled[1:]


def _column(v: ArithShare) -> ArithShare:
    return v.reshape((v.size, 1))


async def _orthogonalize(ctx: PartyContext, basis: ArithShare, w: ArithShare) -> tuple[ArithShare, ArithShare]:
    """Two passes of ``h = Pᵀw; w -= P·h``; returns the combined coefficients and the residual."""
    coefficients = None
    for _ in range(2):
        h = await matmul_fixed(ctx, basis.T, _column(w), KRYLOV_TAG)
        w = w - (await matmul_fixed(ctx, basis, h, KRYLOV_TAG)).reshape((w.size,))
        coefficients = h if coefficients is None else coefficients + h
    return coefficients.reshape((coefficients.size,)), w


def _check_dimension(n_nodes: int, m: int) -> None:
    if m < 2:
        raise InvalidParameterError(f"Krylov dimension must be at least 2, got {m}")
    if m > n_nodes:
        raise InvalidParameterError(f"Krylov dimension {m} exceeds the matrix dimension {n_nodes}")


async def secure_arnoldi(ctx: PartyContext, operator: SharedOperator, m: int, omega: int) -> KrylovOutput:
    n = operator.n_nodes
    _check_dimension(n, m)
    ring = operator.values.ring
    projected = ArithShare(ctx.party, ring, ring.zeros((m, m)))
    vectors = [_unit_vector(ctx, n, ring)]
    for k in range(m):
        basis = ArithShare.stack(vectors, axis=1)
        w = await spmv(ctx, operator, vectors[k])
        h, w = await _orthogonalize(ctx, basis, w)
        projected = projected.set_item((slice(0, k + 1), k), h)
        if k == m - 1:
            break
        norm, p_next = await _normalize(ctx, w, omega)
        projected = projected.set_item((slice(k + 1, k + 2), k), norm)
        vectors.append(p_next)
    logger.debug(f"Party {ctx.party}: Arnoldi finished with M={m} over N={n}")
    return KrylovOutput(projected, ArithShare.stack(vectors, axis=1))


async def secure_lanczos(ctx: PartyContext, operator: SharedOperator, m: int, omega: int) -> KrylovOutput:
    """Three-term recurrence; assumes the opened matrix is symmetric."""
    n = operator.n_nodes
    _check_dimension(n, m)
    ring = operator.values.ring
    projected = ArithShare(ctx.party, ring, ring.zeros((m, m)))
    vectors = [_unit_vector(ctx, n, ring)]
    beta: ArithShare | None = None
    for k in range(m):
        w = await spmv(ctx, operator, vectors[k])
        if beta is not None:
            w = w - await mul_fixed(ctx, beta.with_value(np.repeat(beta.value, n)), vectors[k - 1], KRYLOV_TAG)
        alpha = await _dot(ctx, vectors[k], w)
        projected = projected.set_item((slice(k, k + 1), k), alpha)
        if k == m - 1:
            break
        w = w - await mul_fixed(ctx, alpha.with_value(np.repeat(alpha.value, n)), vectors[k], KRYLOV_TAG)
        beta, p_next = await _normalize(ctx, w, omega)
        projected = projected.set_item((slice(k + 1, k + 2), k), beta)
        projected = projected.set_item((slice(k, k + 1), k + 1), beta)
        vectors.append(p_next)
    return KrylovOutput(projected, ArithShare.stack(vectors, axis=1))


async def secure_krylov(
    ctx: PartyContext, operator: SharedOperator, m: int, omega: int, method: KrylovMethod = KrylovMethod.ARNOLDI
) -> KrylovOutput:
    if method is KrylovMethod.LANCZOS:
        return await secure_lanczos(ctx, operator, m, omega)
    return await secure_arnoldi(ctx, operator, m, omega)


def krylov_demand(
    m: int, omega: int, method: KrylovMethod = KrylovMethod.ARNOLDI, with_extension: bool = True
) -> dict[str, int]:
    """Dealer items for one projection, including the share extension of ``prepare_operator`` when it runs."""
    extension = {"extension": 1} if with_extension else {}
    newton = inv_sqrt_demand(omega)
    # per normalization: dot (mul + trunc), inverse square root, batched scaling (mul + trunc)
    normalize = {kind: count + 2 for kind, count in newton.items()}
    if method is KrylovMethod.LANCZOS:
        # spmv, alpha dot, then the alpha and beta corrections
        products = m + m + (m - 1) + (m - 1)
        return {
            "beaver": products + (m - 1) * normalize["beaver"],
            "trunc": products + (m - 1) * normalize["trunc"],
            **extension,
        }
    # per column: spmv plus four matrix products of the two Gram-Schmidt passes
    return {
        "beaver": m + 4 * m + (m - 1) * normalize["beaver"],
        "trunc": m + 4 * m + (m - 1) * normalize["trunc"],
        **extension,
    }
