"""Inverse square root by Newton iteration on shares.

``y_{n+1} = y_n·(3 - x·y_n²)/2`` converges to ``1/sqrt(x)`` from ``y_0`` whenever
``0 < y_0 < sqrt(3/x)``. Callers that know a public upper bound on ``x`` can move it towards the
fast-converging range by a power of four (``scale_exponent``), which is undone exactly by a power of two.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core.config import settings
from ..models.shares import ArithShare
from ..mpc.ring import encode
from ..mpc.sharing import mul, mul_fixed, truncate
from ..sim.oracle import INV_SQRT_INPUT

if TYPE_CHECKING:
    from ..sim.context import PartyContext

NEWTON_INPUT_CEILING = 8.0


def scale_exponent_for(upper_bound: float) -> int:
    """Largest ``j >= 0`` with ``4^j · upper_bound <= 8``."""
    if upper_bound <= 0:
        return 0
    return max(0, math.floor(math.log(NEWTON_INPUT_CEILING / upper_bound, 4)))


async def inv_sqrt(
    ctx: PartyContext,
    x: ArithShare,
    omega: int,
    scale_exponent: int = 0,
    initial: float = settings.NEWTON_INITIAL_GUESS,
    tag: str = "mul",
) -> ArithShare:
    """Shares of ``1/sqrt(x)`` after ``omega`` iterations (three products each)."""
    ctx.observe(INV_SQRT_INPUT, x.value, x.ring)
    ring, t = x.ring, ctx.fractional_bits
    if scale_exponent:
        x = x.mul_public(4**scale_exponent)
    y = ArithShare.public(ctx.party, ring, encode(np.full(x.shape, initial), t, ring))
    three = encode(3.0, t, ring)
    for _ in range(omega):
        y_squared = await mul_fixed(ctx, y, y, tag)
        x_y_squared = await mul_fixed(ctx, x, y_squared, tag)
        y = await truncate(ctx, await mul(ctx, y, (-x_y_squared).add_public(three), tag), t + 1)
    if scale_exponent:
        y = y.mul_public(2**scale_exponent)
    return y


def inv_sqrt_demand(omega: int) -> dict[str, int]:
    return {"beaver": 3 * omega, "trunc": 3 * omega}


def inv_sqrt_plain(
    x: ArrayLike, omega: int, scale_exponent: int = 0, initial: float = settings.NEWTON_INITIAL_GUESS
) -> NDArray:
    """The same iteration in float64."""
    scaled = np.asarray(x, dtype=np.float64) * 4.0**scale_exponent
    y = np.full(scaled.shape, initial, dtype=np.float64)
    for _ in range(omega):
        y = 0.5 * y * (3.0 - scaled * y * y)
    return y * 2.0**scale_exponent
