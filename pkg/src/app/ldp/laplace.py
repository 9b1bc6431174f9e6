"""Truncated discrete Laplace mechanism used by every user for their dummy-edge count."""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..models.ldp import LapParams


def lap_mu(epsilon: float, delta: float, sensitivity: int) -> float:
    """See :attr:`LapParams.mu`."""
    return LapParams(epsilon, delta, sensitivity).mu


def noise_center(params: LapParams) -> int:
    return math.ceil(params.mu)


def sample_discrete_laplace(
    params: LapParams, rng: np.random.Generator, size: int | tuple[int, ...] | None = None
) -> int | NDArray:
    """Draw from ``Pr[x] ∝ e^{-eps·|x - m|/Delta}`` with ``m = ceil(mu)``.

    The draw is ``m + G1 - G2`` for two independent geometric variables with success probability
    ``1 - e^{-eps/Delta}``; their difference has exactly the two-sided geometric pmf.
    """
    center = noise_center(params)
    if params.sensitivity == 0:
        return center if size is None else np.full(size, center, dtype=np.int64)
    p = -math.expm1(-params.epsilon / params.sensitivity)
    count = 1 if size is None else size
    draws = (rng.geometric(p, size=count) - rng.geometric(p, size=count)).astype(np.int64) + center
    return int(draws[0]) if size is None else draws


def discrete_laplace_pmf(values: ArrayLike, params: LapParams) -> NDArray:
    """Analytic pmf of :func:`sample_discrete_laplace`.

    The normaliser ``(e^{eps/Delta} - 1)/(e^{eps/Delta} + 1)`` is exact because the centre is an integer.
    """
    x = np.asarray(values, dtype=np.float64)
    center = noise_center(params)
    if params.sensitivity == 0:
        return (x == center).astype(np.float64)
    q = params.decay
    return (1.0 - q) / (1.0 + q) * np.power(q, np.abs(x - center))


def truncation_probability(params: LapParams) -> float:
    """``Pr[noise < 0]`` for the sampler above."""
    if params.sensitivity == 0:
        return 0.0
    q = params.decay
    return float(q ** (noise_center(params) + 1) / (1.0 + q))


def truncation_bound(params: LapParams) -> float:
    """Per-user budget ``1 - (1 - delta)^{1/Delta}`` that the mean is chosen against."""
    if params.sensitivity == 0:
        return 0.0
    return float(-math.expm1(math.log1p(-params.delta) / params.sensitivity))
