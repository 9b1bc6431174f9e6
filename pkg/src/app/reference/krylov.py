"""Float64 Arnoldi and Lanczos projections with the public start vector ``e_1``."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray

from ..core.exceptions.input_exceptions import InvalidParameterError
from ..core.exceptions.numeric_exceptions import BreakdownError
from ..eigen.newton import inv_sqrt_plain, scale_exponent_for

BREAKDOWN_NORM = 1e-12

Operator = NDArray | sp.spmatrix


def _start(n: int, m: int) -> NDArray:
    if m < 2 or m > n:
        raise InvalidParameterError(f"Krylov dimension must lie in [2, {n}], got {m}")
    p = np.zeros(n)
    p[0] = 1.0
    return p


def _norm(w: NDArray, omega: int | None) -> tuple[float, float]:
    """``(||w||, 1/||w||)``, optionally with the same Newton iteration the servers run."""
    squared = float(w @ w)
    if np.sqrt(squared) < BREAKDOWN_NORM:
        raise BreakdownError(f"Krylov breakdown: residual norm {np.sqrt(squared):.3e}")
    if omega is None:
        norm = np.sqrt(squared)
        return norm, 1.0 / norm
    inverse = float(inv_sqrt_plain(squared, omega, scale_exponent_for(1.0)))
    return squared * inverse, inverse


def arnoldi(a: Operator, m: int, omega: int | None = None) -> tuple[NDArray, NDArray]:
    """Modified Gram-Schmidt Arnoldi. Returns ``(H, P)`` with ``H = PᵀAP`` (``M×M``) and ``P`` (``N×M``)."""
    n = a.shape[0]
    p = np.zeros((n, m))
    h = np.zeros((m, m))
    p[:, 0] = _start(n, m)
    for k in range(m):
        w = np.asarray(a @ p[:, k]).ravel()
        for j in range(k + 1):
            h[j, k] = p[:, j] @ w
            w = w - h[j, k] * p[:, j]
        if k == m - 1:
            break
        h[k + 1, k], inverse = _norm(w, omega)
        p[:, k + 1] = w * inverse
    return h, p


def lanczos(a: Operator, m: int, omega: int | None = None) -> tuple[NDArray, NDArray]:
    """Three-term Lanczos on a symmetric matrix; ``H`` is tridiagonal."""
    n = a.shape[0]
    p = np.zeros((n, m))
    h = np.zeros((m, m))
    p[:, 0] = _start(n, m)
    beta = 0.0
    for k in range(m):
        w = np.asarray(a @ p[:, k]).ravel()
        if k > 0:
            w = w - beta * p[:, k - 1]
        alpha = p[:, k] @ w
        h[k, k] = alpha
        if k == m - 1:
            break
        w = w - alpha * p[:, k]
        beta, inverse = _norm(w, omega)
        h[k + 1, k] = h[k, k + 1] = beta
        p[:, k + 1] = w * inverse
    return h, p
