from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..eigen.newton import inv_sqrt_plain, scale_exponent_for


def _givens(a: float, b: float, omega: int | None, scale_exponent: int) -> tuple[float, float]:
    squared = a * a + b * b
    if omega is None:
        if squared == 0.0:
            return 1.0, 0.0
        r = np.sqrt(squared)
        return a / r, b / r
    inverse = float(inv_sqrt_plain(squared, omega, scale_exponent))
    return a * inverse, b * inverse


def qr_givens(
    h: ArrayLike, sweeps: int, omega: int | None = None, shift: float = 0.0
) -> tuple[NDArray, NDArray]:
    """Unshifted QR iteration by Givens rotations on an upper Hessenberg matrix.

    Returns ``(T_K, S)`` with ``T_K = SᵀHS`` (``shift`` is added to the diagonal first and left in
    ``T_K``). With ``omega`` set, rotation coefficients use the Newton inverse square root.
    """
    t = np.array(h, dtype=np.float64) + shift * np.eye(np.shape(h)[0])
    m = t.shape[0]
    s = np.eye(m)
    exponent = scale_exponent_for((1.0 + abs(shift)) ** 2)
    for _ in range(sweeps):
        rotations = []
        for i in range(m - 1):
            c, sn = _givens(t[i, i], t[i + 1, i], omega, exponent)
            g = np.array([[c, sn], [-sn, c]])
            t[i : i + 2, :] = g @ t[i : i + 2, :]
            s[:, i : i + 2] = s[:, i : i + 2] @ g.T
            rotations.append(g)
        for i, g in enumerate(rotations):
            t[:, i : i + 2] = t[:, i : i + 2] @ g.T
    return t, s


def random_hessenberg(m: int, rng: np.random.Generator, norm: float = 0.9) -> NDArray:
    """Random upper Hessenberg matrix with spectral norm ``norm``."""
    h = np.triu(rng.standard_normal((m, m)), k=-1)
    return h * (norm / np.linalg.norm(h, 2))
