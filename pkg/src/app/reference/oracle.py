"""Ground-truth eigensolvers.

Symmetric matrices go through cyclic Jacobi; non-symmetric ones through power iteration with
Hotelling deflation (right and left vectors), which is only valid for real, separated leading
eigenvalues. Large sparse graphs use subspace iteration with a Rayleigh-Ritz step.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from numpy.typing import ArrayLike, NDArray

from ..core.exceptions.input_exceptions import InvalidParameterError
from ..core.exceptions.numeric_exceptions import NonConvergenceError

DENSE_ORACLE_LIMIT = 64
JACOBI_TOLERANCE = 1e-12


def _order_by_magnitude(values: NDArray) -> NDArray:
    return np.array(sorted(range(values.size), key=lambda index: (-abs(values[index]), index)), dtype=np.int64)


def jacobi_eigh(
    matrix: ArrayLike, tolerance: float = JACOBI_TOLERANCE, max_sweeps: int = 100
) -> tuple[NDArray, NDArray]:
    """Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below ``tolerance``.

    Returns eigenvalues sorted by descending magnitude and matching unit eigenvectors (columns).
    """
    a = np.array(matrix, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    scale = max(float(np.linalg.norm(a)), 1.0)
    for _ in range(max_sweeps):
        off = np.sqrt(max(float(np.sum(a * a) - np.sum(np.diag(a) ** 2)), 0.0))
        if off <= tolerance * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rotation = np.array([[c, s], [-s, c]])
                a[[p, q], :] = rotation.T @ a[[p, q], :]
                a[:, [p, q]] = a[:, [p, q]] @ rotation
                v[:, [p, q]] = v[:, [p, q]] @ rotation
    else:
        raise NonConvergenceError(f"Jacobi did not reach off-diagonal norm {tolerance:g} in {max_sweeps} sweeps")
    values = np.diag(a).copy()
    order = _order_by_magnitude(values)
    return values[order], v[:, order]


def _power(matrix: NDArray, rng: np.random.Generator, tolerance: float, max_iter: int) -> tuple[float, NDArray]:
    x = rng.standard_normal(matrix.shape[0])
    x /= np.linalg.norm(x)
    value = 0.0
    for _ in range(max_iter):
        y = matrix @ x
        value = float(x @ y)
        residual = np.linalg.norm(y - value * x)
        if residual <= tolerance * max(abs(value), 1e-300):
            return value, x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0, x
        x = y / norm
    raise NonConvergenceError("Power iteration did not converge (complex or clustered leading eigenvalues)")


def power_deflation(
    matrix: ArrayLike, k: int, tolerance: float = 1e-10, max_iter: int = 200_000, seed: int = 0
) -> tuple[NDArray, NDArray]:
    """Leading ``k`` eigenpairs of a non-symmetric matrix with a real, separated leading spectrum."""
    a = np.array(matrix, dtype=np.float64)
    rng = np.random.default_rng(seed)
    values, vectors = [], []
    for _ in range(k):
        value, right = _power(a, rng, tolerance, max_iter)
        _, left = _power(a.T, rng, tolerance, max_iter)
        overlap = float(left @ right)
        if abs(overlap) < 1e-12:
            raise NonConvergenceError("Left and right eigenvectors are orthogonal; deflation is ill-posed")
        values.append(value)
        vectors.append(right)
        a = a - value * np.outer(right, left) / overlap
    return np.asarray(values), np.column_stack(vectors)


def is_symmetric(matrix: NDArray | sp.spmatrix) -> bool:
    if sp.issparse(matrix):
        return abs(matrix - matrix.T).max() <= 1e-12 if matrix.nnz else True
    return bool(np.allclose(matrix, np.asarray(matrix).T, rtol=0.0, atol=1e-12))


def oracle_eig(matrix: ArrayLike, k: int | None = None) -> tuple[NDArray, NDArray]:
    """Eigenpairs of a dense matrix of dimension at most 64, sorted by descending ``|lambda|``."""
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidParameterError(f"Expected a square matrix, got shape {a.shape}")
    if a.shape[0] > DENSE_ORACLE_LIMIT:
        raise InvalidParameterError(f"Dense oracle limited to {DENSE_ORACLE_LIMIT} rows, got {a.shape[0]}")
    k = a.shape[0] if k is None else k
    if is_symmetric(a):
        values, vectors = jacobi_eigh(a)
        return values[:k], vectors[:, :k]
    return power_deflation(a, k)


def oracle_top_eigs(
    matrix: NDArray | sp.spmatrix,
    k: int,
    oversample: int = 10,
    iterations: int = 500,
    tolerance: float = 1e-10,
    seed: int = 0,
) -> tuple[NDArray, NDArray]:
    """Top-``k`` eigenpairs of a large matrix by subspace iteration plus Rayleigh-Ritz."""
    n = matrix.shape[0]
    if n <= DENSE_ORACLE_LIMIT:
        dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix)
        return oracle_eig(dense, k)
    symmetric = is_symmetric(matrix)
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n, min(n, k + oversample))))
    previous: NDArray | None = None
    for _ in range(iterations):
        q, _ = np.linalg.qr(np.asarray(matrix @ q))
        ritz = q.T @ np.asarray(matrix @ q)
        if symmetric:
            values, small = jacobi_eigh((ritz + ritz.T) / 2.0)
            values, small = values[:k], small[:, :k]
        else:
            values, small = power_deflation(ritz, k, seed=seed)
        if previous is not None and np.max(np.abs(values - previous)) <= tolerance * max(np.abs(values).max(), 1.0):
            break
        previous = values
    vectors = q @ small
    return values, vectors / np.linalg.norm(vectors, axis=0)
