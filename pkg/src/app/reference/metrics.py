from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core.exceptions.input_exceptions import InvalidParameterError


def _leading(values: ArrayLike, k: int, what: str) -> NDArray:
    array = np.asarray(values, dtype=np.float64)
    if array.shape[-1] < k:
        raise InvalidParameterError(f"{what} holds {array.shape[-1]} entries, fewer than k={k}")
    return array[..., :k]


def rmse_eigenvalues(estimate: ArrayLike, truth: ArrayLike, k: int) -> float:
    """RMSE over the leading ``k`` eigenvalues (both sorted by descending magnitude)."""
    diff = _leading(estimate, k, "estimate") - _leading(truth, k, "ground truth")
    return float(np.sqrt(np.mean(diff**2)))


def align_signs(estimate: NDArray, truth: NDArray) -> NDArray:
    """Flip each estimated column to the sign closest to the matching ground-truth column."""
    flipped = estimate.copy()
    for j in range(estimate.shape[1]):
        if np.linalg.norm(estimate[:, j] + truth[:, j]) < np.linalg.norm(estimate[:, j] - truth[:, j]):
            flipped[:, j] = -estimate[:, j]
    return flipped


def _unit_columns(vectors: NDArray) -> NDArray:
    norms = np.linalg.norm(vectors, axis=0)
    return vectors / np.where(norms > 0, norms, 1.0)


def rmse_eigenvectors(estimate: ArrayLike, truth: ArrayLike, k: int) -> float:
    """RMSE over all entries of the leading ``k`` unit eigenvectors, after sign alignment."""
    est = _unit_columns(_leading(estimate, k, "estimate"))
    ref = _unit_columns(_leading(truth, k, "ground truth"))
    if est.shape != ref.shape:
        raise InvalidParameterError(f"Eigenvector shapes differ: {est.shape} vs {ref.shape}")
    return float(np.sqrt(np.mean((align_signs(est, ref) - ref) ** 2)))


def relative_gap(value: float, reference: float) -> float:
    """``|value - reference| / |reference|`` (absolute difference when the reference is zero)."""
    if reference == 0:
        return abs(value)
    return abs(value - reference) / abs(reference)


def eigen_residuals(matrix: NDArray, eigenvalues: ArrayLike, eigenvectors: ArrayLike) -> NDArray:
    """``||A v - lambda v|| / ||v||`` per pair."""
    vectors = np.asarray(eigenvectors, dtype=np.float64)
    values = np.asarray(eigenvalues, dtype=np.float64)
    residual = np.asarray(matrix @ vectors) - vectors * values[None, :]
    return np.linalg.norm(residual, axis=0) / np.linalg.norm(vectors, axis=0)
