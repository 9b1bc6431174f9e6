from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .shares import ArithShare


@dataclass(frozen=True)
class SharedOperator:
    """``sigma·A*`` as fixed-point shares over the eigen ring, with the public positions of ``A*``."""

    n_nodes: int
    rows: NDArray
    cols: NDArray
    values: ArithShare
    sigma: float


@dataclass(frozen=True)
class KrylovOutput:
    """Projected matrix (``M×M``) and basis (``N×M``) shares of one server."""

    projected: ArithShare
    basis: ArithShare

    @property
    def dimension(self) -> int:
        return self.projected.shape[0]


@dataclass(frozen=True)
class QrState:
    """``T_K`` and the accumulated rotations ``S`` after ``sweeps`` QR iterations."""

    t: ArithShare
    s: ArithShare
    sweeps: int


@dataclass(frozen=True)
class EigenResult:
    """Top-k eigenpairs of the original (unscaled) matrix, as reconstructed by the analyst."""

    eigenvalues: NDArray
    eigenvectors: NDArray
    sigma: float
    shift: float
    diagonal: NDArray
    subdiagonal: NDArray

    @property
    def top_k(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def max_subdiagonal(self) -> float:
        return float(np.max(np.abs(self.subdiagonal))) if self.subdiagonal.size else 0.0
