from __future__ import annotations

import scipy.sparse as sp
from numpy.typing import NDArray

from ..core.config import KrylovMethod
from ..eigen.extract import read_eigenpairs
from ..models.eigen import EigenResult
from .krylov import arnoldi, lanczos
from .qr import qr_givens


def plaintext_pipeline(
    matrix: NDArray | sp.spmatrix,
    m: int,
    sweeps: int,
    sigma: float,
    top_k: int,
    shift: float = 0.0,
    method: KrylovMethod = KrylovMethod.ARNOLDI,
    omega: int | None = None,
) -> EigenResult:
    """Float64 run of the secure sequence: scale, project, QR, read out."""
    scaled = matrix * sigma
    project = lanczos if method is KrylovMethod.LANCZOS else arnoldi
    h, p = project(scaled, m, omega)
    t_k, s = qr_givens(h, sweeps, omega, shift)
    return read_eigenpairs(t_k, p @ s, top_k, sigma, shift)
