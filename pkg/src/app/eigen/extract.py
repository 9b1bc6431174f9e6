"""Release of ``T_K`` and ``V = P·S`` to the analyst and the analyst-side read-out."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import NDArray

from ..core.exceptions.numeric_exceptions import NonConvergenceError
from ..models.eigen import EigenResult, QrState
from ..models.shares import ArithShare
from ..mpc.sharing import matmul_fixed
from ..sim.analyst import Analyst

if TYPE_CHECKING:
    from ..sim.context import PartyContext


EIGENVALUES = "t_k"
EIGENVECTORS = "v"


async def release_eigenpairs(ctx: PartyContext, qr: QrState, basis: ArithShare, analyst: Analyst) -> None:
    """Compute ``V = P·S`` and hand ``T_K`` and ``V`` to the analyst."""
    vectors = await matmul_fixed(ctx, basis, qr.s)
    analyst.deliver(EIGENVALUES, qr.t)
    analyst.deliver(EIGENVECTORS, vectors)


def extraction_demand() -> dict[str, int]:
    return {"beaver": 1, "trunc": 1}


def leading_indices(diagonal: NDArray, top_k: int) -> list[int]:
    """Positions of the ``top_k`` largest ``|diagonal|`` entries, ties broken by position."""
    m = diagonal.size
    return sorted(range(m), key=lambda index: (-abs(diagonal[index]), index))[: min(top_k, m)]


def read_eigenpairs(
    t_k: NDArray, vectors: NDArray, top_k: int, sigma: float, shift: float = 0.0
) -> EigenResult:
    """Diagonal of ``T_K`` minus the shift, divided by ``sigma``, ordered by ``|lambda|`` (ties by index)."""
    diagonal = np.diag(t_k).astype(np.float64) - shift
    order = leading_indices(diagonal, top_k)
    chosen = vectors[:, order].astype(np.float64)
    norms = np.linalg.norm(chosen, axis=0)
    chosen = chosen / np.where(norms > 0, norms, 1.0)
    return EigenResult(
        eigenvalues=diagonal[order] / sigma,
        eigenvectors=chosen,
        sigma=sigma,
        shift=shift,
        diagonal=diagonal,
        subdiagonal=np.diag(t_k, k=-1).astype(np.float64),
    )


def extract_eigenpairs(
    analyst: Analyst, top_k: int, sigma: float, fractional_bits: int, shift: float = 0.0
) -> EigenResult:
    t_k = analyst.reconstruct_fixed(EIGENVALUES, fractional_bits)
    vectors = analyst.reconstruct_fixed(EIGENVECTORS, fractional_bits)
    return read_eigenpairs(t_k, vectors, top_k, sigma, shift)


def _bordering(diagonal: NDArray, top_k: int) -> list[int]:
    """Subdiagonal positions adjacent to the chosen diagonal entries."""
    last = diagonal.size - 1
    positions = set()
    for index in leading_indices(diagonal, top_k):
        positions.update(p for p in (index - 1, index) if 0 <= p < last)
    return sorted(positions)


def _raise_if_unconverged(diagonal: NDArray, subdiagonal: NDArray, top_k: int, tolerance: float) -> None:
    positions = _bordering(diagonal, top_k)
    if not positions:
        return
    values = np.abs(subdiagonal[positions])
    if values.max() > tolerance:
        worst = positions[int(np.argmax(values))]
        raise NonConvergenceError(
            f"QR did not converge: |T[{worst + 1},{worst}]| = {abs(subdiagonal[worst]):.3e} > {tolerance:g}; "
            "the leading spectrum may hold complex or clustered eigenvalues"
        )


def check_convergence(t_k: NDArray, top_k: int, tolerance: float, shift: float = 0.0) -> None:
    """Raise when a subdiagonal entry next to one of the ``top_k`` read-out positions exceeds ``tolerance``.

    Values are in the scaled units the servers computed in.
    """
    diagonal = np.diag(t_k).astype(np.float64) - shift
    _raise_if_unconverged(diagonal, np.diag(t_k, k=-1), top_k, tolerance)


def check_result_convergence(result: EigenResult, tolerance: float) -> None:
    _raise_if_unconverged(result.diagonal, result.subdiagonal, result.top_k, tolerance)
