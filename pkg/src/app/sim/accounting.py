"""Conformance of measured transcripts against closed-form communication counts.

Matrix-product traffic and the other ring-element counts below are exact functions of the public
shape of a run, so they are compared for equality. Scaling behaviour that only holds asymptotically
is checked through :func:`slope_exponent` over a series of doubling sizes.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from ..collection.assembly import WEIGHT_RING
from ..collection.histogram import VALIDITY_TAG
from ..core.config import CompareBackendOption, KrylovMethod, QrVariant
from ..core.exceptions.input_exceptions import InvalidParameterError
from ..core.logger import logging
from ..eigen.krylov import KRYLOV_TAG
from ..eigen.qr import QR_TAG, qr_matmul_elements
from ..mpc.compare import prefix_levels
from ..mpc.ring import RING32
from ..schemas.report import ConformanceCheck
from ..schemas.transcript import Transcript

logger = logging.getLogger(__name__)

SLOPE_TOLERANCE = 0.15


@dataclass(frozen=True)
class ProtocolShape:
    """Public parameters of one run that determine its communication."""

    n_nodes: int
    nnz: int
    d_max: int
    m: int
    sweeps: int
    omega: int
    backend: CompareBackendOption
    variant: QrVariant
    method: KrylovMethod
    sampled_users: int = 0
    ring_bits: int = 128


def binning_rounds(d_max: int, backend: CompareBackendOption) -> int:
    """One comparison plus the two rounds of the accumulator reset, per degree."""
    compare = 1 if backend is CompareBackendOption.FSS else 1 + prefix_levels(RING32.bits)
    return d_max * (compare + 2)


def krylov_elements(n: int, nnz: int, m: int, omega: int, method: KrylovMethod) -> int:
    """Ring elements one party sends under the Krylov tag (truncations excluded)."""
    spmv = m * 2 * nnz
    newton = 6 * omega
    if method is KrylovMethod.LANCZOS:
        corrections = 2 * (m - 1) * 2 * n
        alphas = m * 2 * n
        normalize = (m - 1) * (2 * n + newton + 2 * (n + 1))
        return spmv + corrections + alphas + normalize
    gram_schmidt = sum(2 * (2 * b * n + n + b) for b in range(1, m + 1))
    normalize = (m - 1) * (2 * n + newton + 2 * (n + 1))
    return spmv + gram_schmidt + normalize


def validity_bytes(sampled_users: int) -> int:
    """Both servers send one packed bit per sampled user."""
    return 2 * math.ceil(sampled_users / 8)


def extraction_elements(n: int, m: int) -> int:
    return n * m + m * m


def _check(phase: str, quantity: str, expected: float, measured: float) -> ConformanceCheck:
    check = ConformanceCheck(
        phase=phase, quantity=quantity, expected=expected, measured=measured, exact=True, passed=expected == measured
    )
    if not check.passed:
        logger.warning(f"Conformance failure in '{phase}': {quantity} expected {expected}, measured {measured}")
    return check


def _by_phase(transcripts: Sequence[Transcript]) -> dict[str, Transcript]:
    return {transcript.phase: transcript for transcript in transcripts}


def account(transcripts: Sequence[Transcript], shape: ProtocolShape) -> list[ConformanceCheck]:
    """Exact checks for every phase present in ``transcripts``."""
    phases = _by_phase(transcripts)
    checks: list[ConformanceCheck] = []
    if "histogram" in phases:
        histogram = phases["histogram"]
        checks.append(_check("histogram", "bytes", validity_bytes(shape.sampled_users), histogram.total_bytes))
        checks.append(_check("histogram", "rounds", 1, histogram.rounds))
        measured = histogram.tag(VALIDITY_TAG).elements()
        checks.append(_check("histogram", f"{VALIDITY_TAG} elements", shape.sampled_users, measured))
    if "binning" in phases:
        binning = phases["binning"]
        checks.append(_check("binning", "rounds", binning_rounds(shape.d_max, shape.backend), binning.rounds))
        checks.append(_check("binning", "mux elements", 3 * shape.d_max, binning.tag("mux").elements()))
        if shape.backend is CompareBackendOption.FSS:
            checks.append(_check("binning", "cmp elements", shape.d_max, binning.tag("cmp").elements()))
    if "assembly" in phases:
        checks.append(_check("assembly", "bytes", 0, phases["assembly"].total_bytes))
    if "krylov" in phases:
        krylov = phases["krylov"]
        extended = shape.nnz if shape.ring_bits > WEIGHT_RING.bits else 0
        checks.append(_check("krylov", "extend elements", extended, krylov.tag("extend").elements()))
        expected = krylov_elements(shape.n_nodes, shape.nnz, shape.m, shape.omega, shape.method)
        checks.append(_check("krylov", f"{KRYLOV_TAG} elements", expected, krylov.tag(KRYLOV_TAG).elements()))
        measured = krylov.tag(KRYLOV_TAG).bytes_p1_to_p2
        checks.append(_check("krylov", f"{KRYLOV_TAG} bytes", expected * shape.ring_bits // 8, measured))
    if "qr" in phases:
        expected = qr_matmul_elements(shape.m, shape.sweeps, shape.variant)
        checks.append(_check("qr", f"{QR_TAG} elements", expected, phases["qr"].tag(QR_TAG).elements()))
    if "extraction" in phases:
        measured = phases["extraction"].tag("matmul").elements()
        checks.append(_check("extraction", "matmul elements", extraction_elements(shape.n_nodes, shape.m), measured))
    return checks


def slope_exponent(sizes: ArrayLike, values: ArrayLike) -> float:
    """Least-squares slope of ``log(value)`` against ``log(size)``."""
    x = np.asarray(sizes, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    if x.size < 2 or x.size != y.size:
        raise InvalidParameterError("A slope needs at least two (size, value) pairs of equal length")
    if np.any(x <= 0) or np.any(y <= 0):
        raise InvalidParameterError("Sizes and values must be positive for a log-log slope")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)


def check_slope(
    phase: str,
    quantity: str,
    sizes: ArrayLike,
    values: ArrayLike,
    expected: float,
    tolerance: float = SLOPE_TOLERANCE,
) -> ConformanceCheck:
    """Pass when the measured exponent lies within ``tolerance`` (relative) of ``expected``."""
    measured = slope_exponent(sizes, values)
    passed = abs(measured - expected) <= tolerance * abs(expected)
    if not passed:
        logger.warning(f"Scaling of {quantity} in '{phase}' has exponent {measured:.3f}, expected {expected:g}")
    return ConformanceCheck(
        phase=phase, quantity=quantity, expected=expected, measured=measured, exact=False, passed=passed
    )
