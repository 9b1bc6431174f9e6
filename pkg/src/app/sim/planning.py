"""Dry-run counting of dealer material.

Each protocol module declares what it consumes as a closed-form demand. The runner provisions the
dealer in two groups: collection before the degree histogram exists and eigendecomposition once the
collected matrix is known.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Mapping

from ..collection.assembly import WEIGHT_RING
from ..collection.binning import binning_demand
from ..core.config import CompareBackendOption, KrylovMethod, QrVariant, RunConfig
from ..eigen.extract import extraction_demand
from ..eigen.krylov import krylov_demand
from ..eigen.qr import qr_demand


def merge_demands(*demands: Mapping[str, int]) -> dict[str, int]:
    total: Counter[str] = Counter()
    for demand in demands:
        total.update(demand)
    return dict(sorted(total.items()))


def plan_collection(d_max: int, backend: CompareBackendOption) -> dict[str, int]:
    return merge_demands(binning_demand(d_max, backend))


def plan_eigen(
    m: int, sweeps: int, omega: int, method: KrylovMethod, variant: QrVariant, ring_bits: int = 128
) -> dict[str, int]:
    krylov = krylov_demand(m, omega, method, with_extension=ring_bits > WEIGHT_RING.bits)
    return merge_demands(krylov, qr_demand(m, sweeps, omega, variant), extraction_demand())


def plan_preprocessing(config: RunConfig, n_nodes: int) -> dict[str, int]:
    """Every dealer item a full run with ``config`` consumes on a graph of ``n_nodes``."""
    return merge_demands(
        plan_collection(config.resolve_d_max(n_nodes), config.resolve_backend()),
        plan_eigen(config.m, config.sweeps, config.omega, config.krylov, config.qr_variant, config.ring_bits),
    )
