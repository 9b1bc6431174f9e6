"""Accuracy and storage figures for run reports."""

from __future__ import annotations

import numpy as np

from ..collection.binning import binning_map_plain
from ..collection.histogram import plaintext_histogram, sample_users
from ..core.config import RunConfig
from ..core.exceptions.numeric_exceptions import NonConvergenceError
from ..core.logger import logging
from ..graph.synthetic import true_degrees
from ..ldp.client import dense_view_bytes, estimate_view_bytes
from ..models.eigen import EigenResult
from ..models.graph import GraphDataset
from ..models.ldp import BinningMap
from ..reference.metrics import rmse_eigenvalues, rmse_eigenvectors
from ..reference.oracle import oracle_top_eigs
from ..reference.pipeline import plaintext_pipeline
from ..schemas.report import AccuracyRecord, StorageRecord

logger = logging.getLogger(__name__)

STORAGE_STREAM = 4


def evaluate_accuracy(graph: GraphDataset, config: RunConfig, result: EigenResult) -> AccuracyRecord:
    """Secure eigenvalues against the float64 pipeline (same ``sigma``, ``M``, ``K``, ``Omega``) and the oracle."""
    adjacency = graph.adjacency()
    k = result.top_k
    plain = plaintext_pipeline(
        adjacency, config.m, config.sweeps, result.sigma, k, result.shift, config.krylov, config.omega
    )
    record = {
        "plaintext_eigenvalues": plain.eigenvalues.tolist(),
        "rmse_secure_vs_plaintext": rmse_eigenvalues(result.eigenvalues, plain.eigenvalues, k),
        "eigenvector_rmse_secure_vs_plaintext": rmse_eigenvectors(result.eigenvectors, plain.eigenvectors, k),
    }
    try:
        truth, _ = oracle_top_eigs(adjacency, k, seed=config.seed)
    except NonConvergenceError as e:
        logger.warning(f"Oracle unavailable for this graph: {e.message}")
        return AccuracyRecord(
            oracle_eigenvalues=None,
            rmse_secure_vs_oracle=None,
            rmse_plaintext_vs_oracle=None,
            oracle_note=e.message,
            **record,
        )
    return AccuracyRecord(
        oracle_eigenvalues=np.asarray(truth).tolist(),
        rmse_secure_vs_oracle=rmse_eigenvalues(result.eigenvalues, truth, k),
        rmse_plaintext_vs_oracle=rmse_eigenvalues(plain.eigenvalues, truth, k),
        **record,
    )


def plain_binning_map(graph: GraphDataset, config: RunConfig, bins: int) -> BinningMap:
    """The map the secure binning phase releases, computed in the clear from the same sample."""
    n = graph.n_nodes
    sampled = sample_users(n, config.sample_rate, config.seed)
    histogram = plaintext_histogram(true_degrees(graph)[sampled], config.resolve_d_max(n))
    return BinningMap(binning_map_plain(histogram, bins, int(sampled.size)))


def _view_bytes(graph: GraphDataset, config: RunConfig, binning_map: BinningMap, epsilon: float) -> int:
    rng = np.random.default_rng([config.seed, STORAGE_STREAM])
    return estimate_view_bytes(true_degrees(graph), graph.n_nodes, binning_map, epsilon, config.delta, rng)


def _saving(smaller: int, larger: int | None) -> float | None:
    if not larger:
        return None
    return 1.0 - smaller / larger


def storage_record(
    graph: GraphDataset,
    config: RunConfig,
    bins: int,
    epsilon: float | None = None,
    binning_map: BinningMap | None = None,
    binned_bytes: int | None = None,
    include_dense: bool = True,
) -> StorageRecord:
    """One server's encrypted-view bytes: ``bins``-bin LDP against single-bin LDP and dense sharing.

    ``binning_map``/``binned_bytes`` come from a finished run when available; otherwise they are
    estimated from the plaintext binning walk.
    """
    epsilon = config.epsilon if epsilon is None else epsilon
    d_max = config.resolve_d_max(graph.n_nodes)
    if binning_map is None:
        binning_map = BinningMap.single_bin(d_max) if bins == 1 else plain_binning_map(graph, config, bins)
    if binned_bytes is None:
        binned_bytes = _view_bytes(graph, config, binning_map, epsilon)
    single = _view_bytes(graph, config, BinningMap.single_bin(d_max), epsilon)
    dense = dense_view_bytes(graph.n_nodes) if include_dense else None
    return StorageRecord(
        epsilon=epsilon,
        bins=bins,
        binning_map=binning_map.to_string(),
        dense_bytes=dense,
        single_bin_bytes=single,
        binned_bytes=binned_bytes,
        saving_vs_dense=_saving(binned_bytes, dense),
        saving_vs_single_bin=_saving(binned_bytes, single),
    )
