"""Assembly of the shared sparse adjacency from one server's share-file records."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray

from ..core.config import settings
from ..core.exceptions.protocol_exceptions import ProtocolError
from ..core.logger import logging
from ..models.collection import SharedSparseAdjacency
from ..models.shares import ArithShare
from ..mpc.ring import RING64

logger = logging.getLogger(__name__)

WEIGHT_RING = RING64


def _rejected_rows(rows: NDArray, cols: NDArray, n_nodes: int) -> NDArray:
    invalid = (rows >= n_nodes) | (cols >= n_nodes) | (rows == cols)
    keys = rows * np.int64(max(n_nodes, 1)) + cols
    unique, counts = np.unique(keys[~invalid], return_counts=True)
    duplicated = unique[counts > 1] // max(n_nodes, 1)
    return np.union1d(np.unique(rows[invalid]), duplicated)


def assemble_adjacency(records: NDArray, n_nodes: int, party: int) -> SharedSparseAdjacency:
    """Concatenate the uploaded rows in arrival order.

    A row listing the same column twice (or an out-of-range or diagonal position) is dropped as a
    whole; both servers see the same positions and therefore drop the same rows.
    """
    rows = np.asarray(records["i"], dtype=np.int64)
    cols = np.asarray(records["j"], dtype=np.int64)
    shares = np.asarray(records["share"], dtype=np.uint64)
    rejected = _rejected_rows(rows, cols, n_nodes)
    if rejected.size:
        logger.warning(f"Party {party} rejected {rejected.size} malformed rows (first: {rejected[:5].tolist()})")
        keep = ~np.isin(rows, rejected)
        rows, cols, shares = rows[keep], cols[keep], shares[keep]
    return SharedSparseAdjacency(n_nodes, rows, cols, ArithShare(party, WEIGHT_RING, shares))


def reconstruct_adjacency(
    first: SharedSparseAdjacency,
    second: SharedSparseAdjacency,
    weight_fractional_bits: int = settings.WEIGHT_FRACTIONAL_BITS,
) -> sp.csr_matrix:
    """Open both servers' views (tests and debugging only)."""
    if (
        first.n_nodes != second.n_nodes
        or not np.array_equal(first.rows, second.rows)
        or not np.array_equal(first.cols, second.cols)
    ):
        raise ProtocolError("The two servers assembled different position lists")
    values = WEIGHT_RING.to_signed(WEIGHT_RING.add(first.weights.value, second.weights.value)).astype(np.float64)
    values /= 2.0**weight_fractional_bits
    return sp.csr_matrix((values, (first.rows, first.cols)), shape=(first.n_nodes, first.n_nodes))
