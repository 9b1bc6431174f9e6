"""User-side encryption of a local view.

A user with degree ``d`` looks up the bin containing ``d``, draws a non-negative number of dummy
edges from the truncated discrete Laplace mechanism calibrated to the bin width, and additively
shares every weight (true or dummy) between the two servers.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core.config import settings
from ..core.exceptions.input_exceptions import BinResolutionError, InvalidParameterError
from ..core.logger import logging
from ..models.ldp import BinningMap, LapParams, LocalView
from ..mpc.ring import RING64
from ..mpc.sharing import share
from .laplace import sample_discrete_laplace
from .share_file import share_file_size

logger = logging.getLogger(__name__)


def resolve_bin(binning_map: BinningMap, degree: int) -> tuple[int, int, int]:
    """Return ``(L, U, Delta = U - L)`` for the bin holding ``degree``."""
    if not 1 <= degree <= binning_map.d_max:
        raise BinResolutionError(f"Degree {degree} outside [1, {binning_map.d_max}]")
    for lower, upper in binning_map.intervals:
        if lower <= degree <= upper:
            return lower, upper, upper - lower
    raise BinResolutionError(f"No bin covers degree {degree}")


def bin_degree(degree: int, d_max: int) -> int:
    """Degree used for bin lookup: isolated users join the first bin, heavy ones the last."""
    return min(max(degree, 1), d_max)


def draw_dummy_count(
    degree: int, n_nodes: int, binning_map: BinningMap, epsilon: float, delta: float, rng: np.random.Generator
) -> tuple[int, bool]:
    """Number of dummies ``max(noise, 0)``, capped by the empty slots of the row; flags capping."""
    _, _, width = resolve_bin(binning_map, bin_degree(degree, binning_map.d_max))
    noise = sample_discrete_laplace(LapParams(epsilon, delta, width), rng)
    wanted = max(int(noise), 0)
    available = max(n_nodes - 1 - degree, 0)
    return min(wanted, available), wanted > available


def _pick_dummies(row: int, columns: NDArray, count: int, n_nodes: int, rng: np.random.Generator) -> NDArray:
    if count == 0:
        return np.empty(0, dtype=np.int64)
    excluded = set(columns.tolist())
    excluded.add(row)
    free = n_nodes - len(excluded)
    if 2 * count > free:
        candidates = np.setdiff1d(np.arange(n_nodes), np.fromiter(excluded, dtype=np.int64))
        return rng.choice(candidates, size=count, replace=False).astype(np.int64)
    chosen: list[int] = []
    while len(chosen) < count:
        for candidate in rng.integers(0, n_nodes, size=2 * (count - len(chosen)) + 4).tolist():
            if candidate not in excluded:
                excluded.add(candidate)
                chosen.append(candidate)
                if len(chosen) == count:
                    break
    return np.asarray(chosen, dtype=np.int64)


def encrypt_local_view(
    row: int,
    columns: ArrayLike,
    weights: ArrayLike,
    n_nodes: int,
    binning_map: BinningMap,
    epsilon: float,
    delta: float,
    rng: np.random.Generator,
    weight_fractional_bits: int = settings.WEIGHT_FRACTIONAL_BITS,
) -> LocalView:
    cols = np.asarray(columns, dtype=np.int64)
    if cols.size and (np.unique(cols).size != cols.size or np.any(cols == row)):
        raise InvalidParameterError(f"Row {row} must list distinct neighbours other than itself")
    if cols.size and (cols.min() < 0 or cols.max() >= n_nodes):
        raise InvalidParameterError(f"Row {row} has columns outside [0, {n_nodes})")
    degree = int(cols.size)
    count, capped = draw_dummy_count(degree, n_nodes, binning_map, epsilon, delta, rng)
    if capped:
        logger.info(f"Row {row} too dense for its dummy draw; capped at {count} dummies")
    dummies = _pick_dummies(row, cols, count, n_nodes, rng)

    scaled = np.rint(np.asarray(weights, dtype=np.float64) * 2.0**weight_fractional_bits).astype(np.int64)
    all_columns = np.concatenate([cols, dummies])
    values = np.concatenate([scaled, np.zeros(count, dtype=np.int64)])
    order = rng.permutation(all_columns.size)
    first, second = share(values[order], RING64, rng)
    return LocalView(row, all_columns[order], (first.value, second.value), degree)


def count_view_records(
    degrees: ArrayLike,
    n_nodes: int,
    binning_map: BinningMap,
    epsilon: float,
    delta: float,
    rng: np.random.Generator,
) -> int:
    """Total encrypted entries all users would upload, without doing any sharing."""
    total = 0
    for degree in np.asarray(degrees, dtype=np.int64).tolist():
        count, _ = draw_dummy_count(degree, n_nodes, binning_map, epsilon, delta, rng)
        total += degree + count
    return total


def estimate_view_bytes(
    degrees: ArrayLike,
    n_nodes: int,
    binning_map: BinningMap,
    epsilon: float,
    delta: float,
    rng: np.random.Generator,
) -> int:
    """Bytes of one server's share file for the given binning."""
    return share_file_size(count_view_records(degrees, n_nodes, binning_map, epsilon, delta, rng))


def dense_view_bytes(n_nodes: int) -> int:
    """One server's storage when every user shares a full dense row of 64-bit elements."""
    return n_nodes * n_nodes * RING64.element_bytes
