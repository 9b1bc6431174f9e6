from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .shares import ArithShare


@dataclass(frozen=True)
class SharedHistogram:
    """One server's shares of the sampled degree counts ``D_1..D_dmax`` over Z_2^32."""

    counts: ArithShare
    sample_size: int

    @property
    def d_max(self) -> int:
        return self.counts.size


@dataclass(frozen=True)
class SharedSparseAdjacency:
    """One server's COO view of the collected matrix.

    Positions are identical on both servers (they are the union of true and dummy locations); only
    ``weights`` differs.
    """

    n_nodes: int
    rows: NDArray
    cols: NDArray
    weights: ArithShare

    @property
    def nnz(self) -> int:
        return int(self.rows.size)

    @property
    def party(self) -> int:
        return self.weights.party

    def row_counts(self) -> NDArray:
        return np.bincount(self.rows, minlength=self.n_nodes)

    def col_counts(self) -> NDArray:
        return np.bincount(self.cols, minlength=self.n_nodes)

    def max_row_count(self) -> int:
        return int(self.row_counts().max()) if self.nnz else 0

    def max_col_count(self) -> int:
        return int(self.col_counts().max()) if self.nnz else 0
