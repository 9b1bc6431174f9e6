from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray


@dataclass(frozen=True)
class GraphDataset:
    """Arc list over compacted node ids ``[0, n_nodes)``.

    Undirected graphs store both orientations of every edge, so ``sources``/``targets`` always
    describe the rows and columns of the adjacency matrix.
    """

    n_nodes: int
    sources: NDArray
    targets: NDArray
    weights: NDArray
    directed: bool = False
    weighted: bool = False
    provenance: str = ""
    dropped_self_loops: int = field(default=0, compare=False)

    @property
    def n_arcs(self) -> int:
        return int(self.sources.size)

    @property
    def n_edges(self) -> int:
        return self.n_arcs if self.directed else self.n_arcs // 2

    @property
    def density(self) -> float:
        if self.n_nodes < 2:
            return 0.0
        return self.n_arcs / (self.n_nodes * (self.n_nodes - 1))

    @property
    def max_weight(self) -> float:
        return float(np.max(np.abs(self.weights))) if self.n_arcs else 1.0

    def adjacency(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.weights.astype(np.float64), (self.sources, self.targets)), shape=(self.n_nodes, self.n_nodes)
        )

    def row(self, node: int) -> tuple[NDArray, NDArray]:
        """Columns and weights of ``node``'s out-arcs (its local view)."""
        mask = self.sources == node
        return self.targets[mask], self.weights[mask]

    def rows(self) -> list[tuple[NDArray, NDArray]]:
        order = np.argsort(self.sources, kind="stable")
        boundaries = np.searchsorted(self.sources[order], np.arange(self.n_nodes + 1))
        return [
            (self.targets[order[start:end]], self.weights[order[start:end]])
            for start, end in zip(boundaries[:-1], boundaries[1:])
        ]

    def is_symmetric(self) -> bool:
        adjacency = self.adjacency()
        return (abs(adjacency - adjacency.T) > 1e-12).nnz == 0
