import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.app.graph.edge_list import parse_edge_list
from src.app.graph.synthetic import SyntheticKind, generate_synthetic
from src.app.models.collection import SharedSparseAdjacency
from src.app.models.graph import GraphDataset
from src.app.models.shares import ArithShare
from src.app.mpc.ring import RING64, RING128, Ring, decode, encode
from src.app.mpc.sharing import reconstruct, share

FRACTIONAL_BITS = 32


def share_fixed(
    values: ArrayLike, rng: np.random.Generator, ring: Ring = RING128, fractional_bits: int = FRACTIONAL_BITS
) -> tuple[ArithShare, ArithShare]:
    return share(encode(values, fractional_bits, ring), ring, rng)


def open_fixed(first: ArithShare, second: ArithShare, fractional_bits: int = FRACTIONAL_BITS) -> NDArray:
    return decode(reconstruct(first, second), fractional_bits, first.ring)


def path_graph(n: int) -> GraphDataset:
    return parse_edge_list("\n".join(f"{i} {i + 1}" for i in range(n - 1)))


def cycle_graph(n: int) -> GraphDataset:
    return parse_edge_list("\n".join(f"{i} {(i + 1) % n}" for i in range(n)))


def preferential_graph(n: int, m: int, seed: int = 0) -> GraphDataset:
    return generate_synthetic(SyntheticKind.PREFERENTIAL_ATTACHMENT, n, m, seed)


def random_symmetric(n: int, rng: np.random.Generator, scale: float = 1.0) -> NDArray:
    a = rng.standard_normal((n, n))
    return scale * (a + a.T) / 2.0


def separated_symmetric(eigenvalues: ArrayLike, rng: np.random.Generator) -> NDArray:
    """Dense symmetric matrix with the given spectrum and a random orthonormal eigenbasis."""
    values = np.asarray(eigenvalues, dtype=np.float64)
    q, _ = np.linalg.qr(rng.standard_normal((values.size, values.size)))
    return q @ np.diag(values) @ q.T


def random_degrees(count: int, d_max: int, rng: np.random.Generator) -> NDArray:
    """Degree multiset including zeros and values above ``d_max`` (both get clamped)."""
    return rng.integers(0, d_max + 3, size=count)


def random_histogram(d_max: int, total: int, rng: np.random.Generator) -> NDArray:
    return np.bincount(rng.integers(0, d_max, size=total), minlength=d_max).astype(np.int64)


def shared_adjacency(
    graph: GraphDataset, rng: np.random.Generator
) -> tuple[SharedSparseAdjacency, SharedSparseAdjacency]:
    """Both servers' views of ``graph`` without dummies, as assembly would produce them."""
    first, second = share(RING64.reduce(np.rint(graph.weights).astype(np.int64)), RING64, rng)
    return (
        SharedSparseAdjacency(graph.n_nodes, graph.sources, graph.targets, first),
        SharedSparseAdjacency(graph.n_nodes, graph.sources, graph.targets, second),
    )


def clustered_graph(sizes: list[int], p: float, seed: int = 0) -> GraphDataset:
    """Disjoint cliques of the given sizes joined by random cross edges with probability ``p``."""
    rng = np.random.default_rng(seed)
    offsets = np.cumsum([0, *sizes])
    edges = [
        (int(u), int(v))
        for start, stop in zip(offsets[:-1], offsets[1:])
        for u in range(start, stop)
        for v in range(u + 1, stop)
    ]
    n = int(offsets[-1])
    upper = np.argwhere(np.triu(rng.random((n, n)) < p, k=1))
    edges += [(int(u), int(v)) for u, v in upper]
    return parse_edge_list("\n".join(f"{u} {v}" for u, v in edges))
