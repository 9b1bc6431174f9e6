"""Seeded synthetic graphs standing in for large social networks."""

from __future__ import annotations

from enum import Enum

import numpy as np

from ..core.exceptions.input_exceptions import InvalidParameterError
from ..models.graph import GraphDataset

SYNTHETIC_PREFIX = "synthetic:"


class SyntheticKind(str, Enum):
    ERDOS_RENYI = "erdos-renyi"
    PREFERENTIAL_ATTACHMENT = "preferential-attachment"


_ALIASES = {"er": SyntheticKind.ERDOS_RENYI, "pa": SyntheticKind.PREFERENTIAL_ATTACHMENT}


def _erdos_renyi(n_nodes: int, p: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Directed G(N, p) without self-loops: each row draws its out-degree, then distinct targets."""
    if not 0 <= p <= 1:
        raise InvalidParameterError(f"Edge probability must lie in [0, 1], got {p}")
    sources, targets = [], []
    degrees = rng.binomial(n_nodes - 1, p, size=n_nodes) if n_nodes > 1 else np.zeros(n_nodes, dtype=np.int64)
    for node, degree in enumerate(degrees.tolist()):
        if degree == 0:
            continue
        picks = rng.choice(n_nodes - 1, size=degree, replace=False)
        picks = picks + (picks >= node)
        sources.append(np.full(degree, node, dtype=np.int64))
        targets.append(np.sort(picks).astype(np.int64))
    if not sources:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.concatenate(sources), np.concatenate(targets)


def _preferential_attachment(n_nodes: int, m: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Barabasi-Albert growth: each new node links to ``m`` distinct nodes chosen by degree."""
    if m < 1 or m >= n_nodes:
        raise InvalidParameterError(f"Attachment count must lie in [1, N), got m={m} for N={n_nodes}")
    edges: list[tuple[int, int]] = [(0, node) for node in range(1, m + 1)]
    endpoints = [endpoint for edge in edges for endpoint in edge]
    for node in range(m + 1, n_nodes):
        chosen: set[int] = set()
        while len(chosen) < m:
            chosen.add(endpoints[int(rng.integers(len(endpoints)))])
        for target in sorted(chosen):
            edges.append((node, target))
            endpoints.extend((node, target))
    array = np.asarray(edges, dtype=np.int64)
    return np.concatenate([array[:, 0], array[:, 1]]), np.concatenate([array[:, 1], array[:, 0]])


def generate_synthetic(kind: SyntheticKind | str, n_nodes: int, param: float, seed: int = 0) -> GraphDataset:
    kind = _ALIASES.get(str(kind), kind)
    kind = SyntheticKind(kind)
    if n_nodes < 1:
        raise InvalidParameterError(f"A graph needs at least one node, got N={n_nodes}")
    rng = np.random.default_rng(seed)
    if kind is SyntheticKind.ERDOS_RENYI:
        sources, targets = _erdos_renyi(n_nodes, float(param), rng)
        directed = True
    else:
        sources, targets = _preferential_attachment(n_nodes, int(param), rng)
        directed = False
    order = np.lexsort((targets, sources))
    return GraphDataset(
        n_nodes=n_nodes,
        sources=sources[order],
        targets=targets[order],
        weights=np.ones(sources.size, dtype=np.float64),
        directed=directed,
        provenance=f"{SYNTHETIC_PREFIX}{kind.value},{n_nodes},{param},seed={seed}",
    )


def parse_synthetic_spec(spec: str) -> tuple[SyntheticKind, int, float]:
    """``synthetic:er,N,p`` or ``synthetic:pa,N,m``."""
    body = spec.removeprefix(SYNTHETIC_PREFIX)
    parts = [part.strip() for part in body.split(",")]
    if len(parts) != 3 or parts[0] not in _ALIASES:
        raise InvalidParameterError(f"Synthetic graph spec must look like 'synthetic:er,N,p', got '{spec}'")
    try:
        return _ALIASES[parts[0]], int(parts[1]), float(parts[2])
    except ValueError as e:
        raise InvalidParameterError(f"Invalid numbers in synthetic graph spec '{spec}'") from e


def true_degrees(graph: GraphDataset) -> np.ndarray:
    """Out-degree of every node (row counts of the adjacency matrix)."""
    return np.bincount(graph.sources, minlength=graph.n_nodes).astype(np.int64)
