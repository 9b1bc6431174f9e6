"""SNAP-style edge lists: ``u v`` or ``u v w`` per line, ``#`` comments, optional gzip."""

from __future__ import annotations

import gzip
from pathlib import Path

import numpy as np

from ..core.exceptions.input_exceptions import EdgeListParseError
from ..core.logger import logging
from ..models.graph import GraphDataset

logger = logging.getLogger(__name__)


def _parse_lines(text: str) -> tuple[list[str], list[str], list[float], bool]:
    sources, targets, weights = [], [], []
    weighted = False
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) not in (2, 3):
            raise EdgeListParseError(f"expected 'u v' or 'u v w', got {raw.strip()!r}", line_number=number)
        weight = 1.0
        if len(fields) == 3:
            try:
                weight = float(fields[2])
            except ValueError as e:
                raise EdgeListParseError(f"invalid weight {fields[2]!r}", line_number=number) from e
            weighted = True
        sources.append(fields[0])
        targets.append(fields[1])
        weights.append(weight)
    return sources, targets, weights, weighted


def _compact(labels: list[str]) -> tuple[dict[str, int], bool]:
    unique = list(dict.fromkeys(labels))
    numeric = all(label.lstrip("-").isdigit() for label in unique)
    ordered = sorted(unique, key=int) if numeric else unique
    return {label: index for index, label in enumerate(ordered)}, numeric


def parse_edge_list(text: str, directed: bool = False, provenance: str = "") -> GraphDataset:
    """Parse an edge list, compact node ids, drop self-loops and deduplicate arcs.

    For undirected input every edge is stored in both orientations. When the same arc appears more
    than once the first weight wins.
    """
    sources, targets, weights, weighted = _parse_lines(text)
    ids, _ = _compact(sources + targets)
    u = np.fromiter((ids[s] for s in sources), dtype=np.int64, count=len(sources))
    v = np.fromiter((ids[t] for t in targets), dtype=np.int64, count=len(targets))
    w = np.asarray(weights, dtype=np.float64)

    loops = u == v
    dropped = int(loops.sum())
    if dropped:
        logger.info(f"Dropped {dropped} self-loops from {provenance or 'edge list'}")
    u, v, w = u[~loops], v[~loops], w[~loops]
    if not directed:
        u, v, w = np.concatenate([u, v]), np.concatenate([v, u]), np.concatenate([w, w])

    n_nodes = len(ids)
    _, first = np.unique(u * max(n_nodes, 1) + v, return_index=True)
    first.sort()
    return GraphDataset(
        n_nodes=n_nodes,
        sources=u[first],
        targets=v[first],
        weights=w[first],
        directed=directed,
        weighted=weighted,
        provenance=provenance,
        dropped_self_loops=dropped,
    )


def load_edge_list(path: str | Path, directed: bool = False) -> GraphDataset:
    path = Path(path)
    if path.suffix == ".gz":
        with gzip.open(path, "rt", encoding="utf-8") as handle:
            text = handle.read()
    else:
        text = path.read_text(encoding="utf-8")
    return parse_edge_list(text, directed=directed, provenance=str(path))


def format_edge_list(graph: GraphDataset) -> str:
    """Serialize ``graph`` as one arc per line (each undirected edge once)."""
    lines = []
    for u, v, w in zip(graph.sources.tolist(), graph.targets.tolist(), graph.weights.tolist()):
        if not graph.directed and u > v:
            continue
        lines.append(f"{u} {v} {w:g}" if graph.weighted else f"{u} {v}")
    return "\n".join(lines) + ("\n" if lines else "")
