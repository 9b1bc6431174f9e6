from pathlib import Path

from ..models.graph import GraphDataset
from .edge_list import load_edge_list, parse_edge_list
from .synthetic import SYNTHETIC_PREFIX, generate_synthetic, parse_synthetic_spec, true_degrees


def load_graph(source: str, seed: int = 0, directed: bool = False) -> GraphDataset:
    """Resolve ``--graph`` arguments: an edge-list path or a ``synthetic:`` spec."""
    if source.startswith(SYNTHETIC_PREFIX):
        kind, n_nodes, param = parse_synthetic_spec(source)
        return generate_synthetic(kind, n_nodes, param, seed)
    return load_edge_list(Path(source), directed=directed)
