"""Acceptance runs on realistic graph sizes. Slow; deselect with ``-m "not slow"``."""

from pathlib import Path

import numpy as np
import pytest

from src.app.core.config import RunConfig
from src.app.graph import load_graph
from src.app.graph.synthetic import generate_synthetic
from src.app.reference.metrics import relative_gap
from src.app.reference.oracle import oracle_top_eigs
from src.app.sim.accounting import account
from src.app.sim.evaluation import evaluate_accuracy
from src.app.sim.runner import run_protocol

DATA_DIR = Path(__file__).parent / "data"
FACEBOOK = DATA_DIR / "facebook_combined.txt.gz"


async def _run(graph, config):
    outcome = await run_protocol(config, graph)
    assert all(check.passed for check in account(outcome.transcripts, outcome.shape()))
    return outcome


@pytest.mark.slow
class TestAcceptance:
    """Test secure eigenvalues against the float64 mirror and the oracle."""

    @pytest.mark.asyncio
    async def test_preferential_attachment(self):
        """Test the default parameters on a heavy-tailed graph of a thousand nodes."""
        graph = generate_synthetic("pa", 1000, 5, seed=0)
        config = RunConfig(seed=0)
        outcome = await _run(graph, config)
        accuracy = evaluate_accuracy(graph, config, outcome.result)
        leading = abs(outcome.result.eigenvalues[0])
        assert accuracy.rmse_secure_vs_plaintext <= 1e-4 * leading
        assert relative_gap(outcome.result.eigenvalues[0], accuracy.oracle_eigenvalues[0]) <= 1e-3
        assert accuracy.rmse_secure_vs_oracle <= 1.05 * accuracy.rmse_plaintext_vs_oracle + 1e-6 * leading

    @pytest.mark.asyncio
    async def test_directed_erdos_renyi_leading_value(self):
        """Test the Perron root of a directed random graph."""
        graph = generate_synthetic("er", 500, 0.02, seed=4)
        config = RunConfig(m=10, top_k=1, sweeps=60, d_max=40, seed=4)
        outcome = await _run(graph, config)
        truth, _ = oracle_top_eigs(graph.adjacency(), 1)
        assert relative_gap(outcome.result.eigenvalues[0], truth[0]) <= 1e-2

    @pytest.mark.asyncio
    @pytest.mark.skipif(not FACEBOOK.exists(), reason="SNAP ego-Facebook edge list not downloaded")
    async def test_facebook_ego_network(self):
        """Test top-3 accuracy on the ego-Facebook graph."""
        graph = load_graph(str(FACEBOOK))
        config = RunConfig(seed=0)
        outcome = await _run(graph, config)
        accuracy = evaluate_accuracy(graph, config, outcome.result)
        leading = abs(outcome.result.eigenvalues[0])
        assert accuracy.rmse_secure_vs_oracle <= 1.05 * accuracy.rmse_plaintext_vs_oracle + 1e-6 * leading
        assert np.isfinite(outcome.result.eigenvectors).all()
