from collections.abc import Callable

import numpy as np
import pytest

from src.app.core.config import RunConfig
from src.app.models.graph import GraphDataset
from src.app.sim.dealer import Dealer
from src.app.sim.session import TwoPartySession
from tests.helpers.generators import path_graph, preferential_graph


@pytest.fixture
def rng() -> np.random.Generator:
    """Fixed generator so failing cases reproduce."""
    return np.random.default_rng(20240611)


@pytest.fixture
def dealer() -> Dealer:
    return Dealer(seed=7)


@pytest.fixture
def session(dealer: Dealer) -> TwoPartySession:
    """Interleaved two-party session without latency."""
    return TwoPartySession(dealer, seed=7)


@pytest.fixture
def make_session() -> Callable[..., TwoPartySession]:
    def _make(seed: int = 7, **kwargs) -> TwoPartySession:
        return TwoPartySession(Dealer(seed=seed), seed=seed, **kwargs)

    return _make


@pytest.fixture
def small_config() -> RunConfig:
    """Parameters small enough for a full secure run in a few seconds."""
    return RunConfig(
        m=5,
        top_k=2,
        omega=20,
        sweeps=40,
        bins=3,
        sample_rate=0.5,
        d_max=8,
        seed=3,
    )


@pytest.fixture
def p4() -> GraphDataset:
    return path_graph(4)


@pytest.fixture
def small_pa_graph() -> GraphDataset:
    return preferential_graph(40, 2, seed=11)
