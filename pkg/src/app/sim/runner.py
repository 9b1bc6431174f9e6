"""End-to-end run: collection followed by eigendecomposition.

Phases, in order: ``histogram`` (servers agree on which sampled keys are valid and sum those),
``binning`` (servers derive the equal-population bins, users open them), ``assembly`` (users upload
noisy encrypted rows, servers build the shared sparse matrix), ``krylov``, ``qr`` and ``extraction``
(servers hand ``T_K`` and ``P·S`` to the analyst). User-side work happens between phases and sends
nothing between servers.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import TypeVar

import numpy as np

from ..collection.assembly import assemble_adjacency
from ..collection.binning import generate_binning_map, open_binning_map
from ..collection.histogram import agree_histogram, collect_degree_keys, histogram_domain_bits, sample_users
from ..core.config import CompareBackendOption, RunConfig, settings
from ..core.exceptions.input_exceptions import InvalidParameterError
from ..core.logger import logging
from ..eigen.extract import check_result_convergence, extract_eigenpairs, release_eigenpairs
from ..eigen.krylov import operator_scale, prepare_operator, secure_krylov
from ..eigen.qr import secure_qr
from ..graph.synthetic import true_degrees
from ..ldp.client import encrypt_local_view
from ..ldp.share_file import share_file_size, view_records
from ..models.collection import SharedSparseAdjacency
from ..models.eigen import EigenResult
from ..models.graph import GraphDataset
from ..models.ldp import BinningMap
from ..mpc.ring import Ring
from ..schemas.transcript import Transcript
from .accounting import ProtocolShape
from .analyst import Analyst
from .context import PartyContext
from .dealer import Dealer
from .oracle import DebugOracle, OracleFlag
from .planning import plan_collection, plan_eigen
from .session import TwoPartySession

logger = logging.getLogger(__name__)

T = TypeVar("T")

PHASES = ("histogram", "binning", "assembly", "krylov", "qr", "extraction")
KEY_STREAM = 2
VIEW_STREAM = 3


@dataclass
class RunOutcome:
    """What a run produced, filled phase by phase."""

    config: RunConfig
    n_nodes: int
    d_max: int
    backend: CompareBackendOption
    transcripts: list[Transcript] = field(default_factory=list)
    sampled_users: int = 0
    sample_size: int = 0
    key_count: int = 0
    key_bytes: int = 0
    binning_map: BinningMap | None = None
    share_file_bytes: int = 0
    nnz: int = 0
    sigma: float | None = None
    result: EigenResult | None = None
    dealer_usage: dict[str, int] = field(default_factory=dict)
    oracle_flags: list[OracleFlag] = field(default_factory=list)

    @property
    def domain_bits(self) -> int:
        return histogram_domain_bits(self.d_max)

    def shape(self) -> ProtocolShape:
        return ProtocolShape(
            n_nodes=self.n_nodes,
            nnz=self.nnz,
            d_max=self.d_max,
            m=self.config.m,
            sweeps=self.config.sweeps,
            omega=self.config.omega,
            backend=self.backend,
            variant=self.config.qr_variant,
            method=self.config.krylov,
            sampled_users=self.sampled_users,
            ring_bits=self.config.ring_bits,
        )


def _mine(ctx: PartyContext, pair: tuple[T, T]) -> T:
    return pair[ctx.party - 1]


def _check_phases(phases: Sequence[str]) -> int:
    """Phases must be a prefix of :data:`PHASES`; returns how many run."""
    count = len(phases)
    if count == 0 or tuple(phases) != PHASES[:count]:
        raise InvalidParameterError(f"Phases must be a prefix of {', '.join(PHASES)}; got {list(phases)}")
    return count


def _check_inputs(config: RunConfig, graph: GraphDataset) -> None:
    if graph.n_nodes < 2:
        raise InvalidParameterError(f"Graph must have at least two nodes, got {graph.n_nodes}")
    if config.m > graph.n_nodes:
        raise InvalidParameterError(f"Krylov dimension m={config.m} exceeds N={graph.n_nodes}")
    if graph.max_weight > config.max_weight:
        logger.warning(
            f"Graph weights reach {graph.max_weight:g} above max_weight={config.max_weight:g}; "
            "the scaled operator may exceed unit norm"
        )


async def run_protocol(
    config: RunConfig,
    graph: GraphDataset,
    phases: Sequence[str] = PHASES,
    oracle: DebugOracle | None = None,
    check_convergence: bool = True,
) -> RunOutcome:
    """Run the listed phases (a prefix of :data:`PHASES`) on ``graph``.

    When the extraction phase runs, ``outcome.result`` holds the analyst's eigenpairs. With
    ``check_convergence`` an unconverged read-out raises :class:`NonConvergenceError`; callers that
    report the failure themselves pass ``False`` and call :func:`check_result_convergence`.
    """
    count = _check_phases(phases)
    _check_inputs(config, graph)
    n = graph.n_nodes
    backend = config.resolve_backend()
    outcome = RunOutcome(config=config, n_nodes=n, d_max=config.resolve_d_max(n), backend=backend)
    d_max = outcome.d_max

    dealer = Dealer(config.seed)
    dealer.provision(plan_collection(d_max, backend))
    session = TwoPartySession(
        dealer,
        config.seed,
        config.latency_ms,
        config.execution_mode,
        fractional_bits=config.resolve_fractional_bits(),
        oracle=oracle,
    )
    outcome.transcripts = session.transcripts
    degrees = true_degrees(graph)

    def finish() -> RunOutcome:
        outcome.dealer_usage = dealer.usage()
        if session.oracle is not None:
            outcome.oracle_flags = list(session.oracle.flags)
        return outcome

    # users: sampled ones send one DPF key per server
    sampled = sample_users(n, config.sample_rate, config.seed)
    keys = collect_degree_keys(degrees[sampled], d_max, np.random.default_rng([config.seed, KEY_STREAM]))
    outcome.sampled_users = int(sampled.size)
    outcome.key_count = len(keys[0]) + len(keys[1])
    outcome.key_bytes = sum(len(key) for key in keys[0]) + sum(len(key) for key in keys[1])

    async def histogram(ctx: PartyContext):
        return await agree_histogram(ctx, _mine(ctx, keys), d_max)

    histograms = await session.run_phase("histogram", histogram)
    outcome.sample_size = histograms[0].sample_size
    if count == 1:
        return finish()

    if histograms[0].sample_size < config.bins:
        logger.warning(f"Sample of {histograms[0].sample_size} users is below B={config.bins}; bins hold one user")

    async def binning(ctx: PartyContext):
        return await generate_binning_map(ctx, _mine(ctx, histograms), config.bins, backend)

    boundary_shares = await session.run_phase("binning", binning)
    binning_map = open_binning_map(*boundary_shares)
    outcome.binning_map = binning_map
    logger.info(f"Binning map over d_max={d_max}: {len(binning_map.intervals)} bins")
    if count == 2:
        return finish()

    # users: every node encrypts its local view under the released bins
    view_rng = np.random.default_rng([config.seed, VIEW_STREAM])
    views = [
        encrypt_local_view(node, columns, weights, n, binning_map, config.epsilon, config.delta, view_rng)
        for node, (columns, weights) in enumerate(graph.rows())
    ]
    records = (view_records(views, 1), view_records(views, 2))
    outcome.share_file_bytes = share_file_size(len(records[0]))

    async def assembly(ctx: PartyContext):
        return assemble_adjacency(_mine(ctx, records), n, ctx.party)

    adjacencies: tuple[SharedSparseAdjacency, SharedSparseAdjacency] = await session.run_phase("assembly", assembly)
    outcome.nnz = adjacencies[0].nnz
    sigma = operator_scale(adjacencies[0].max_row_count(), adjacencies[0].max_col_count(), config.max_weight)
    outcome.sigma = sigma
    if count == 3:
        return finish()

    dealer.provision(
        plan_eigen(config.m, config.sweeps, config.omega, config.krylov, config.qr_variant, config.ring_bits)
    )
    eigen_ring = Ring(config.ring_bits)

    async def krylov(ctx: PartyContext):
        adjacency = _mine(ctx, adjacencies)
        operator = await prepare_operator(ctx, adjacency, sigma, settings.WEIGHT_FRACTIONAL_BITS, eigen_ring)
        return await secure_krylov(ctx, operator, config.m, config.omega, config.krylov)

    projections = await session.run_phase("krylov", krylov)
    if count == 4:
        return finish()

    async def qr(ctx: PartyContext):
        h = _mine(ctx, projections).projected
        return await secure_qr(ctx, h, config.sweeps, config.omega, config.qr_variant, config.qr_shift)

    states = await session.run_phase("qr", qr)
    if count == 5:
        return finish()

    analyst = Analyst()

    async def extraction(ctx: PartyContext):
        await release_eigenpairs(ctx, _mine(ctx, states), _mine(ctx, projections).basis, analyst)

    await session.run_phase("extraction", extraction)
    outcome.result = extract_eigenpairs(analyst, config.top_k, sigma, session.fractional_bits, config.qr_shift)
    logger.info(f"Leading eigenvalues: {np.round(outcome.result.eigenvalues, 6).tolist()}")
    finish()
    if check_convergence:
        check_result_convergence(outcome.result, config.convergence_tol)
    return outcome
