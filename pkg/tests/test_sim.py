"""Unit tests for the two-server run, conformance accounting and dealer planning."""

import numpy as np
import pytest

from src.app.commands.bench_qr import measure_qr
from src.app.core.config import CompareBackendOption, ExecutionMode, QrVariant, RunConfig
from src.app.core.exceptions.input_exceptions import InvalidParameterError
from src.app.core.exceptions.numeric_exceptions import NonConvergenceError
from src.app.eigen.krylov import KRYLOV_TAG
from src.app.eigen.qr import QR_TAG
from src.app.graph.synthetic import generate_synthetic
from src.app.reference.qr import random_hessenberg
from src.app.sim.accounting import account, check_slope, slope_exponent
from src.app.sim.evaluation import storage_record
from src.app.sim.oracle import DebugOracle
from src.app.sim.planning import merge_demands, plan_preprocessing
from src.app.sim.runner import PHASES, run_protocol

COLLECTION = ("histogram", "binning", "assembly")


def _fingerprints(outcome):
    return [transcript.fingerprint() for transcript in outcome.transcripts]


class TestRunProtocol:
    """Test the phase sequence on a small preferential-attachment graph."""

    @pytest.mark.asyncio
    async def test_full_run(self, small_config, small_pa_graph):
        """Test that every phase runs and the analyst gets top_k eigenvalues."""
        outcome = await run_protocol(small_config, small_pa_graph, check_convergence=False)
        assert [transcript.phase for transcript in outcome.transcripts] == list(PHASES)
        assert outcome.result is not None
        assert outcome.result.top_k == small_config.top_k
        assert outcome.sigma is not None and outcome.nnz >= small_pa_graph.n_arcs
        assert outcome.binning_map is not None

    @pytest.mark.asyncio
    async def test_deterministic(self, small_config, small_pa_graph):
        """Test that the same seed reproduces every transcript and eigenvalue."""
        first = await run_protocol(small_config, small_pa_graph, check_convergence=False)
        second = await run_protocol(small_config, small_pa_graph, check_convergence=False)
        assert _fingerprints(first) == _fingerprints(second)
        assert [t.model_dump_json() for t in first.transcripts] == [t.model_dump_json() for t in second.transcripts]
        assert np.array_equal(first.result.eigenvalues, second.result.eigenvalues)

    @pytest.mark.asyncio
    async def test_threaded_matches_interleaved(self, small_config, small_pa_graph):
        """Test that both execution modes produce the same transcripts."""
        phases = PHASES[:4]
        interleaved = await run_protocol(small_config, small_pa_graph, phases)
        threaded_config = small_config.model_copy(update={"execution_mode": ExecutionMode.THREADED})
        threaded = await run_protocol(threaded_config, small_pa_graph, phases)
        assert _fingerprints(interleaved) == _fingerprints(threaded)

    @pytest.mark.asyncio
    async def test_latency_changes_time_not_bytes(self, small_config, small_pa_graph):
        """Test that latency moves the simulated clock and leaves traffic alone."""
        config = small_config.model_copy(update={"compare_backend": CompareBackendOption.ASS})
        fast = await run_protocol(config, small_pa_graph, COLLECTION)
        slow = await run_protocol(config.model_copy(update={"latency_ms": 5.0}), small_pa_graph, COLLECTION)
        for quick, delayed in zip(fast.transcripts, slow.transcripts):
            assert quick.total_bytes == delayed.total_bytes
            assert quick.rounds == delayed.rounds
            assert quick.network_ms == 0.0
        binning = slow.transcripts[1]
        assert binning.rounds > 0
        assert binning.network_ms >= 5.0 * binning.rounds

    @pytest.mark.asyncio
    async def test_phase_prefix(self, small_config, small_pa_graph):
        """Test that a prefix of the phases stops early."""
        outcome = await run_protocol(small_config, small_pa_graph, ("histogram", "binning"))
        assert len(outcome.transcripts) == 2
        assert outcome.result is None
        assert outcome.sample_size == round(0.5 * small_pa_graph.n_nodes)

    @pytest.mark.asyncio
    @pytest.mark.parametrize("phases", [(), ("binning",), ("histogram", "assembly")])
    async def test_invalid_phases(self, small_config, small_pa_graph, phases):
        """Test that phases must be a non-empty prefix."""
        with pytest.raises(InvalidParameterError):
            await run_protocol(small_config, small_pa_graph, phases)

    @pytest.mark.asyncio
    async def test_dimension_above_graph_size(self, small_config, p4):
        """Test that M larger than N is rejected before any traffic."""
        with pytest.raises(InvalidParameterError):
            await run_protocol(small_config, p4)

    @pytest.mark.asyncio
    async def test_path_graph_leading_value(self, p4):
        """Test that the path on four nodes yields the golden ratio as its leading eigenvalue."""
        config = RunConfig(m=4, top_k=1, sample_rate=1.0, bins=1, seed=1)
        outcome = await run_protocol(config, p4)
        assert abs(outcome.result.eigenvalues[0]) == pytest.approx((1 + 5**0.5) / 2, abs=1e-2)
        assert outcome.result.shift == config.qr_shift

    @pytest.mark.asyncio
    async def test_unshifted_bipartite_spectrum_raises(self, p4):
        """Test that the stalled unshifted iteration on a ±lambda spectrum is reported, not returned."""
        config = RunConfig(m=4, top_k=1, sample_rate=1.0, bins=1, seed=1, qr_shift=0.0)
        with pytest.raises(NonConvergenceError):
            await run_protocol(config, p4)
        outcome = await run_protocol(config, p4, check_convergence=False)
        assert outcome.result.max_subdiagonal > config.convergence_tol

    @pytest.mark.asyncio
    async def test_oracle_quiet_on_healthy_run(self, small_config, small_pa_graph):
        """Test that a well-scaled run raises no debug flags."""
        outcome = await run_protocol(small_config, small_pa_graph, PHASES[:4], oracle=DebugOracle())
        assert outcome.oracle_flags == []


class TestAccounting:
    """Test measured traffic against the closed forms."""

    @pytest.mark.asyncio
    async def test_full_run_conforms(self, small_config, small_pa_graph):
        """Test that every exact check passes on an honest run."""
        outcome = await run_protocol(small_config, small_pa_graph, check_convergence=False)
        checks = account(outcome.transcripts, outcome.shape())
        assert {check.phase for check in checks} == set(PHASES)
        assert all(check.passed for check in checks)

    @pytest.mark.asyncio
    async def test_histogram_accounts_validity_bits(self, small_config, small_pa_graph):
        """Test that the histogram phase carries exactly the packed validity bitmap."""
        outcome = await run_protocol(small_config, small_pa_graph, ("histogram",))
        shape = outcome.shape()
        assert shape.sampled_users == outcome.sample_size == 20
        assert outcome.transcripts[0].total_bytes == 2 * 3
        assert all(check.passed for check in account(outcome.transcripts, shape))

    @pytest.mark.asyncio
    async def test_tampered_transcript_fails(self, small_config, small_pa_graph):
        """Test that an extra round in binning is caught."""
        outcome = await run_protocol(small_config, small_pa_graph, COLLECTION)
        transcripts = list(outcome.transcripts)
        transcripts[1] = transcripts[1].model_copy(update={"rounds": transcripts[1].rounds + 1})
        failed = [check for check in account(transcripts, outcome.shape()) if not check.passed]
        assert [(check.phase, check.quantity) for check in failed] == [("binning", "rounds")]

    @pytest.mark.asyncio
    async def test_binning_bytes_linear_in_d_max(self, small_config, small_pa_graph):
        """Test that binning traffic grows linearly with the degree bound."""
        sizes = [4, 8, 16, 32]
        measured = []
        for d_max in sizes:
            outcome = await run_protocol(
                small_config.model_copy(update={"d_max": d_max}), small_pa_graph, ("histogram", "binning")
            )
            measured.append(outcome.transcripts[1].total_bytes)
        assert check_slope("binning", "bytes", sizes, measured, 1.0).passed

    @pytest.mark.slow
    @pytest.mark.asyncio
    @pytest.mark.parametrize("variant, exponent", [(QrVariant.BASIC, 3.0), (QrVariant.OPTIMIZED, 2.0)])
    async def test_qr_traffic_scaling(self, rng, variant, exponent):
        """Test cubic against quadratic growth of rotation traffic in M."""
        sizes = [4, 8, 16]
        measured = []
        for m in sizes:
            transcript = await measure_qr(random_hessenberg(m, rng), 1, 3, variant)
            measured.append(transcript.tag(QR_TAG).elements())
        assert check_slope("qr", "matmul elements", sizes, measured, exponent).passed

    def test_slope_exponent(self):
        """Test the log-log slope on exact power laws."""
        assert slope_exponent([1, 2, 4], [3, 6, 12]) == pytest.approx(1.0)
        assert slope_exponent([2, 4, 8], [4, 16, 64]) == pytest.approx(2.0)

    def test_slope_needs_positive_pairs(self):
        """Test that degenerate series are rejected."""
        with pytest.raises(InvalidParameterError):
            slope_exponent([1], [1])
        with pytest.raises(InvalidParameterError):
            slope_exponent([1, 2], [0, 1])

    def test_check_slope_outside_tolerance(self):
        """Test that a quadratic series fails a linear expectation."""
        assert not check_slope("krylov", "bytes", [1, 2, 4], [1, 4, 16], 1.0).passed


class TestPlanning:
    """Test dry-run counting of dealer material."""

    def test_merge(self):
        """Test that demands add up per kind."""
        assert merge_demands({"beaver": 2}, {"beaver": 1, "trunc": 4}) == {"beaver": 3, "trunc": 4}

    @pytest.mark.asyncio
    async def test_plan_matches_usage(self, small_config, small_pa_graph):
        """Test that the dry run predicts exactly what a full run consumes."""
        outcome = await run_protocol(small_config, small_pa_graph, check_convergence=False)
        assert outcome.dealer_usage == plan_preprocessing(small_config, small_pa_graph.n_nodes)


class TestStorage:
    """Test the encrypted-view size estimates."""

    def test_binned_beats_dense_and_single_bin(self, small_config):
        """Test savings on a heavy-tailed graph with a large degree bound."""
        graph = generate_synthetic("pa", 2000, 3, seed=1)
        config = small_config.model_copy(update={"d_max": 30, "bins": 10, "sample_rate": 0.1})
        record = storage_record(graph, config, config.bins)
        assert record.saving_vs_dense >= 0.8
        assert record.binned_bytes < record.single_bin_bytes

    def test_single_bin_record(self, small_config, small_pa_graph):
        """Test that B = 1 reports the single-bin map."""
        record = storage_record(small_pa_graph, small_config, 1, include_dense=False)
        assert record.binning_map == "00000001"
        assert record.binned_bytes == record.single_bin_bytes
        assert record.dense_bytes is None


class TestRingWidth:
    """Test the eigen stage over Z_2^64 against the default Z_2^128."""

    @pytest.mark.asyncio
    async def test_krylov_traffic_halves(self, small_config, small_pa_graph):
        """Test equal element counts and half the bytes in the narrow ring."""
        phases = PHASES[:4]
        wide = await run_protocol(small_config, small_pa_graph, phases)
        narrow_config = small_config.model_copy(update={"ring_bits": 64})
        narrow = await run_protocol(narrow_config, small_pa_graph, phases)
        wide_krylov, narrow_krylov = wide.transcripts[3].tag(KRYLOV_TAG), narrow.transcripts[3].tag(KRYLOV_TAG)
        assert narrow_krylov.elements() == wide_krylov.elements()
        assert 2 * narrow_krylov.bytes_p1_to_p2 == wide_krylov.bytes_p1_to_p2
        assert all(check.passed for check in account(narrow.transcripts, narrow.shape()))
        assert narrow.transcripts[3].tag("extend").elements() == 0
        assert "extension" not in narrow.dealer_usage and wide.dealer_usage["extension"] == 1

    @pytest.mark.asyncio
    async def test_narrow_plan_matches_usage(self, small_config, small_pa_graph):
        """Test that the dry run accounts for the skipped share extension."""
        config = small_config.model_copy(update={"ring_bits": 64})
        outcome = await run_protocol(config, small_pa_graph, check_convergence=False)
        assert outcome.dealer_usage == plan_preprocessing(config, small_pa_graph.n_nodes)

    @pytest.mark.asyncio
    async def test_narrow_matches_wide(self, small_config, small_pa_graph):
        """Test that the narrow ring reproduces the leading eigenvalues."""
        wide = await run_protocol(small_config, small_pa_graph, check_convergence=False)
        narrow_config = small_config.model_copy(update={"ring_bits": 64})
        narrow = await run_protocol(narrow_config, small_pa_graph, check_convergence=False)
        leading = abs(wide.result.eigenvalues[0])
        assert np.allclose(narrow.result.eigenvalues, wide.result.eigenvalues, atol=1e-2 * leading)

    @pytest.mark.asyncio
    async def test_qr_bytes_halve(self, rng):
        """Test the rotation traffic of one QR in both widths."""
        h = random_hessenberg(5, rng)
        wide = await measure_qr(h, 1, 3, QrVariant.OPTIMIZED)
        narrow = await measure_qr(h, 1, 3, QrVariant.OPTIMIZED, ring_bits=64)
        assert narrow.tag(QR_TAG).elements() == wide.tag(QR_TAG).elements()
        assert 2 * narrow.tag(QR_TAG).bytes_p1_to_p2 == wide.tag(QR_TAG).bytes_p1_to_p2

    def test_unsupported_width(self):
        """Test that only 64 and 128 bit eigen rings are accepted."""
        with pytest.raises(ValueError):
            RunConfig(ring_bits=32)
