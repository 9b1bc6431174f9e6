"""Unit tests for the secure Krylov projection."""

import numpy as np
import pytest

from src.app.core.config import KrylovMethod
from src.app.core.exceptions.input_exceptions import InvalidParameterError
from src.app.core.exceptions.numeric_exceptions import BreakdownError
from src.app.eigen.krylov import KRYLOV_TAG, krylov_demand, operator_scale, prepare_operator, secure_krylov
from src.app.mpc.ring import RING32, RING64
from src.app.reference.krylov import arnoldi, lanczos
from src.app.sim.accounting import krylov_elements
from tests.helpers.generators import open_fixed, shared_adjacency

M = 4
OMEGA = 20


async def _project(session, graph, rng, method, m=M, omega=OMEGA):
    adjacency = shared_adjacency(graph, rng)
    sigma = operator_scale(adjacency[0].max_row_count(), adjacency[0].max_col_count(), 1.0)

    async def program(ctx):
        operator = await prepare_operator(ctx, adjacency[ctx.party - 1], sigma)
        return await secure_krylov(ctx, operator, m, omega, method)

    first, second = await session.run_phase("krylov", program)
    h = open_fixed(first.projected, second.projected)
    p = open_fixed(first.basis, second.basis)
    return h, p, sigma * graph.adjacency()


class TestOperatorScale:
    """Test the public normalisation of the collected matrix."""

    def test_formula(self):
        """Test 1/(w_max·sqrt(r_max·c_max))."""
        assert operator_scale(4, 9, 2.0) == pytest.approx(1.0 / 12.0)

    def test_empty_matrix(self):
        """Test that empty rows do not divide by zero."""
        assert operator_scale(0, 0, 1.0) == 1.0

    def test_bounds_spectral_norm(self, small_pa_graph):
        """Test that the scaled matrix has spectral norm at most one."""
        degrees = np.bincount(small_pa_graph.sources)
        scaled = operator_scale(degrees.max(), degrees.max(), 1.0) * small_pa_graph.adjacency().toarray()
        assert np.linalg.norm(scaled, 2) <= 1.0 + 1e-12


class TestSecureKrylov:
    """Test Arnoldi and Lanczos on shares against the float64 reference."""

    @pytest.mark.asyncio
    async def test_arnoldi_matches_reference(self, session, small_pa_graph, rng):
        """Test H and P against plaintext Arnoldi with the same Newton iteration."""
        h, p, scaled = await _project(session, small_pa_graph, rng, KrylovMethod.ARNOLDI)
        h_ref, p_ref = arnoldi(scaled, M, OMEGA)
        assert np.allclose(h, h_ref, atol=1e-5)
        assert np.allclose(p, p_ref, atol=1e-5)

    @pytest.mark.asyncio
    async def test_arnoldi_projection(self, session, small_pa_graph, rng):
        """Test that P is orthonormal and PᵀAP equals H."""
        h, p, scaled = await _project(session, small_pa_graph, rng, KrylovMethod.ARNOLDI, omega=30)
        assert np.allclose(p.T @ p, np.eye(M), atol=1e-5)
        assert np.allclose(p.T @ (scaled @ p), h, atol=1e-5)
        assert np.allclose(np.tril(h, k=-2), 0.0)

    @pytest.mark.asyncio
    async def test_lanczos_matches_reference(self, session, small_pa_graph, rng):
        """Test the three-term recurrence on a symmetric graph."""
        h, _, scaled = await _project(session, small_pa_graph, rng, KrylovMethod.LANCZOS)
        h_ref, _ = lanczos(scaled, M, OMEGA)
        assert np.allclose(h, h_ref, atol=1e-5)
        assert np.allclose(h, h.T)

    @pytest.mark.asyncio
    @pytest.mark.parametrize("method", [KrylovMethod.ARNOLDI, KrylovMethod.LANCZOS])
    async def test_traffic_and_material(self, session, dealer, small_pa_graph, rng, method):
        """Test exact element counts and dealer usage."""
        await _project(session, small_pa_graph, rng, method)
        transcript = session.transcript("krylov")
        n, nnz = small_pa_graph.n_nodes, small_pa_graph.n_arcs
        assert transcript.tag("extend").elements() == nnz
        assert transcript.tag(KRYLOV_TAG).elements() == krylov_elements(n, nnz, M, OMEGA, method)
        assert transcript.tag(KRYLOV_TAG).elements_p2_to_p1 == transcript.tag(KRYLOV_TAG).elements_p1_to_p2
        assert dealer.usage() == krylov_demand(M, OMEGA, method)

    @pytest.mark.asyncio
    async def test_dimension_too_large(self, session, p4, rng):
        """Test that M cannot exceed N."""
        with pytest.raises(InvalidParameterError):
            await _project(session, p4, rng, KrylovMethod.ARNOLDI, m=5)

    @pytest.mark.asyncio
    async def test_ring_below_weights(self, session, p4, rng):
        """Test that the operator cannot live in a ring narrower than the weight shares."""
        adjacency = shared_adjacency(p4, rng)

        async def program(ctx):
            return await prepare_operator(ctx, adjacency[ctx.party - 1], 0.5, ring=RING32)

        with pytest.raises(InvalidParameterError):
            await session.run_phase("krylov", program)

    @pytest.mark.asyncio
    async def test_same_ring_skips_extension(self, session, p4, rng):
        """Test that 64-bit weights enter a 64-bit operator without traffic."""
        adjacency = shared_adjacency(p4, rng)

        async def program(ctx):
            return await prepare_operator(ctx, adjacency[ctx.party - 1], 0.5, ring=RING64)

        first, _ = await session.run_phase("krylov", program)
        assert first.values.ring == RING64
        assert session.transcript("krylov").total_bytes == 0


class TestReferenceKrylov:
    """Test the float64 projections."""

    def test_arnoldi_on_nonsymmetric(self, rng):
        """Test PᵀAP = H with H upper Hessenberg."""
        a = rng.standard_normal((10, 10))
        h, p = arnoldi(a, 6)
        assert np.allclose(p.T @ p, np.eye(6), atol=1e-10)
        assert np.allclose(p.T @ a @ p, h, atol=1e-10)
        assert np.allclose(np.tril(h, k=-2), 0.0)

    def test_lanczos_agrees_with_arnoldi(self, rng):
        """Test that both methods give the same H on a symmetric matrix."""
        a = rng.standard_normal((8, 8))
        a = a + a.T
        assert np.allclose(lanczos(a, 5)[0], arnoldi(a, 5)[0], atol=1e-8)

    def test_invariant_subspace_breaks_down(self):
        """Test that an exhausted Krylov space is reported."""
        with pytest.raises(BreakdownError):
            arnoldi(np.eye(4), 2)

    def test_dimension_bounds(self):
        """Test that M must lie in [2, N]."""
        with pytest.raises(InvalidParameterError):
            arnoldi(np.eye(3), 4)
        with pytest.raises(InvalidParameterError):
            lanczos(np.eye(3), 1)
