"""Unit tests for the Givens QR iteration on shares."""

import numpy as np
import pytest
from scipy.linalg import hessenberg

from src.app.commands.bench_qr import measure_qr
from src.app.core.config import QrVariant
from src.app.eigen.qr import QR_TAG, add_diagonal_shift, qr_demand, qr_matmul_elements, secure_qr
from src.app.reference.qr import qr_givens, random_hessenberg
from tests.helpers.generators import open_fixed, separated_symmetric, share_fixed

VARIANTS = [QrVariant.BASIC, QrVariant.OPTIMIZED]


async def _secure_qr(session, h, sweeps, omega, variant, rng, shift=0.0):
    shares = share_fixed(h, rng)

    async def program(ctx):
        return await secure_qr(ctx, shares[ctx.party - 1], sweeps, omega, variant, shift)

    first, second = await session.run_phase("qr", program)
    return open_fixed(first.t, second.t), open_fixed(first.s, second.s)


class TestSecureQr:
    """Test both rotation strategies against the float64 iteration."""

    @pytest.mark.asyncio
    @pytest.mark.parametrize("variant", VARIANTS)
    async def test_matches_reference(self, session, rng, variant):
        """Test T_K and S against plaintext QR with the same Newton iteration."""
        h = random_hessenberg(4, rng)
        t, s = await _secure_qr(session, h, 3, 20, variant, rng)
        t_ref, s_ref = qr_givens(h, 3, 20)
        assert np.allclose(t, t_ref, atol=1e-5)
        assert np.allclose(s, s_ref, atol=1e-5)

    @pytest.mark.asyncio
    async def test_variants_agree(self, make_session, rng):
        """Test that basic and optimized rotations give the same state on twenty random inputs."""
        for seed in range(20):
            h = random_hessenberg(4, rng)
            t_basic, s_basic = await _secure_qr(make_session(2 * seed), h, 2, 15, QrVariant.BASIC, rng)
            t_opt, s_opt = await _secure_qr(make_session(2 * seed + 1), h, 2, 15, QrVariant.OPTIMIZED, rng)
            assert np.allclose(t_basic, t_opt, atol=1e-4)
            assert np.allclose(s_basic, s_opt, atol=1e-4)

    @pytest.mark.asyncio
    @pytest.mark.parametrize("variant", VARIANTS)
    async def test_diagonal_input_is_fixed(self, session, rng, variant):
        """Test that an already diagonal matrix comes back unchanged with a signed identity as S."""
        h = np.diag([0.8, -0.5, 0.3])
        t, s = await _secure_qr(session, h, 3, 25, variant, rng)
        assert np.allclose(t, h, atol=1e-6)
        assert np.allclose(np.abs(s), np.eye(3), atol=1e-6)

    @pytest.mark.slow
    @pytest.mark.asyncio
    async def test_separated_spectrum_8x8(self, session, rng):
        """Test that sixty sweeps on an 8×8 Hessenberg matrix recover its real spectrum within 1e-2."""
        eigenvalues = [0.95, -0.8, 0.65, 0.5, 0.38, -0.25, 0.15, 0.05]
        h = hessenberg(separated_symmetric(eigenvalues, rng))
        t, _ = await _secure_qr(session, h, 60, 25, QrVariant.OPTIMIZED, rng)
        assert np.allclose(np.diag(t), eigenvalues, atol=1e-2)

    @pytest.mark.asyncio
    @pytest.mark.parametrize("variant", VARIANTS)
    async def test_matmul_elements_and_material(self, session, dealer, rng, variant):
        """Test exact rotation traffic and dealer usage."""
        await _secure_qr(session, random_hessenberg(4, rng), 2, 6, variant, rng)
        transcript = session.transcript("qr")
        assert transcript.tag(QR_TAG).elements() == qr_matmul_elements(4, 2, variant)
        assert dealer.usage() == qr_demand(4, 2, 6, variant)

    @pytest.mark.asyncio
    async def test_shift_separates_opposite_pair(self, session, rng):
        """Test that a public shift lets the iteration split eigenvalues of equal magnitude."""
        h = np.array([[0.0, 0.5], [0.5, 0.0]])
        t, _ = await _secure_qr(session, h, 20, 20, QrVariant.OPTIMIZED, rng, shift=0.3)
        assert abs(t[1, 0]) < 1e-4
        assert sorted(np.diag(t) - 0.3) == pytest.approx([-0.5, 0.5], abs=1e-4)

    @pytest.mark.asyncio
    async def test_add_diagonal_shift(self, session, rng):
        """Test that the shift is applied locally to the diagonal."""
        h = random_hessenberg(3, rng)
        shares = share_fixed(h, rng)

        async def program(ctx):
            return add_diagonal_shift(ctx, shares[ctx.party - 1], 0.25)

        first, second = await session.run_phase("shift", program)
        assert np.allclose(open_fixed(first, second), h + 0.25 * np.eye(3), atol=1e-9)
        assert session.transcript("shift").total_bytes == 0

    @pytest.mark.asyncio
    async def test_optimized_saving_at_m15(self, rng):
        """Test that the optimized variant cuts rotation traffic by more than 90% at M = 15."""
        h = random_hessenberg(15, rng)
        basic = await measure_qr(h, 1, 3, QrVariant.BASIC)
        optimized = await measure_qr(h, 1, 3, QrVariant.OPTIMIZED)
        saving = 1.0 - optimized.tag(QR_TAG).elements() / basic.tag(QR_TAG).elements()
        assert saving >= 0.90


class TestRotationCounts:
    """Test the closed-form rotation traffic."""

    def test_formulas(self):
        """Test 6K(M-1)M² against K(M-1)(6M+4)."""
        assert qr_matmul_elements(4, 2, QrVariant.BASIC) == 6 * 2 * 3 * 16
        assert qr_matmul_elements(4, 2, QrVariant.OPTIMIZED) == 2 * 3 * 28

    @pytest.mark.parametrize("m, expected", [(2, 0.33), (15, 0.91), (30, 0.96), (45, 0.97)])
    def test_savings(self, m, expected):
        """Test the relative saving of the optimized variant."""
        basic = qr_matmul_elements(m, 1, QrVariant.BASIC)
        optimized = qr_matmul_elements(m, 1, QrVariant.OPTIMIZED)
        assert abs((1.0 - optimized / basic) - expected) <= 0.05


class TestReferenceQr:
    """Test the float64 Givens iteration."""

    def test_similarity(self, rng):
        """Test that T_K = SᵀHS with S orthogonal."""
        h = random_hessenberg(5, rng)
        t, s = qr_givens(h, 4)
        assert np.allclose(s.T @ s, np.eye(5), atol=1e-12)
        assert np.allclose(s.T @ h @ s, t, atol=1e-12)

    def test_converges_on_separated_spectrum(self, rng):
        """Test that the diagonal converges to eigenvalues ordered by magnitude."""
        eigenvalues = [0.9, -0.6, 0.3, 0.1]
        h = hessenberg(separated_symmetric(eigenvalues, rng))
        t, _ = qr_givens(h, 200)
        assert np.allclose(np.diag(t), eigenvalues, atol=1e-8)

    def test_diagonal_input_is_fixed(self):
        """Test that a diagonal matrix is a fixed point of the iteration."""
        h = np.diag([0.7, -0.4, 0.2, 0.1])
        t, _ = qr_givens(h, 10)
        assert np.allclose(t, h, atol=1e-14)

    def test_tridiagonal_8x8(self, rng):
        """Test two hundred sweeps on a symmetric tridiagonal 8×8 matrix against the dense solver."""
        eigenvalues = np.array([0.95, -0.8, 0.65, 0.5, 0.38, -0.25, 0.15, 0.05])
        h = hessenberg(separated_symmetric(eigenvalues, rng))
        t, _ = qr_givens(h, 200)
        expected = np.linalg.eigvalsh(h)
        expected = expected[np.argsort(-np.abs(expected), kind="stable")]
        assert np.allclose(np.diag(t), expected, atol=1e-6)

    def test_unshifted_stalls_on_opposite_pair(self):
        """Test that eigenvalues ±λ do not separate without a shift."""
        t, _ = qr_givens(np.array([[0.0, 0.5], [0.5, 0.0]]), 50)
        assert abs(t[1, 0]) == pytest.approx(0.5)

    def test_random_hessenberg(self, rng):
        """Test the shape and norm of generated matrices."""
        h = random_hessenberg(6, rng, norm=0.5)
        assert np.allclose(np.tril(h, k=-2), 0.0)
        assert np.linalg.norm(h, 2) == pytest.approx(0.5)
