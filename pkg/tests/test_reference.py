"""Unit tests for the float64 reference solvers and accuracy metrics."""

import numpy as np
import pytest

from src.app.core.exceptions.input_exceptions import InvalidParameterError
from src.app.reference.metrics import (
    align_signs,
    eigen_residuals,
    relative_gap,
    rmse_eigenvalues,
    rmse_eigenvectors,
)
from src.app.reference.oracle import jacobi_eigh, oracle_eig, oracle_top_eigs, power_deflation
from src.app.reference.pipeline import plaintext_pipeline
from tests.helpers.generators import preferential_graph, random_symmetric, separated_symmetric


def _by_magnitude(values):
    return np.array(sorted(values, key=lambda value: -abs(value)))


class TestJacobi:
    """Test the cyclic Jacobi eigensolver."""

    def test_matches_numpy(self, rng):
        """Test eigenvalues against LAPACK and the residual of each pair."""
        a = random_symmetric(8, rng)
        values, vectors = jacobi_eigh(a)
        assert np.allclose(values, _by_magnitude(np.linalg.eigvalsh(a)), atol=1e-10)
        assert np.max(eigen_residuals(a, values, vectors)) < 1e-9
        assert np.allclose(vectors.T @ vectors, np.eye(8), atol=1e-10)

    def test_diagonal_input(self):
        """Test that a diagonal matrix is returned ordered by magnitude."""
        values, _ = jacobi_eigh(np.diag([1.0, -3.0, 2.0]))
        assert values.tolist() == [-3.0, 2.0, 1.0]


class TestOracle:
    """Test the ground-truth dispatch."""

    def test_nonsymmetric_real_spectrum(self, rng):
        """Test power iteration with deflation on a diagonalisable matrix."""
        basis = rng.standard_normal((5, 5)) + 3.0 * np.eye(5)
        a = basis @ np.diag([3.0, -2.0, 1.0, 0.5, 0.25]) @ np.linalg.inv(basis)
        values, vectors = oracle_eig(a, 2)
        assert np.allclose(values, [3.0, -2.0], atol=1e-6)
        assert np.max(eigen_residuals(a, values, vectors)) < 1e-5

    def test_power_deflation_directly(self):
        """Test the leading pair of a small upper triangular matrix."""
        values, _ = power_deflation(np.array([[2.0, 1.0], [0.0, 0.5]]), 1)
        assert values[0] == pytest.approx(2.0, abs=1e-8)

    def test_dense_limit(self):
        """Test that the dense oracle refuses more than 64 rows."""
        with pytest.raises(InvalidParameterError):
            oracle_eig(np.eye(65))

    def test_non_square(self):
        """Test that rectangular input is rejected."""
        with pytest.raises(InvalidParameterError):
            oracle_eig(np.ones((2, 3)))

    def test_sparse_top_eigs(self):
        """Test subspace iteration on a sparse graph above the dense limit."""
        adjacency = preferential_graph(200, 3, seed=5).adjacency()
        values, vectors = oracle_top_eigs(adjacency, 3)
        expected = _by_magnitude(np.linalg.eigvalsh(adjacency.toarray()))[:3]
        assert np.allclose(values, expected, rtol=1e-6)
        assert np.max(eigen_residuals(adjacency, values, vectors)) < 1e-3

    def test_small_sparse_uses_dense_path(self, small_pa_graph):
        """Test that graphs within the dense limit go through Jacobi."""
        values, _ = oracle_top_eigs(small_pa_graph.adjacency(), 2)
        expected = _by_magnitude(np.linalg.eigvalsh(small_pa_graph.adjacency().toarray()))[:2]
        assert np.allclose(values, expected, atol=1e-9)


class TestMetrics:
    """Test accuracy measures."""

    def test_rmse_eigenvalues(self):
        """Test the root mean square over the leading pairs."""
        assert rmse_eigenvalues([1.0, 2.0, 9.0], [1.0, 4.0, 0.0], 2) == pytest.approx(np.sqrt(2.0))

    def test_too_few_values(self):
        """Test that k cannot exceed the available values."""
        with pytest.raises(InvalidParameterError):
            rmse_eigenvalues([1.0], [1.0, 2.0], 2)

    def test_sign_alignment(self, rng):
        """Test that flipped eigenvectors count as exact."""
        truth, _ = np.linalg.qr(rng.standard_normal((6, 3)))
        estimate = truth * np.array([-1.0, 1.0, -1.0])
        assert np.allclose(align_signs(estimate, truth), truth)
        assert rmse_eigenvectors(estimate, truth, 3) == pytest.approx(0.0, abs=1e-12)

    def test_relative_gap(self):
        """Test the relative difference and its zero-reference fallback."""
        assert relative_gap(1.1, 1.0) == pytest.approx(0.1)
        assert relative_gap(0.5, 0.0) == 0.5

    def test_residuals(self):
        """Test that exact pairs have zero residual."""
        a = np.diag([2.0, 1.0])
        assert np.allclose(eigen_residuals(a, [2.0, 1.0], np.eye(2)), 0.0)


class TestPlaintextPipeline:
    """Test the float64 run of project, QR and read-out."""

    EIGENVALUES = [8.0, -5.0, 3.0, 1.5, 0.8, 0.4, 0.2, 0.1]

    def test_full_projection(self, rng):
        """Test that a full-dimension projection recovers the leading spectrum."""
        a = separated_symmetric(self.EIGENVALUES, rng)
        result = plaintext_pipeline(a, 8, 200, 1.0 / 8.0, 3)
        assert np.allclose(result.eigenvalues, [8.0, -5.0, 3.0], atol=1e-6)
        assert np.max(eigen_residuals(a, result.eigenvalues, result.eigenvectors)) < 1e-5

    def test_newton_variant_tracks_exact(self, rng):
        """Test that Newton coefficients barely move the result."""
        a = separated_symmetric(self.EIGENVALUES, rng)
        exact = plaintext_pipeline(a, 6, 100, 1.0 / 8.0, 2)
        newton = plaintext_pipeline(a, 6, 100, 1.0 / 8.0, 2, omega=30)
        assert np.allclose(exact.eigenvalues, newton.eigenvalues, atol=1e-6)
