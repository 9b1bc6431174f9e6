"""Unit tests for run configuration."""

import pytest
from pydantic import ValidationError

from src.app.core.config import (
    CompareBackendOption,
    KrylovMethod,
    QrVariant,
    RunConfig,
    eigen_fractional_bits,
    get_config,
    load_run_config,
    settings,
)


class TestRunConfig:
    """Test defaults and validation."""

    def test_defaults(self):
        """Test the documented default parameters."""
        config = RunConfig()
        assert (config.epsilon, config.delta, config.bins, config.sample_rate) == (1.0, 1e-6, 10, 0.10)
        assert (config.m, config.top_k, config.omega, config.sweeps) == (15, 3, 25, 100)
        assert config.d_max is None
        assert config.qr_variant is QrVariant.OPTIMIZED
        assert config.krylov is KrylovMethod.ARNOLDI
        assert config.compare_backend is CompareBackendOption.AUTO
        assert (config.qr_shift, config.ring_bits) == (0.05, 128)
        assert config.resolve_fractional_bits() == settings.FRACTIONAL_BITS

    def test_default_degree_bound(self):
        """Test d_max = N / 20 with a floor of one."""
        assert RunConfig().resolve_d_max(2000) == 100
        assert RunConfig().resolve_d_max(10) == 1
        assert RunConfig(d_max=7).resolve_d_max(2000) == 7

    def test_top_k_above_m(self):
        """Test that more pairs than the Krylov dimension are rejected."""
        with pytest.raises(ValidationError, match="top_k"):
            RunConfig(m=3, top_k=4)

    @pytest.mark.parametrize("field, value", [("epsilon", 0.0), ("delta", 1.0), ("sample_rate", 1.5), ("m", 1)])
    def test_out_of_range(self, field, value):
        """Test field bounds."""
        with pytest.raises(ValidationError):
            RunConfig(**{field: value})

    def test_backend_resolution(self):
        """Test that auto picks FSS above the latency crossover and ASS below it."""
        crossover = settings.COMPARE_CROSSOVER_MS
        assert RunConfig(latency_ms=crossover + 1).resolve_backend() is CompareBackendOption.FSS
        assert RunConfig(latency_ms=0.0).resolve_backend() is CompareBackendOption.ASS
        assert RunConfig(compare_backend="fss").resolve_backend() is CompareBackendOption.FSS


    def test_ring_width(self):
        """Test the fixed-point precision that goes with each eigen ring."""
        assert RunConfig(ring_bits=64).resolve_fractional_bits() == settings.NARROW_FRACTIONAL_BITS
        assert eigen_fractional_bits(128) == settings.FRACTIONAL_BITS
        with pytest.raises(ValidationError, match="ring_bits"):
            RunConfig(ring_bits=96)


class TestGetConfig:
    """Test reading single settings from the environment."""

    def test_cast(self, monkeypatch):
        """Test that a present value is cast."""
        monkeypatch.setenv("SGE_SOME_BITS", "24")
        assert get_config("SOME_BITS", default=1, cast=int) == 24

    def test_default_when_absent(self):
        """Test the fallback for an unset key."""
        assert get_config("NOT_SET_ANYWHERE", default=3, cast=int) == 3

    def test_invalid_value_raises(self, monkeypatch):
        """Test that a value that cannot be cast is an error, not a silent default."""
        monkeypatch.setenv("SGE_SOME_BITS", "abc")
        with pytest.raises(ValueError, match="SGE_SOME_BITS"):
            get_config("SOME_BITS", default=1, cast=int)


class TestLoadRunConfig:
    """Test precedence of file, environment and explicit overrides."""

    def test_file_values(self, tmp_path):
        """Test that a flat KEY=value file sets fields."""
        path = tmp_path / "run.env"
        path.write_text("M=8\nSGE_TOP_K=2\nqr_variant=basic\n")
        config = load_run_config(str(path))
        assert (config.m, config.top_k, config.qr_variant) == (8, 2, QrVariant.BASIC)

    def test_environment_beats_file(self, tmp_path, monkeypatch):
        """Test that SGE_* variables override the file."""
        path = tmp_path / "run.env"
        path.write_text("OMEGA=10\nSWEEPS=20\n")
        monkeypatch.setenv("SGE_OMEGA", "12")
        config = load_run_config(str(path))
        assert (config.omega, config.sweeps) == (12, 20)

    def test_overrides_beat_everything(self, tmp_path, monkeypatch):
        """Test that explicit flags win and unset flags are ignored."""
        path = tmp_path / "run.env"
        path.write_text("OMEGA=10\n")
        monkeypatch.setenv("SGE_OMEGA", "12")
        config = load_run_config(str(path), {"omega": 14, "bins": None})
        assert config.omega == 14
        assert config.bins == 10

    def test_missing_file(self, tmp_path):
        """Test that a missing config file is reported."""
        with pytest.raises(FileNotFoundError):
            load_run_config(str(tmp_path / "absent.env"))
