import os
from enum import Enum
from typing import Annotated, Any

from dotenv import dotenv_values
from pydantic import Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

ENV_PREFIX = "SGE_"
EIGEN_RING_BITS = (64, 128)

current_file_dir = os.path.dirname(os.path.realpath(__file__))
env_path = os.path.join(current_file_dir, "..", "..", ".env")
_env_file_values: dict[str, str | None] = dotenv_values(env_path) if os.path.exists(env_path) else {}


def get_config(key: str, default: Any = None, cast: Any = None) -> Any:
    """Read ``SGE_<key>`` from the environment, then the project ``.env`` file, falling back to ``default``."""
    name = f"{ENV_PREFIX}{key}"
    raw = os.environ.get(name, _env_file_values.get(name))
    if raw is None:
        return default
    if cast is None:
        return raw
    if cast is bool:
        return str(raw).lower() in ("true", "1", "yes", "on")
    try:
        return cast(raw)
    except (TypeError, ValueError):
        raise ValueError(f"Config '{name}' has value '{raw}'. Not a valid {getattr(cast, '__name__', cast)}.") from None


class TruncationMode(str, Enum):
    DEALER = "dealer"
    LOCAL = "local"


class ExecutionMode(str, Enum):
    INTERLEAVED = "interleaved"
    THREADED = "threaded"


class ProtocolSettings(BaseSettings):
    """Fixed-point and FSS parameters shared by every protocol."""

    FRACTIONAL_BITS: int = get_config("FRACTIONAL_BITS", default=32, cast=int)
    NARROW_FRACTIONAL_BITS: int = get_config("NARROW_FRACTIONAL_BITS", default=20, cast=int)
    SECURITY_PARAMETER: int = get_config("SECURITY_PARAMETER", default=128, cast=int)
    TRUNCATION_MODE: TruncationMode = get_config("TRUNCATION_MODE", default=TruncationMode.DEALER, cast=TruncationMode)
    WEIGHT_FRACTIONAL_BITS: int = get_config("WEIGHT_FRACTIONAL_BITS", default=0, cast=int)
    NEWTON_INITIAL_GUESS: float = get_config("NEWTON_INITIAL_GUESS", default=0.5, cast=float)


class HarnessSettings(BaseSettings):
    EXECUTION_MODE: ExecutionMode = get_config("EXECUTION_MODE", default=ExecutionMode.INTERLEAVED, cast=ExecutionMode)
    DEBUG_ORACLES: bool = get_config("DEBUG_ORACLES", default=False, cast=bool)
    COMPARE_CROSSOVER_MS: float = get_config("COMPARE_CROSSOVER_MS", default=2.0, cast=float)
    RECV_POLL_SECONDS: float = get_config("RECV_POLL_SECONDS", default=0.5, cast=float)


class LoggingSettings(BaseSettings):
    LOG_LEVEL: str = get_config("LOG_LEVEL", default="INFO")
    LOG_TO_FILE: bool = get_config("LOG_TO_FILE", default=True, cast=bool)


class Settings(
    ProtocolSettings,
    HarnessSettings,
    LoggingSettings,
):
    pass


settings = Settings()


class CompareBackendOption(str, Enum):
    FSS = "fss"
    ASS = "ass"
    AUTO = "auto"


def resolve_compare_backend(backend: CompareBackendOption, latency_ms: float) -> CompareBackendOption:
    """``auto`` resolves to FSS above the latency crossover and to ASS at or below it."""
    if backend is not CompareBackendOption.AUTO:
        return backend
    return CompareBackendOption.FSS if latency_ms > settings.COMPARE_CROSSOVER_MS else CompareBackendOption.ASS


def eigen_fractional_bits(ring_bits: int) -> int:
    """Fractional bits of the eigen stage: ``FRACTIONAL_BITS`` over Z_2^128, the narrow setting over Z_2^64."""
    if ring_bits not in EIGEN_RING_BITS:
        raise ValueError(f"ring_bits must be one of {EIGEN_RING_BITS}, got {ring_bits}")
    return settings.FRACTIONAL_BITS if ring_bits == 128 else settings.NARROW_FRACTIONAL_BITS


class QrVariant(str, Enum):
    BASIC = "basic"
    OPTIMIZED = "optimized"


class KrylovMethod(str, Enum):
    ARNOLDI = "arnoldi"
    LANCZOS = "lanczos"


class RunConfig(BaseSettings):
    """Parameters of one end-to-end run.

    Precedence, lowest first: field defaults, the ``--config`` file, ``SGE_*`` environment variables,
    explicit command-line flags.
    """

    model_config = SettingsConfigDict(env_prefix=ENV_PREFIX, extra="ignore")

    epsilon: Annotated[float, Field(gt=0, default=1.0)]
    delta: Annotated[float, Field(gt=0, lt=1, default=1e-6)]
    bins: Annotated[int, Field(ge=1, default=10)]
    sample_rate: Annotated[float, Field(gt=0, le=1, default=0.10)]
    d_max: Annotated[int | None, Field(ge=1, default=None)]
    m: Annotated[int, Field(ge=2, default=15)]
    top_k: Annotated[int, Field(ge=1, default=3)]
    omega: Annotated[int, Field(ge=1, default=25)]
    sweeps: Annotated[int, Field(ge=1, default=100)]
    compare_backend: CompareBackendOption = CompareBackendOption.AUTO
    qr_variant: QrVariant = QrVariant.OPTIMIZED
    krylov: KrylovMethod = KrylovMethod.ARNOLDI
    latency_ms: Annotated[float, Field(ge=0, default=0.0)]
    seed: int = 0
    qr_shift: float = 0.05
    convergence_tol: Annotated[float, Field(gt=0, default=1e-2)]
    max_weight: Annotated[float, Field(gt=0, default=1.0)]
    execution_mode: ExecutionMode = settings.EXECUTION_MODE
    ring_bits: Annotated[int, Field(default=128)]

    @field_validator("ring_bits")
    @classmethod
    def check_ring_bits(cls, value: int) -> int:
        eigen_fractional_bits(value)
        return value

    @model_validator(mode="after")
    def check_top_k(self) -> "RunConfig":
        if self.top_k > self.m:
            raise ValueError(f"top_k ({self.top_k}) cannot exceed the Krylov dimension m ({self.m})")
        return self

    def resolve_d_max(self, n_nodes: int) -> int:
        return self.d_max if self.d_max is not None else max(1, n_nodes // 20)

    def resolve_backend(self) -> CompareBackendOption:
        return resolve_compare_backend(self.compare_backend, self.latency_ms)

    def resolve_fractional_bits(self) -> int:
        return eigen_fractional_bits(self.ring_bits)


def load_run_config(config_file: str | None = None, overrides: dict[str, Any] | None = None) -> RunConfig:
    """Build a RunConfig from an optional flat ``KEY=value`` file plus explicit overrides."""
    values: dict[str, Any] = {}
    if config_file is not None:
        if not os.path.exists(config_file):
            raise FileNotFoundError(f"Config file not found: {config_file}")
        for key, value in dotenv_values(config_file).items():
            name = key.lower().removeprefix(ENV_PREFIX.lower())
            if f"{ENV_PREFIX}{name.upper()}" in os.environ or value is None:
                continue
            values[name] = value
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    return RunConfig(**values)
