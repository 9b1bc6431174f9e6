import argparse
import sys
from pathlib import Path
from typing import Any

from ..core.config import CompareBackendOption, ExecutionMode, KrylovMethod, QrVariant, RunConfig, load_run_config
from ..core.logger import logging
from ..schemas.report import RunReport

logger = logging.getLogger(__name__)

# flag name -> RunConfig field
RUN_CONFIG_FLAGS: dict[str, str] = {
    "--epsilon": "epsilon",
    "--delta": "delta",
    "--bins": "bins",
    "--sample-rate": "sample_rate",
    "--d-max": "d_max",
    "--m": "m",
    "--top-k": "top_k",
    "--omega": "omega",
    "--k": "sweeps",
    "--compare-backend": "compare_backend",
    "--qr-variant": "qr_variant",
    "--krylov": "krylov",
    "--latency-ms": "latency_ms",
    "--seed": "seed",
    "--qr-shift": "qr_shift",
    "--convergence-tol": "convergence_tol",
    "--max-weight": "max_weight",
    "--execution-mode": "execution_mode",
    "--ring-bits": "ring_bits",
}

_TYPES: dict[str, Any] = {
    "epsilon": float,
    "delta": float,
    "bins": int,
    "sample_rate": float,
    "d_max": int,
    "m": int,
    "top_k": int,
    "omega": int,
    "sweeps": int,
    "compare_backend": CompareBackendOption,
    "qr_variant": QrVariant,
    "krylov": KrylovMethod,
    "latency_ms": float,
    "seed": int,
    "qr_shift": float,
    "convergence_tol": float,
    "max_weight": float,
    "execution_mode": ExecutionMode,
    "ring_bits": int,
}


def int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat KEY=value file with RunConfig fields")
    parser.add_argument("--out", help="report path (line-delimited JSON); stdout when omitted")


def add_run_config_arguments(parser: argparse.ArgumentParser, skip: tuple[str, ...] = ()) -> None:
    """One optional flag per RunConfig field; unset flags leave the field to the file, env or default."""
    for flag, name in RUN_CONFIG_FLAGS.items():
        if flag in skip:
            continue
        kind = _TYPES[name]
        choices = [option.value for option in kind] if isinstance(kind, type) and issubclass(kind, str) else None
        parser.add_argument(
            flag,
            dest=name,
            type=str if choices else kind,
            choices=choices,
            default=None,
            help=f"RunConfig.{name}",
        )
    if "--k" not in skip:
        parser.add_argument("--sweeps", dest="sweeps", type=int, default=None, help="alias of --k")


def config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {name: getattr(args, name, None) for name in _TYPES}
    return load_run_config(getattr(args, "config", None), overrides)


def write_report(report: RunReport, out: str | None) -> None:
    text = report.to_lines()
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    logger.info(f"Report with {len(report.records)} records written to {path}")
