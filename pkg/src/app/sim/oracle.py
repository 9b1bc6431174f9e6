"""Simulation-only checks that look at reconstructed intermediates.

Oblivious protocols cannot branch on secret values, so conditions such as a non-positive input to the
inverse square root or a vanishing Krylov norm go unnoticed during execution. When enabled, the
oracle pairs the two parties' shares of a labelled intermediate and records a flag. It never touches
the inter-server channel.
"""

from __future__ import annotations

import threading
from collections import defaultdict
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ..core.logger import logging
from ..mpc.ring import Ring, decode

logger = logging.getLogger(__name__)

INV_SQRT_INPUT = "inv_sqrt_input"
KRYLOV_NORM = "krylov_norm"
BREAKDOWN_THRESHOLD = 1e-6


@dataclass(frozen=True)
class OracleFlag:
    label: str
    occurrence: int
    value: float
    reason: str


class DebugOracle:
    def __init__(self, breakdown_threshold: float = BREAKDOWN_THRESHOLD) -> None:
        self.breakdown_threshold = breakdown_threshold
        self.flags: list[OracleFlag] = []
        self._lock = threading.Lock()
        self._counts: dict[tuple[int, str], int] = defaultdict(int)
        self._halves: dict[tuple[str, int], NDArray] = {}

    def observe(self, party: int, label: str, ring: Ring, value: NDArray, fractional_bits: int) -> None:
        with self._lock:
            occurrence = self._counts[(party, label)]
            self._counts[(party, label)] += 1
            other = self._halves.pop((label, occurrence), None)
            if other is None:
                self._halves[(label, occurrence)] = np.asarray(value)
                return
            secret = decode(ring.add(other, value), fractional_bits, ring)
            self._check(label, occurrence, secret)

    def _check(self, label: str, occurrence: int, secret: NDArray) -> None:
        for entry in np.ravel(secret):
            if label == INV_SQRT_INPUT and entry <= 0:
                self._flag(label, occurrence, float(entry), "non-positive input to inverse square root")
            elif label == KRYLOV_NORM and np.sqrt(max(entry, 0.0)) < self.breakdown_threshold:
                self._flag(label, occurrence, float(entry), "Krylov breakdown (vanishing residual norm)")

    def _flag(self, label: str, occurrence: int, value: float, reason: str) -> None:
        logger.warning(f"Debug oracle: {reason} at {label}#{occurrence} (value={value:.3e})")
        self.flags.append(OracleFlag(label, occurrence, value, reason))

    def flagged(self, label: str | None = None) -> list[OracleFlag]:
        return [flag for flag in self.flags if label is None or flag.label == label]
