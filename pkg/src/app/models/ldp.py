from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.typing import NDArray

from ..core.exceptions.input_exceptions import InvalidParameterError


@dataclass(frozen=True)
class LapParams:
    """Parameters of the truncated discrete Laplace mechanism for one bin."""

    epsilon: float
    delta: float
    sensitivity: int

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise InvalidParameterError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise InvalidParameterError(f"delta must lie in (0, 1), got {self.delta}")
        if self.sensitivity < 0:
            raise InvalidParameterError(f"sensitivity must be non-negative, got {self.sensitivity}")

    @property
    def decay(self) -> float:
        """``q = e^{-epsilon/Delta}``, the ratio between neighbouring pmf values."""
        return float(np.exp(-self.epsilon / self.sensitivity)) if self.sensitivity else 0.0

    @cached_property
    def mu(self) -> float:
        """Mean that makes ``Pr[noise < 0]`` at most ``1 - (1 - delta)^{1/Delta}``.

        ``mu = -Delta · ln[(e^{eps/Delta} + 1)(1 - (1 - delta)^{1/Delta})] / eps``, evaluated in log space
        and clamped at 0 (the formula goes negative as ``delta`` approaches 1). ``Delta = 0`` gives 0.
        """
        if self.sensitivity == 0:
            return 0.0
        rate = self.epsilon / self.sensitivity
        log_tail = math.log(-math.expm1(math.log1p(-self.delta) / self.sensitivity))
        return max(float(-(np.logaddexp(rate, 0.0) + log_tail) / rate), 0.0)


@dataclass(frozen=True)
class BinningMap:
    """Bit string over degrees ``1..d_max``; a 1 at position ``d`` closes a bin at degree ``d``."""

    bits: NDArray = field(compare=False)

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1 or bits.size == 0 or np.any(bits > 1):
            raise InvalidParameterError("A binning map is a non-empty 0/1 vector")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, text: str) -> BinningMap:
        if not text or set(text) - {"0", "1"}:
            raise InvalidParameterError(f"Invalid binning map string '{text}'")
        return cls(np.array([int(c) for c in text], dtype=np.uint8))

    @classmethod
    def single_bin(cls, d_max: int) -> BinningMap:
        bits = np.zeros(d_max, dtype=np.uint8)
        bits[-1] = 1
        return cls(bits)

    @property
    def d_max(self) -> int:
        return int(self.bits.size)

    def to_string(self) -> str:
        return "".join(str(int(b)) for b in self.bits)

    @cached_property
    def intervals(self) -> list[tuple[int, int]]:
        """Closed 1-based degree intervals ``[L_j, U_j]`` partitioning ``[1, d_max]``."""
        out, start = [], 1
        for degree in np.flatnonzero(self.bits) + 1:
            out.append((start, int(degree)))
            start = int(degree) + 1
        if start <= self.d_max:
            out.append((start, self.d_max))
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BinningMap) and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash(self.to_string())


@dataclass(frozen=True)
class LocalView:
    """One user's encrypted row: shuffled columns with a weight share for each server.

    ``true_degree`` stays on the user's side; only columns and shares leave the device.
    """

    row: int
    columns: NDArray
    shares: tuple[NDArray, NDArray]
    true_degree: int

    @property
    def noisy_count(self) -> int:
        return int(self.columns.size)

    def share_for(self, party: int) -> NDArray:
        return self.shares[party - 1]
