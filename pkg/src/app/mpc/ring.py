"""Arithmetic in Z_2^l and two's-complement fixed-point encoding.

Rings up to 64 bits are backed by ``uint64`` arrays (wrapping is free); the 128-bit ring used for
fixed-point intermediates is backed by object arrays of Python ints reduced after every operation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core.config import settings
from ..core.exceptions.numeric_exceptions import RingRangeError
from ..core.exceptions.protocol_exceptions import DimensionMismatchError

_SUPPORTED_BITS = (8, 16, 32, 64, 128)
_U64_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class Ring:
    bits: int

    def __post_init__(self) -> None:
        if self.bits not in _SUPPORTED_BITS:
            raise ValueError(f"Unsupported ring width {self.bits}; expected one of {_SUPPORTED_BITS}")

    @property
    def modulus(self) -> int:
        return 1 << self.bits

    @property
    def mask(self) -> int:
        return self.modulus - 1

    @property
    def wide(self) -> bool:
        return self.bits > 64

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(object) if self.wide else np.dtype(np.uint64)

    @property
    def element_bytes(self) -> int:
        return self.bits // 8

    def __repr__(self) -> str:
        return f"Ring(2^{self.bits})"

    def reduce(self, values: ArrayLike) -> NDArray:
        """Map integers of any sign (or arrays of them) to canonical representatives in [0, 2^l)."""
        arr = np.asarray(values)
        if self.wide:
            if arr.dtype != object:
                if arr.dtype.kind not in "iub":
                    raise TypeError(f"Cannot reduce {arr.dtype} values into {self!r}")
                arr = arr.astype(object)
            return np.asarray(arr & self.mask, dtype=object)
        if arr.dtype == object:
            arr = np.asarray(arr & _U64_MASK, dtype=object).astype(np.uint64)
        elif arr.dtype.kind == "i":
            arr = arr.astype(np.int64).astype(np.uint64)
        elif arr.dtype.kind in "ub":
            arr = arr.astype(np.uint64)
        else:
            raise TypeError(f"Cannot reduce {arr.dtype} values into {self!r}")
        if self.bits < 64:
            arr = arr & np.uint64(self.mask)
        return arr

    def _wrap(self, value: Any) -> NDArray:
        if self.wide:
            return np.asarray(np.asarray(value, dtype=object) & self.mask, dtype=object)
        arr = np.asarray(value, dtype=np.uint64)
        if self.bits < 64:
            arr = arr & np.uint64(self.mask)
        return arr

    def zeros(self, shape: int | tuple[int, ...]) -> NDArray:
        if self.wide:
            out = np.empty(shape, dtype=object)
            out.fill(0)
            return out
        return np.zeros(shape, dtype=np.uint64)

    def add(self, a: NDArray, b: NDArray) -> NDArray:
        with np.errstate(over="ignore"):
            return self._wrap(np.add(a, b))

    def sub(self, a: NDArray, b: NDArray) -> NDArray:
        with np.errstate(over="ignore"):
            return self._wrap(np.subtract(a, b))

    def neg(self, a: NDArray) -> NDArray:
        if self.wide:
            return self._wrap(-np.asarray(a, dtype=object))
        with np.errstate(over="ignore"):
            return self._wrap(np.subtract(np.uint64(0), a))

    def mul(self, a: NDArray, b: NDArray) -> NDArray:
        with np.errstate(over="ignore"):
            return self._wrap(np.multiply(a, b))

    def matmul(self, a: NDArray, b: NDArray) -> NDArray:
        with np.errstate(over="ignore"):
            return self._wrap(np.matmul(a, b))

    def sum(self, a: NDArray, axis: int | None = None) -> NDArray:
        with np.errstate(over="ignore"):
            return self._wrap(np.sum(a, axis=axis))

    def scatter_add(self, index: NDArray, values: NDArray, size: int) -> NDArray:
        """Accumulate ``values`` into a length-``size`` vector at positions ``index``."""
        out = self.zeros(size)
        with np.errstate(over="ignore"):
            np.add.at(out, index, values)
        return self._wrap(out)

    def shift_right(self, a: NDArray, amount: int) -> NDArray:
        """Logical right shift of canonical representatives."""
        if self.wide:
            return np.asarray(np.asarray(a, dtype=object) >> amount, dtype=object)
        return np.asarray(a, dtype=np.uint64) >> np.uint64(amount)

    def shift_left(self, a: NDArray, amount: int) -> NDArray:
        if self.wide:
            return self._wrap(np.asarray(a, dtype=object) << amount)
        with np.errstate(over="ignore"):
            return self._wrap(np.asarray(a, dtype=np.uint64) << np.uint64(amount))

    def to_signed(self, a: NDArray) -> NDArray:
        """Two's-complement reading: int64 for rings up to 64 bits, Python ints for wider rings."""
        half = 1 << (self.bits - 1)
        if self.wide:
            arr = np.asarray(a, dtype=object)
            return np.asarray(np.where(arr >= half, arr - self.modulus, arr), dtype=object)
        arr = np.asarray(a, dtype=np.uint64)
        if self.bits == 64:
            return arr.astype(np.int64)
        signed = arr.astype(np.int64)
        return np.where(signed >= half, signed - self.modulus, signed)

    def random(self, rng: np.random.Generator, shape: int | tuple[int, ...] = ()) -> NDArray:
        """Uniform ring elements drawn from ``rng``."""
        count = int(np.prod(shape, dtype=np.int64))
        limbs = 2 if self.wide else 1
        raw = np.frombuffer(rng.bytes(8 * count * limbs), dtype="<u8").astype(np.uint64)
        if self.wide:
            pairs = raw.reshape(count, 2).astype(object)
            values = pairs[:, 0] | (pairs[:, 1] << 64)
            return np.asarray(values, dtype=object).reshape(shape)
        if self.bits < 64:
            raw = raw & np.uint64(self.mask)
        return raw.reshape(shape)

    def random_below(self, rng: np.random.Generator, shape: int | tuple[int, ...], nbits: int) -> NDArray:
        """Uniform values in [0, 2^nbits) represented in this ring."""
        if not 0 < nbits <= self.bits:
            raise ValueError(f"nbits must lie in (0, {self.bits}]")
        return self.shift_right(self.random(rng, shape), self.bits - nbits)

    def to_bytes(self, a: NDArray) -> bytes:
        flat = np.ascontiguousarray(a).ravel()
        if self.wide:
            lo = np.asarray(flat & _U64_MASK, dtype=object).astype(np.uint64)
            hi = np.asarray(flat >> 64, dtype=object).astype(np.uint64)
            return np.stack([lo, hi], axis=-1).astype("<u8").tobytes()
        return flat.astype(f"<u{self.element_bytes}").tobytes()

    def from_bytes(self, data: bytes, shape: int | tuple[int, ...]) -> NDArray:
        count = int(np.prod(shape, dtype=np.int64))
        if len(data) != count * self.element_bytes:
            raise DimensionMismatchError(
                f"Expected {count * self.element_bytes} bytes for {count} elements of {self!r}, got {len(data)}"
            )
        if self.wide:
            pairs = np.frombuffer(data, dtype="<u8").reshape(count, 2).astype(object)
            return np.asarray(pairs[:, 0] | (pairs[:, 1] << 64), dtype=object).reshape(shape)
        return np.frombuffer(data, dtype=f"<u{self.element_bytes}").astype(np.uint64).reshape(shape)

    def convert(self, a: NDArray, source: Ring, signed: bool = True) -> NDArray:
        """Re-read values from ``source`` in this ring (sign-extending by default)."""
        values = source.to_signed(a) if signed else np.asarray(a).astype(object)
        return self.reduce(values)


RING32 = Ring(32)
RING64 = Ring(64)
RING128 = Ring(128)

FRACTIONAL_BITS = settings.FRACTIONAL_BITS


def encode(x: ArrayLike, fractional_bits: int = FRACTIONAL_BITS, ring: Ring = RING64) -> NDArray:
    """Round ``x·2^t`` half away from zero and reduce into ``ring``."""
    values = np.asarray(x, dtype=np.float64)
    limit = 2.0 ** (ring.bits - fractional_bits - 1)
    if not np.all(np.isfinite(values)) or np.any(np.abs(values) >= limit):
        raise RingRangeError(f"|x| must be below 2^{ring.bits - fractional_bits - 1} for t={fractional_bits}")
    scaled = np.floor(np.abs(values) * 2.0**fractional_bits + 0.5) * np.sign(values)
    if np.all(np.abs(scaled) < 2.0**63):
        ints: NDArray = scaled.astype(np.int64)
    else:
        ints = np.array([int(v) for v in scaled.ravel()], dtype=object).reshape(scaled.shape)
    return ring.reduce(ints)


def decode(r: ArrayLike, fractional_bits: int = FRACTIONAL_BITS, ring: Ring = RING64) -> NDArray:
    """Signed two's-complement reading of ``r`` divided by ``2^t``."""
    signed = ring.to_signed(ring.reduce(r))
    return np.asarray(signed).astype(np.float64) / 2.0**fractional_bits
