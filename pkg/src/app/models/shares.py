"""One party's view of a secret-shared value."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core.exceptions.protocol_exceptions import DimensionMismatchError, ProtocolError
from ..mpc.ring import Ring

LEADER = 1


@dataclass(frozen=True)
class ArithShare:
    """Additive share over ``ring``: share of party 1 plus share of party 2 is the secret mod 2^l."""

    party: int
    ring: Ring
    value: NDArray

    def __post_init__(self) -> None:
        if self.party not in (1, 2):
            raise ProtocolError(f"party must be 1 or 2, got {self.party}")

    @classmethod
    def public(cls, party: int, ring: Ring, value: ArrayLike) -> ArithShare:
        """Trivial sharing of a public constant: party 1 holds it, party 2 holds zero."""
        reduced = ring.reduce(value)
        if party == LEADER:
            return cls(party, ring, reduced)
        return cls(party, ring, ring.zeros(reduced.shape))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(np.shape(self.value))

    @property
    def size(self) -> int:
        return int(np.size(self.value))

    @property
    def T(self) -> ArithShare:
        return ArithShare(self.party, self.ring, np.asarray(self.value).T)

    def _check(self, other: ArithShare) -> None:
        if other.party != self.party or other.ring != self.ring:
            raise ProtocolError(f"Cannot combine share of party {other.party} over {other.ring!r} with {self!r}")

    def __add__(self, other: ArithShare) -> ArithShare:
        self._check(other)
        return ArithShare(self.party, self.ring, self.ring.add(self.value, other.value))

    def __sub__(self, other: ArithShare) -> ArithShare:
        self._check(other)
        return ArithShare(self.party, self.ring, self.ring.sub(self.value, other.value))

    def __neg__(self) -> ArithShare:
        return ArithShare(self.party, self.ring, self.ring.neg(self.value))

    def __getitem__(self, index: Any) -> ArithShare:
        return ArithShare(self.party, self.ring, np.asarray(self.value)[index])

    def __repr__(self) -> str:
        return f"ArithShare(party={self.party}, ring={self.ring!r}, shape={self.shape})"

    def add_public(self, constant: ArrayLike) -> ArithShare:
        """Add a public value; only party 1 changes its share."""
        if self.party != LEADER:
            return self
        return ArithShare(self.party, self.ring, self.ring.add(self.value, self.ring.reduce(constant)))

    def mul_public(self, constant: ArrayLike) -> ArithShare:
        """Multiply by a public ring element (no truncation)."""
        return ArithShare(self.party, self.ring, self.ring.mul(self.value, self.ring.reduce(constant)))

    def reshape(self, shape: tuple[int, ...]) -> ArithShare:
        return ArithShare(self.party, self.ring, np.asarray(self.value).reshape(shape))

    def with_value(self, value: NDArray) -> ArithShare:
        return ArithShare(self.party, self.ring, value)

    def set_item(self, index: Any, other: ArithShare) -> ArithShare:
        """Copy of this share with ``other`` written at ``index``."""
        self._check(other)
        out = np.array(self.value, dtype=self.ring.dtype, copy=True)
        out[index] = other.value
        return ArithShare(self.party, self.ring, out)

    @staticmethod
    def stack(shares: list[ArithShare], axis: int = 0) -> ArithShare:
        first = shares[0]
        for share in shares[1:]:
            first._check(share)
        return ArithShare(first.party, first.ring, np.stack([s.value for s in shares], axis=axis))

    @staticmethod
    def concat(shares: list[ArithShare]) -> ArithShare:
        first = shares[0]
        for share in shares[1:]:
            first._check(share)
        return ArithShare(first.party, first.ring, np.concatenate([np.ravel(s.value) for s in shares]))


@dataclass(frozen=True)
class BinShare:
    """XOR share of bits, stored as ``uint8`` zeros and ones."""

    party: int
    bits: NDArray

    def __post_init__(self) -> None:
        if self.party not in (1, 2):
            raise ProtocolError(f"party must be 1 or 2, got {self.party}")

    @classmethod
    def public(cls, party: int, bits: ArrayLike) -> BinShare:
        arr = np.asarray(bits, dtype=np.uint8) & 1
        return cls(party, arr if party == LEADER else np.zeros_like(arr))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(np.shape(self.bits))

    @property
    def size(self) -> int:
        return int(np.size(self.bits))

    def __xor__(self, other: BinShare) -> BinShare:
        if other.party != self.party:
            raise ProtocolError("Cannot XOR shares held by different parties")
        if other.shape != self.shape:
            raise DimensionMismatchError(f"XOR of shapes {self.shape} and {other.shape}")
        return BinShare(self.party, np.bitwise_xor(self.bits, other.bits))

    def __getitem__(self, index: Any) -> BinShare:
        return BinShare(self.party, np.asarray(self.bits)[index])

    def __repr__(self) -> str:
        return f"BinShare(party={self.party}, shape={self.shape})"

    def xor_public(self, bits: ArrayLike) -> BinShare:
        if self.party != LEADER:
            return self
        return BinShare(self.party, np.bitwise_xor(self.bits, np.asarray(bits, dtype=np.uint8)))

    def and_public(self, bits: ArrayLike) -> BinShare:
        return BinShare(self.party, np.bitwise_and(self.bits, np.asarray(bits, dtype=np.uint8)))
