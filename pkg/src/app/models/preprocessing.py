"""One party's half of the dealer's offline material. Every item is single-use."""

from __future__ import annotations

from dataclasses import dataclass, field

from numpy.typing import NDArray

from ..core.exceptions.protocol_exceptions import DimensionMismatchError, ProtocolError, TripleReuseError
from .shares import ArithShare, BinShare

LAYOUT_LEFT = "left"
LAYOUT_LEFT_TRANSPOSED = "left_t"
LAYOUT_RIGHT = "right"
LAYOUTS = (LAYOUT_LEFT, LAYOUT_LEFT_TRANSPOSED, LAYOUT_RIGHT)


@dataclass
class SingleUse:
    consumed: bool = field(default=False, init=False)

    def consume(self) -> None:
        if self.consumed:
            raise TripleReuseError(f"{type(self).__name__} was already consumed")
        self.consumed = True


@dataclass
class BeaverTriple(SingleUse):
    a: ArithShare = field(kw_only=True)
    b: ArithShare = field(kw_only=True)
    c: ArithShare = field(kw_only=True)
    op: str = field(kw_only=True)

    def check(self, op: str, x: ArithShare, y: ArithShare) -> None:
        if op != self.op or x.shape != self.a.shape or y.shape != self.b.shape:
            raise DimensionMismatchError(
                f"{op} on {x.shape} x {y.shape} cannot use a {self.op} triple for {self.a.shape} x {self.b.shape}"
            )


@dataclass
class TruncationPair(SingleUse):
    """Shares of ``r`` (drawn from ``[0, 2^{l-2})``) and of ``floor(r / 2^shift)``."""

    r: ArithShare = field(kw_only=True)
    r_shifted: ArithShare = field(kw_only=True)
    shift: int = field(kw_only=True)


@dataclass
class BinaryTriple(SingleUse):
    a: BinShare = field(kw_only=True)
    b: BinShare = field(kw_only=True)
    c: BinShare = field(kw_only=True)


@dataclass
class OtCorrelation(SingleUse):
    """Random-OT correlations for both directions of a binary-times-arithmetic product.

    As sender this party holds ``(rho_0, rho_1)``; as receiver it holds the choice ``c`` and ``rho_c``
    of the peer's sender pair.
    """

    send_rho0: NDArray = field(kw_only=True)
    send_rho1: NDArray = field(kw_only=True)
    recv_choice: NDArray = field(kw_only=True)
    recv_rho: NDArray = field(kw_only=True)


@dataclass
class CorrelatedBatch(SingleUse):
    """One mask ``X`` for the fixed operand and ``(Y_j, Z_j)`` pairs for the products that reuse it."""

    x: ArithShare = field(kw_only=True)
    items: list[tuple[str, ArithShare, ArithShare]] = field(kw_only=True)
    _next: int = field(default=0, init=False)

    @property
    def remaining(self) -> int:
        return len(self.items) - self._next

    def take(self, layout: str, v_shape: tuple[int, ...]) -> tuple[ArithShare, ArithShare]:
        if self._next >= len(self.items):
            raise ProtocolError(f"Correlated batch of {len(self.items)} products is exhausted")
        item_layout, y, z = self.items[self._next]
        if item_layout != layout or y.shape != v_shape:
            raise DimensionMismatchError(
                f"Product {self._next} expects layout {item_layout} on {y.shape}, got {layout} on {v_shape}"
            )
        self._next += 1
        return y, z


@dataclass
class ExtensionMask(SingleUse):
    """Shares of one mask ``r < 2^{l-1}`` in the source ring and in the target ring."""

    r_source: ArithShare = field(kw_only=True)
    r_target: ArithShare = field(kw_only=True)
