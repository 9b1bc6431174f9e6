"""Trusted offline dealer.

Material is generated lazily, one item at a time, from an RNG seeded by ``(seed, kind, index)``, so
the inventory a run consumes does not depend on the order in which the two parties ask for it. Both
parties must request the ``index``-th item of a kind with identical parameters; each half is issued
exactly once.
"""

from __future__ import annotations

import threading
from collections import Counter
from collections.abc import Hashable, Mapping
from enum import Enum
from typing import Any

import numpy as np

from ..core.exceptions.protocol_exceptions import PreprocessingExhaustedError, ProtocolError, TripleReuseError
from ..core.logger import logging
from ..fss.dcf import CmpGateKey, cmp_gen
from ..models.preprocessing import (
    LAYOUT_LEFT,
    LAYOUT_LEFT_TRANSPOSED,
    BeaverTriple,
    BinaryTriple,
    CorrelatedBatch,
    ExtensionMask,
    OtCorrelation,
    TruncationPair,
)
from ..models.shares import ArithShare, BinShare
from ..mpc.ring import Ring

logger = logging.getLogger(__name__)


class MaterialKind(str, Enum):
    BEAVER = "beaver"
    TRUNCATION = "trunc"
    BINARY = "bin"
    OT = "ot"
    COMPARISON = "cmp"
    CORRELATED = "correlated"
    EXTENSION = "extension"


_KIND_IDS = {kind: number for number, kind in enumerate(MaterialKind, start=1)}


def _split_arith(ring: Ring, value: np.ndarray, rng: np.random.Generator) -> tuple[ArithShare, ArithShare]:
    first = ring.random(rng, np.shape(value))
    return ArithShare(1, ring, first), ArithShare(2, ring, ring.sub(value, first))


def _split_bits(bits: np.ndarray, rng: np.random.Generator) -> tuple[BinShare, BinShare]:
    first = rng.integers(0, 2, size=np.shape(bits), dtype=np.uint8)
    return BinShare(1, first), BinShare(2, np.bitwise_xor(bits, first))


def _random_bits(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    return rng.integers(0, 2, size=shape, dtype=np.uint8)


def _beaver(rng: np.random.Generator, op: str, bits: int, a_shape: tuple, b_shape: tuple) -> tuple[Any, Any]:
    ring = Ring(bits)
    a, b = ring.random(rng, a_shape), ring.random(rng, b_shape)
    c = ring.matmul(a, b) if op == "matmul" else ring.mul(a, b)
    a1, a2 = _split_arith(ring, a, rng)
    b1, b2 = _split_arith(ring, b, rng)
    c1, c2 = _split_arith(ring, c, rng)
    return BeaverTriple(a=a1, b=b1, c=c1, op=op), BeaverTriple(a=a2, b=b2, c=c2, op=op)


def _truncation(rng: np.random.Generator, bits: int, shape: tuple, shift: int) -> tuple[Any, Any]:
    ring = Ring(bits)
    r = ring.random_below(rng, shape, bits - 2)
    r1, r2 = _split_arith(ring, r, rng)
    s1, s2 = _split_arith(ring, ring.shift_right(r, shift), rng)
    return TruncationPair(r=r1, r_shifted=s1, shift=shift), TruncationPair(r=r2, r_shifted=s2, shift=shift)


def _binary(rng: np.random.Generator, shape: tuple) -> tuple[Any, Any]:
    a, b = _random_bits(rng, shape), _random_bits(rng, shape)
    a1, a2 = _split_bits(a, rng)
    b1, b2 = _split_bits(b, rng)
    c1, c2 = _split_bits(np.bitwise_and(a, b), rng)
    return BinaryTriple(a=a1, b=b1, c=c1), BinaryTriple(a=a2, b=b2, c=c2)


def _ot(rng: np.random.Generator, bits: int, shape: tuple) -> tuple[Any, Any]:
    ring = Ring(bits)
    # index 0: party 1 sends, party 2 chooses; index 1: the reverse
    rho = [(ring.random(rng, shape), ring.random(rng, shape)) for _ in range(2)]
    choice = [_random_bits(rng, shape) for _ in range(2)]
    chosen = [np.where(choice[d].astype(bool), rho[d][1], rho[d][0]) for d in range(2)]
    if ring.wide:
        chosen = [np.asarray(c, dtype=object) for c in chosen]
    first = OtCorrelation(send_rho0=rho[0][0], send_rho1=rho[0][1], recv_choice=choice[1], recv_rho=chosen[1])
    second = OtCorrelation(send_rho0=rho[1][0], send_rho1=rho[1][1], recv_choice=choice[0], recv_rho=chosen[0])
    return first, second


def _comparison(rng: np.random.Generator, bits: int, threshold: int, count: int) -> tuple[Any, Any]:
    return cmp_gen(threshold, bits, rng, count)


def _correlated(rng: np.random.Generator, bits: int, x_shape: tuple, items: tuple) -> tuple[Any, Any]:
    ring = Ring(bits)
    x = ring.random(rng, x_shape)
    x1, x2 = _split_arith(ring, x, rng)
    halves: list[list[tuple[str, ArithShare, ArithShare]]] = [[], []]
    for layout, y_shape in items:
        y = ring.random(rng, y_shape)
        if layout == LAYOUT_LEFT:
            z = ring.matmul(x, y)
        elif layout == LAYOUT_LEFT_TRANSPOSED:
            z = ring.matmul(x.T, y)
        else:
            z = ring.matmul(y, x)
        y1, y2 = _split_arith(ring, y, rng)
        z1, z2 = _split_arith(ring, z, rng)
        halves[0].append((layout, y1, z1))
        halves[1].append((layout, y2, z2))
    return CorrelatedBatch(x=x1, items=halves[0]), CorrelatedBatch(x=x2, items=halves[1])


def _extension(rng: np.random.Generator, source_bits: int, target_bits: int, shape: tuple) -> tuple[Any, Any]:
    source, target = Ring(source_bits), Ring(target_bits)
    r = source.random_below(rng, shape, source_bits - 1)
    r1, r2 = _split_arith(source, r, rng)
    t1, t2 = _split_arith(target, target.convert(r, source, signed=False), rng)
    return ExtensionMask(r_source=r1, r_target=t1), ExtensionMask(r_source=r2, r_target=t2)


_GENERATORS = {
    MaterialKind.BEAVER: _beaver,
    MaterialKind.TRUNCATION: _truncation,
    MaterialKind.BINARY: _binary,
    MaterialKind.OT: _ot,
    MaterialKind.COMPARISON: _comparison,
    MaterialKind.CORRELATED: _correlated,
    MaterialKind.EXTENSION: _extension,
}


class _Pending:
    __slots__ = ("spec", "halves")

    def __init__(self, spec: tuple[Hashable, ...], halves: tuple[Any, Any]) -> None:
        self.spec = spec
        self.halves: dict[int, Any] = {1: halves[0], 2: halves[1]}


class Dealer:
    """Seeded source of single-use correlated randomness for both servers.

    ``budgets`` caps the number of items per kind (normally the output of a preprocessing plan);
    a kind without a budget is unlimited.
    """

    def __init__(self, seed: int = 0, budgets: Mapping[MaterialKind | str, int] | None = None) -> None:
        self.seed = seed
        self.budgets = {MaterialKind(kind): count for kind, count in (budgets or {}).items()}
        self._lock = threading.Lock()
        self._pending: dict[tuple[MaterialKind, int], _Pending] = {}
        self._issued: dict[int, Counter[MaterialKind]] = {1: Counter(), 2: Counter()}

    def feed(self, party: int) -> DealerFeed:
        return DealerFeed(self, party)

    def provision(self, demand: Mapping[MaterialKind | str, int]) -> None:
        """Raise the budgets by ``demand`` (one call per planned phase group)."""
        with self._lock:
            for kind, count in demand.items():
                kind = MaterialKind(kind)
                self.budgets[kind] = self.budgets.get(kind, 0) + count

    def usage(self) -> dict[str, int]:
        """Items generated so far per kind (the larger of the two parties' counts)."""
        with self._lock:
            kinds = set(self._issued[1]) | set(self._issued[2])
            return {kind.value: max(self._issued[1][kind], self._issued[2][kind]) for kind in sorted(kinds)}

    def issue(self, party: int, kind: MaterialKind, index: int, spec: tuple[Hashable, ...]) -> Any:
        key = (kind, index)
        with self._lock:
            pending = self._pending.get(key)
            if pending is None:
                if index < max(self._issued[1][kind], self._issued[2][kind]):
                    raise TripleReuseError(f"{kind.value} item {index} was already issued to party {party}")
                budget = self.budgets.get(kind)
                if budget is not None and index >= budget:
                    raise PreprocessingExhaustedError(
                        f"Dealer ran out of '{kind.value}' material after {budget} items (planning undercounted)"
                    )
                rng = np.random.default_rng([self.seed, _KIND_IDS[kind], index])
                pending = _Pending(spec, _GENERATORS[kind](rng, *spec))
                self._pending[key] = pending
            elif pending.spec != spec:
                raise ProtocolError(
                    f"Parties requested different {kind.value} material at index {index}: {pending.spec} vs {spec}"
                )
            half = pending.halves.pop(party, None)
            if half is None:
                raise TripleReuseError(f"{kind.value} item {index} was already issued to party {party}")
            if not pending.halves:
                del self._pending[key]
            self._issued[party][kind] = max(self._issued[party][kind], index + 1)
        return half


class DealerFeed:
    """One party's ordered view of the dealer: the n-th request of a kind gets item n."""

    def __init__(self, dealer: Dealer, party: int) -> None:
        self._dealer = dealer
        self.party = party
        self._next: Counter[MaterialKind] = Counter()

    def _take(self, kind: MaterialKind, *spec: Hashable) -> Any:
        index = self._next[kind]
        self._next[kind] += 1
        return self._dealer.issue(self.party, kind, index, tuple(spec))

    def beaver(self, op: str, ring: Ring, a_shape: tuple[int, ...], b_shape: tuple[int, ...]) -> BeaverTriple:
        return self._take(MaterialKind.BEAVER, op, ring.bits, tuple(a_shape), tuple(b_shape))

    def truncation(self, ring: Ring, shape: tuple[int, ...], shift: int) -> TruncationPair:
        return self._take(MaterialKind.TRUNCATION, ring.bits, tuple(shape), shift)

    def binary(self, shape: tuple[int, ...]) -> BinaryTriple:
        return self._take(MaterialKind.BINARY, tuple(shape))

    def ot(self, ring: Ring, shape: tuple[int, ...]) -> OtCorrelation:
        return self._take(MaterialKind.OT, ring.bits, tuple(shape))

    def comparison(self, bits: int, threshold: int, count: int) -> CmpGateKey:
        return self._take(MaterialKind.COMPARISON, bits, threshold, count)

    def correlated(
        self, ring: Ring, x_shape: tuple[int, ...], items: list[tuple[str, tuple[int, ...]]]
    ) -> CorrelatedBatch:
        frozen = tuple((layout, tuple(shape)) for layout, shape in items)
        return self._take(MaterialKind.CORRELATED, ring.bits, tuple(x_shape), frozen)

    def extension(self, source: Ring, target: Ring, shape: tuple[int, ...]) -> ExtensionMask:
        return self._take(MaterialKind.EXTENSION, source.bits, target.bits, tuple(shape))
