from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from ..core.config import TruncationMode, settings
from ..mpc.ring import Ring
from .channel import Endpoint
from .dealer import DealerFeed
from .oracle import DebugOracle


@dataclass
class PartyContext:
    """Everything one server holds while running a protocol phase.

    The context never references the peer; all interaction goes through ``endpoint``.
    """

    party: int
    endpoint: Endpoint
    dealer: DealerFeed
    rng: np.random.Generator
    fractional_bits: int = settings.FRACTIONAL_BITS
    truncation: TruncationMode = settings.TRUNCATION_MODE
    latency_ms: float = 0.0
    oracle: DebugOracle | None = field(default=None, repr=False)

    @property
    def peer(self) -> int:
        return 3 - self.party

    @property
    def is_leader(self) -> bool:
        return self.party == 1

    def send_ring(self, tag: str, ring: Ring, values: NDArray) -> None:
        self.endpoint.send(tag, ring.to_bytes(values), int(np.size(values)))

    async def recv_ring(self, tag: str, ring: Ring, shape: tuple[int, ...]) -> NDArray:
        return ring.from_bytes(await self.endpoint.recv(tag), shape)

    async def exchange_ring(self, tag: str, ring: Ring, values: NDArray) -> NDArray:
        """Send ``values`` and receive the peer's array of the same shape (one round)."""
        self.send_ring(tag, ring, values)
        return await self.recv_ring(tag, ring, tuple(np.shape(values)))

    async def exchange_bits(self, tag: str, bits: NDArray) -> NDArray:
        shape = tuple(np.shape(bits))
        flat = np.ascontiguousarray(bits, dtype=np.uint8).ravel()
        self.endpoint.send(tag, np.packbits(flat).tobytes(), flat.size)
        payload = await self.endpoint.recv(tag)
        unpacked = np.unpackbits(np.frombuffer(payload, dtype=np.uint8), count=flat.size)
        return unpacked.reshape(shape)

    def observe(self, label: str, value: NDArray, ring: Ring) -> None:
        if self.oracle is not None:
            self.oracle.observe(self.party, label, ring, value, self.fractional_bits)
