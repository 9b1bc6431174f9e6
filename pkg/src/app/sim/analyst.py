from __future__ import annotations

import threading

import numpy as np
from numpy.typing import NDArray

from ..core.exceptions.protocol_exceptions import ProtocolError
from ..core.logger import logging
from ..models.shares import ArithShare

logger = logging.getLogger(__name__)


class Analyst:
    """Passive result sink: each server delivers its shares, the analyst reconstructs.

    Deliveries bypass the inter-server channel and are not part of any transcript.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._inbox: dict[str, dict[int, ArithShare]] = {}

    def deliver(self, name: str, share: ArithShare) -> None:
        with self._lock:
            slot = self._inbox.setdefault(name, {})
            if share.party in slot:
                raise ProtocolError(f"Party {share.party} delivered '{name}' twice")
            slot[share.party] = share

    def reconstruct(self, name: str) -> NDArray:
        with self._lock:
            slot = self._inbox.get(name, {})
            if set(slot) != {1, 2}:
                raise ProtocolError(f"Result '{name}' is missing shares from parties {sorted({1, 2} - set(slot))}")
            first, second = slot[1], slot[2]
        return first.ring.add(first.value, second.value)

    def reconstruct_fixed(self, name: str, fractional_bits: int) -> NDArray:
        with self._lock:
            ring = self._inbox[name][1].ring
        signed = ring.to_signed(self.reconstruct(name))
        return np.asarray(signed).astype(np.float64) / 2.0**fractional_bits
