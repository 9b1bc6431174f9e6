"""Instrumented inter-server link.

Every protocol message goes through an :class:`Endpoint`, which counts bytes and ring elements per tag
and direction, stamps a causal depth (the round in which the message was sent), and advances a
simulated clock by the configured one-way latency.
"""

from __future__ import annotations

import threading
from collections import defaultdict

from ..adapters.output.memory import get_transport_pair
from ..adapters.ports.transport import TransportPort
from ..core.config import ExecutionMode
from ..core.exceptions.protocol_exceptions import ProtocolError
from ..core.logger import logging
from ..models.message import Envelope
from ..schemas.transcript import P1_TO_P2, P2_TO_P1, TagTraffic, Transcript

logger = logging.getLogger(__name__)


class TrafficRecorder:
    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._tags: dict[str, dict[str, int]] = defaultdict(lambda: defaultdict(int))

    def record(self, envelope: Envelope) -> None:
        direction = P1_TO_P2 if envelope.sender == 1 else P2_TO_P1
        with self._lock:
            counters = self._tags[envelope.tag]
            counters[f"bytes_{direction}"] += len(envelope.payload)
            counters[f"elements_{direction}"] += envelope.elements
            counters["messages"] += 1

    def snapshot(self) -> dict[str, TagTraffic]:
        with self._lock:
            return {tag: TagTraffic(**counters) for tag, counters in sorted(self._tags.items())}


class Endpoint:
    """One party's side of the link. Parties never hold references to each other, only to endpoints."""

    def __init__(
        self, party: int, outbox: TransportPort, inbox: TransportPort, recorder: TrafficRecorder, latency_ms: float
    ) -> None:
        self.party = party
        self._outbox = outbox
        self._inbox = inbox
        self._recorder = recorder
        self._latency_ms = latency_ms
        self.depth = 0
        self.max_depth = 0
        self.clock_ms = 0.0

    def send(self, tag: str, payload: bytes, elements: int) -> None:
        envelope = Envelope(self.party, tag, payload, elements, self.depth + 1, self.clock_ms)
        self.max_depth = max(self.max_depth, envelope.depth)
        self._recorder.record(envelope)
        self._outbox.put(envelope)

    async def recv(self, tag: str) -> bytes:
        envelope = await self._inbox.get()
        if envelope.tag != tag:
            raise ProtocolError(f"Party {self.party} expected a '{tag}' message, received '{envelope.tag}'")
        self.depth = max(self.depth, envelope.depth)
        self.clock_ms = max(self.clock_ms, envelope.sent_at_ms + self._latency_ms)
        return envelope.payload


class PhaseChannel:
    """Fresh pair of endpoints for one protocol phase."""

    def __init__(self, phase: str, latency_ms: float = 0.0, mode: ExecutionMode = ExecutionMode.INTERLEAVED) -> None:
        self.phase = phase
        self.recorder = TrafficRecorder()
        self._forward, self._backward = get_transport_pair(mode)
        self.endpoints = {
            1: Endpoint(1, self._forward, self._backward, self.recorder, latency_ms),
            2: Endpoint(2, self._backward, self._forward, self.recorder, latency_ms),
        }

    def close(self) -> None:
        self._forward.close()
        self._backward.close()

    def transcript(self, compute_ms: float) -> Transcript:
        tags = self.recorder.snapshot()
        return Transcript(
            phase=self.phase,
            bytes_p1_to_p2=sum(t.bytes_p1_to_p2 for t in tags.values()),
            bytes_p2_to_p1=sum(t.bytes_p2_to_p1 for t in tags.values()),
            rounds=max(endpoint.max_depth for endpoint in self.endpoints.values()),
            network_ms=max(endpoint.clock_ms for endpoint in self.endpoints.values()),
            compute_ms=compute_ms,
            tags=tags,
        )
