"""In-process transports: implement TransportPort for the interleaved and threaded execution modes."""

import asyncio
import queue
import threading

from ....core.config import ExecutionMode, settings
from ....core.exceptions.protocol_exceptions import ChannelClosedError
from ....core.logger import logging
from ....models.message import Envelope
from ...ports.transport import TransportPort

logger = logging.getLogger(__name__)

_CLOSED = object()


class AsyncQueueTransport:
    """Both parties share one event loop; FIFO via ``asyncio.Queue``."""

    def __init__(self) -> None:
        self._queue: asyncio.Queue[object] = asyncio.Queue()

    def put(self, envelope: Envelope) -> None:
        self._queue.put_nowait(envelope)

    async def get(self) -> Envelope:
        item = await self._queue.get()
        if item is _CLOSED:
            self._queue.put_nowait(_CLOSED)
            raise ChannelClosedError()
        assert isinstance(item, Envelope)
        return item

    def close(self) -> None:
        self._queue.put_nowait(_CLOSED)


class ThreadQueueTransport:
    """Each party runs its own event loop in its own thread; FIFO via a thread-safe queue."""

    def __init__(self, poll_seconds: float = settings.RECV_POLL_SECONDS) -> None:
        self._queue: queue.SimpleQueue[Envelope] = queue.SimpleQueue()
        self._closed = threading.Event()
        self._poll_seconds = poll_seconds

    def put(self, envelope: Envelope) -> None:
        self._queue.put(envelope)

    def _blocking_get(self) -> Envelope:
        while True:
            try:
                return self._queue.get(timeout=self._poll_seconds)
            except queue.Empty:
                if self._closed.is_set():
                    raise ChannelClosedError() from None

    async def get(self) -> Envelope:
        return await asyncio.to_thread(self._blocking_get)

    def close(self) -> None:
        self._closed.set()


def get_transport_pair(mode: ExecutionMode) -> tuple[TransportPort, TransportPort]:
    """Return the (party 1 -> party 2, party 2 -> party 1) queues for ``mode``."""
    if mode is ExecutionMode.THREADED:
        return ThreadQueueTransport(), ThreadQueueTransport()
    return AsyncQueueTransport(), AsyncQueueTransport()
