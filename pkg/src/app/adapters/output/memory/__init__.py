"""In-process transport adapter. Implements TransportPort."""

from .adapter import AsyncQueueTransport, ThreadQueueTransport, get_transport_pair

__all__ = [
    "AsyncQueueTransport",
    "ThreadQueueTransport",
    "get_transport_pair",
]
