"""Port for one direction of the inter-server link."""

from typing import Protocol

from ...models.message import Envelope


class TransportPort(Protocol):
    """FIFO queue of envelopes from one party to the other. Implemented by transport adapters."""

    def put(self, envelope: Envelope) -> None:
        """Enqueue without blocking."""
        ...

    async def get(self) -> Envelope:
        """Wait for the next envelope in arrival order."""
        ...

    def close(self) -> None:
        """Wake any waiting reader with a closed-channel error."""
        ...
