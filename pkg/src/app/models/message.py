from dataclasses import dataclass


@dataclass(frozen=True)
class Envelope:
    """An inter-server message: an opaque payload plus the accounting stamps the channel attaches."""

    sender: int
    tag: str
    payload: bytes
    elements: int
    depth: int
    sent_at_ms: float
