from typing import Annotated, Any

from pydantic import BaseModel, ConfigDict, Field

P1_TO_P2 = "p1_to_p2"
P2_TO_P1 = "p2_to_p1"


class TagTraffic(BaseModel):
    """Traffic of one message tag (``matmul``, ``trunc``, ``cmp`` ...) within a phase."""

    model_config = ConfigDict(extra="forbid")

    bytes_p1_to_p2: Annotated[int, Field(ge=0, default=0)]
    bytes_p2_to_p1: Annotated[int, Field(ge=0, default=0)]
    elements_p1_to_p2: Annotated[int, Field(ge=0, default=0)]
    elements_p2_to_p1: Annotated[int, Field(ge=0, default=0)]
    messages: Annotated[int, Field(ge=0, default=0)]

    def elements(self, direction: str = P1_TO_P2) -> int:
        return self.elements_p1_to_p2 if direction == P1_TO_P2 else self.elements_p2_to_p1


class Transcript(BaseModel):
    """Measured communication of one protocol phase.

    ``network_ms`` is the simulated latency along the critical path and is deterministic.
    ``compute_ms`` is measured wall time; it stays out of serialized transcripts and :meth:`fingerprint`.
    """

    model_config = ConfigDict(extra="ignore")

    phase: Annotated[str, Field(min_length=1, examples=["qr"])]
    bytes_p1_to_p2: Annotated[int, Field(ge=0)]
    bytes_p2_to_p1: Annotated[int, Field(ge=0)]
    rounds: Annotated[int, Field(ge=0)]
    network_ms: Annotated[float, Field(ge=0)]
    compute_ms: Annotated[float, Field(ge=0, default=0.0, exclude=True)]
    tags: dict[str, TagTraffic] = {}

    @property
    def wall_ms(self) -> float:
        return self.network_ms + self.compute_ms

    @property
    def total_bytes(self) -> int:
        return self.bytes_p1_to_p2 + self.bytes_p2_to_p1

    def tag(self, name: str) -> TagTraffic:
        return self.tags.get(name, TagTraffic())

    def fingerprint(self) -> dict[str, Any]:
        return self.model_dump()
