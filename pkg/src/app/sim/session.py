"""Two-server execution harness.

A phase is an async ``program(ctx)`` run once per party over a fresh :class:`PhaseChannel`. In
``interleaved`` mode both parties share one event loop; in ``threaded`` mode each party gets its
own thread and loop. Both modes produce the same transcripts.
"""

from __future__ import annotations

import asyncio
import time
from collections.abc import Awaitable, Callable
from typing import Any, TypeVar

import numpy as np

from ..core.config import ExecutionMode, TruncationMode, settings
from ..core.exceptions.protocol_exceptions import ChannelClosedError
from ..core.logger import logging
from ..schemas.transcript import Transcript
from .channel import PhaseChannel
from .context import PartyContext
from .dealer import Dealer
from .oracle import DebugOracle

logger = logging.getLogger(__name__)

T = TypeVar("T")
PartyProgram = Callable[[PartyContext], Awaitable[T]]

PARTY_RNG_OFFSET = 100


def _root_cause(errors: list[BaseException]) -> BaseException:
    """The error that aborted the phase, not the peer's resulting closed-channel error."""
    for error in errors:
        if not isinstance(error, ChannelClosedError):
            return error
    return errors[0]


class TwoPartySession:
    def __init__(
        self,
        dealer: Dealer,
        seed: int = 0,
        latency_ms: float = 0.0,
        mode: ExecutionMode = settings.EXECUTION_MODE,
        fractional_bits: int = settings.FRACTIONAL_BITS,
        truncation: TruncationMode = settings.TRUNCATION_MODE,
        oracle: DebugOracle | None = None,
    ) -> None:
        self.dealer = dealer
        self.latency_ms = latency_ms
        self.mode = mode
        self.fractional_bits = fractional_bits
        self.truncation = truncation
        self.oracle = oracle if oracle is not None else (DebugOracle() if settings.DEBUG_ORACLES else None)
        self.transcripts: list[Transcript] = []
        self._feeds = {party: dealer.feed(party) for party in (1, 2)}
        self._rngs = {party: np.random.default_rng([seed, PARTY_RNG_OFFSET + party]) for party in (1, 2)}

    def _context(self, channel: PhaseChannel, party: int) -> PartyContext:
        return PartyContext(
            party=party,
            endpoint=channel.endpoints[party],
            dealer=self._feeds[party],
            rng=self._rngs[party],
            fractional_bits=self.fractional_bits,
            truncation=self.truncation,
            latency_ms=self.latency_ms,
            oracle=self.oracle,
        )

    async def _run_interleaved(self, channel: PhaseChannel, program: PartyProgram[Any]) -> list[Any]:
        try:
            async with asyncio.TaskGroup() as group:
                tasks = [group.create_task(self._guard(channel, program, party)) for party in (1, 2)]
        except BaseExceptionGroup as group:
            raise _root_cause(list(group.exceptions)) from None
        return [task.result() for task in tasks]

    async def _guard(self, channel: PhaseChannel, program: PartyProgram[Any], party: int) -> Any:
        try:
            return await program(self._context(channel, party))
        except BaseException:
            channel.close()
            raise

    async def _run_threaded(self, channel: PhaseChannel, program: PartyProgram[Any]) -> list[Any]:
        def run_party(party: int) -> Any:
            return asyncio.run(self._guard(channel, program, party))

        results = await asyncio.gather(
            *(asyncio.to_thread(run_party, party) for party in (1, 2)), return_exceptions=True
        )
        errors = [result for result in results if isinstance(result, BaseException)]
        if errors:
            raise _root_cause(errors)
        return list(results)

    async def run_phase(self, name: str, program: PartyProgram[T]) -> tuple[T, T]:
        """Run ``program`` for both parties and record the phase transcript."""
        channel = PhaseChannel(name, self.latency_ms, self.mode)
        logger.debug(f"Phase '{name}' starting ({self.mode.value})")
        started = time.perf_counter()
        try:
            if self.mode is ExecutionMode.THREADED:
                outputs = await self._run_threaded(channel, program)
            else:
                outputs = await self._run_interleaved(channel, program)
        finally:
            channel.close()
        transcript = channel.transcript(compute_ms=(time.perf_counter() - started) * 1000.0)
        self.transcripts.append(transcript)
        logger.info(
            f"Phase '{name}': {transcript.total_bytes} bytes, {transcript.rounds} rounds, "
            f"{transcript.network_ms:.1f} ms simulated network"
        )
        return outputs[0], outputs[1]

    def transcript(self, name: str) -> Transcript:
        for transcript in reversed(self.transcripts):
            if transcript.phase == name:
                return transcript
        raise KeyError(name)
