"""Degree histogram over DPF keys.

Each sampled user sends one key per server encoding the point function at ``degree - 1``. A server
sums the full-domain evaluations of its keys; the two sums are shares of the histogram. The only
inter-server message is one validity bit per sampled user, so both servers count the same users.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core.config import settings
from ..core.exceptions.input_exceptions import InvalidParameterError, MalformedKeyError
from ..core.logger import logging
from ..fss.dpf import DpfKey, dpf_eval_full, dpf_gen
from ..ldp.client import bin_degree
from ..models.collection import SharedHistogram
from ..models.shares import ArithShare
from ..mpc.ring import RING32

if TYPE_CHECKING:
    from ..sim.context import PartyContext

logger = logging.getLogger(__name__)

VALIDITY_TAG = "valid"


def histogram_domain_bits(d_max: int) -> int:
    """``n = ceil(log2 d_max)``, at least one level."""
    if d_max < 1:
        raise InvalidParameterError(f"d_max must be positive, got {d_max}")
    return max(1, math.ceil(math.log2(d_max)))


def sample_users(n_nodes: int, rate: float, seed: int = 0) -> NDArray:
    """Uniform sample without replacement, ``max(1, round(rate·N))`` users, sorted."""
    if not 0 < rate <= 1:
        raise InvalidParameterError(f"Sampling rate must lie in (0, 1], got {rate}")
    if n_nodes < 1:
        return np.empty(0, dtype=np.int64)
    count = min(n_nodes, max(1, round(rate * n_nodes)))
    rng = np.random.default_rng([seed, 1])
    return np.sort(rng.choice(n_nodes, size=count, replace=False)).astype(np.int64)


def degree_keys(
    degree: int, d_max: int, rng: np.random.Generator, security_parameter: int = settings.SECURITY_PARAMETER
) -> tuple[bytes, bytes]:
    """A user's two serialized DPF keys for ``1{i = degree}`` on ``[1, d_max]``."""
    clamped = bin_degree(degree, d_max)
    if clamped != degree:
        logger.debug(f"Degree {degree} clamped to {clamped} for the histogram domain [1, {d_max}]")
    first, second = dpf_gen(clamped - 1, 1, histogram_domain_bits(d_max), rng, security_parameter)
    return first.to_bytes(), second.to_bytes()


def collect_degree_keys(
    degrees: ArrayLike, d_max: int, rng: np.random.Generator
) -> tuple[list[bytes], list[bytes]]:
    firsts, seconds = [], []
    clamped = 0
    for degree in np.asarray(degrees, dtype=np.int64).tolist():
        clamped += degree > d_max
        first, second = degree_keys(degree, d_max, rng)
        firsts.append(first)
        seconds.append(second)
    if clamped:
        logger.info(f"{clamped} sampled degrees above d_max={d_max} were clamped")
    return firsts, seconds


def parse_degree_keys(keys: Iterable[bytes], d_max: int, party: int) -> list[DpfKey | None]:
    """Parsed keys in arrival order; malformed ones (unparseable, wrong party or wrong domain) are ``None``."""
    n = histogram_domain_bits(d_max)
    parsed: list[DpfKey | None] = []
    for position, raw in enumerate(keys):
        try:
            key = DpfKey.from_bytes(raw)
            if key.party != party or key.domain_bits != n:
                raise MalformedKeyError(f"expected a party-{party} key over {n} bits")
        except MalformedKeyError as e:
            logger.warning(f"Rejected histogram key #{position}: {e.message}")
            parsed.append(None)
            continue
        parsed.append(key)
    return parsed


def estimate_histogram(
    keys: Iterable[bytes], d_max: int, party: int, accepted: ArrayLike | None = None
) -> SharedHistogram:
    """Sum of the full-domain evaluations of ``party``'s keys, truncated to ``[1, d_max]``.

    Malformed keys are skipped. ``accepted`` restricts the sum further to the marked positions.
    """
    return _sum_keys(parse_degree_keys(keys, d_max, party), d_max, party, accepted)


def _sum_keys(parsed: Sequence[DpfKey | None], d_max: int, party: int, accepted: ArrayLike | None) -> SharedHistogram:
    mask = np.ones(len(parsed), dtype=bool) if accepted is None else np.asarray(accepted, dtype=bool)
    if mask.shape != (len(parsed),):
        raise InvalidParameterError(f"Acceptance mask has shape {mask.shape}, expected ({len(parsed)},)")
    total = np.zeros(d_max, dtype=np.uint64)
    count = 0
    for key, keep in zip(parsed, mask.tolist()):
        if key is None or not keep:
            continue
        with np.errstate(over="ignore"):
            total += dpf_eval_full(key)[:d_max]
        count += 1
    return SharedHistogram(ArithShare(party, RING32, RING32.reduce(total)), count)


async def agree_histogram(ctx: PartyContext, keys: Sequence[bytes], d_max: int) -> SharedHistogram:
    """Histogram over the users whose keys both servers accept.

    The servers swap one validity bit per sampled user, so a key that only one server rejects
    drops the user on both sides and the two sums stay shares of the same tally.
    """
    parsed = parse_degree_keys(keys, d_max, ctx.party)
    own = np.array([key is not None for key in parsed], dtype=np.uint8)
    other = await ctx.exchange_bits(VALIDITY_TAG, own)
    agreed = np.logical_and(own, other)
    dropped = int(own.sum() - agreed.sum())
    if dropped:
        logger.warning(f"Party {ctx.party}: dropped {dropped} users whose key the other server rejected")
    return _sum_keys(parsed, d_max, ctx.party, agreed)


def plaintext_histogram(degrees: ArrayLike, d_max: int) -> NDArray:
    """Tally of ``clamp(d, 1, d_max)`` over the sample; index ``i - 1`` holds ``D_i``."""
    clamped = np.clip(np.asarray(degrees, dtype=np.int64), 1, d_max)
    return np.bincount(clamped - 1, minlength=d_max).astype(np.int64)
