"""Distributed point functions over Z_2^32.

``dpf_gen(alpha, beta)`` yields two keys whose evaluations sum to ``beta`` at ``alpha`` and to zero
everywhere else in the ``n``-bit domain. The tree layout follows the usual two-seed construction
with per-level seed/control-bit corrections and one output correction word.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core.exceptions.input_exceptions import MalformedKeyError
from .prg import SEED_BYTES, convert_u32, expand, random_seeds, split

KEY_VERSION = 1
OUTPUT_BITS = 32
_OUTPUT_MASK = np.uint64((1 << OUTPUT_BITS) - 1)
_HEADER = struct.Struct("<BBHH")
_LENGTH = struct.Struct("<I")


@dataclass(frozen=True)
class DpfKey:
    party: int
    domain_bits: int
    seed: NDArray
    seed_cw: NDArray
    t_cw: NDArray
    output_cw: int
    security_parameter: int = 128

    def size_bits(self) -> int:
        """Information content of the key: n·(λ+2) + λ + 32."""
        lam = self.security_parameter
        return self.domain_bits * (lam + 2) + lam + OUTPUT_BITS

    def to_bytes(self) -> bytes:
        body = bytearray(_HEADER.pack(KEY_VERSION, self.party, self.domain_bits, self.security_parameter))
        body += self.seed.tobytes()
        for level in range(self.domain_bits):
            body += self.seed_cw[level].tobytes()
            body.append(int(self.t_cw[level, 0]) | (int(self.t_cw[level, 1]) << 1))
        body += _LENGTH.pack(self.output_cw)
        return _LENGTH.pack(len(body)) + bytes(body)

    @classmethod
    def from_bytes(cls, data: bytes) -> DpfKey:
        try:
            (length,) = _LENGTH.unpack_from(data, 0)
            body = memoryview(data)[_LENGTH.size :]
            if len(body) != length:
                raise MalformedKeyError(f"Key length prefix {length} does not match payload of {len(body)} bytes")
            version, party, n, lam = _HEADER.unpack_from(body, 0)
        except struct.error as e:
            raise MalformedKeyError(f"Truncated key: {e}") from e
        if version != KEY_VERSION:
            raise MalformedKeyError(f"Unsupported key version {version}")
        if party not in (1, 2) or lam != 8 * SEED_BYTES:
            raise MalformedKeyError(f"Invalid key header (party={party}, lambda={lam})")
        expected = _HEADER.size + SEED_BYTES + n * (SEED_BYTES + 1) + _LENGTH.size
        if len(body) != expected:
            raise MalformedKeyError(f"Key for n={n} must carry {expected} bytes, found {len(body)}")
        offset = _HEADER.size
        seed = np.frombuffer(body[offset : offset + SEED_BYTES], dtype=np.uint8).copy()
        offset += SEED_BYTES
        seed_cw = np.zeros((n, SEED_BYTES), dtype=np.uint8)
        t_cw = np.zeros((n, 2), dtype=np.uint8)
        for level in range(n):
            seed_cw[level] = np.frombuffer(body[offset : offset + SEED_BYTES], dtype=np.uint8)
            flags = body[offset + SEED_BYTES]
            if flags > 3:
                raise MalformedKeyError(f"Invalid control-bit correction at level {level}")
            t_cw[level] = (flags & 1, flags >> 1)
            offset += SEED_BYTES + 1
        (output_cw,) = _LENGTH.unpack_from(body, offset)
        return cls(party, n, seed, seed_cw, t_cw, output_cw, lam)


def dpf_gen(
    alpha: int, beta: int, domain_bits: int, rng: np.random.Generator, security_parameter: int = 128
) -> tuple[DpfKey, DpfKey]:
    if not 0 <= alpha < (1 << domain_bits):
        raise ValueError(f"alpha={alpha} outside the {domain_bits}-bit domain")
    if security_parameter != 8 * SEED_BYTES:
        raise ValueError("Only 128-bit seeds are supported")
    roots = random_seeds(rng, 2)
    seeds = roots.copy()
    t = np.array([0, 1], dtype=np.uint8)
    seed_cw = np.zeros((domain_bits, SEED_BYTES), dtype=np.uint8)
    t_cw = np.zeros((domain_bits, 2), dtype=np.uint8)

    for level in range(domain_bits):
        bit = (alpha >> (domain_bits - 1 - level)) & 1
        s_left, s_right, t_left, t_right, _, _ = split(expand(seeds))
        keep_s, lose_s = (s_right, s_left) if bit else (s_left, s_right)
        keep_t = t_right if bit else t_left

        seed_cw[level] = lose_s[0] ^ lose_s[1]
        t_cw[level, 0] = t_left[0] ^ t_left[1] ^ bit ^ 1
        t_cw[level, 1] = t_right[0] ^ t_right[1] ^ bit
        keep_cw = t_cw[level, bit]

        seeds = keep_s ^ (t[:, None] * seed_cw[level][None, :])
        t = keep_t ^ (t & keep_cw)

    out = convert_u32(seeds)
    diff = (int(beta) - int(out[0]) + int(out[1])) % (1 << OUTPUT_BITS)
    output_cw = (-diff) % (1 << OUTPUT_BITS) if t[1] else diff
    keys = tuple(
        DpfKey(party, domain_bits, roots[party - 1].copy(), seed_cw, t_cw, output_cw, security_parameter)
        for party in (1, 2)
    )
    return keys[0], keys[1]


def _finish(key: DpfKey, seeds: NDArray, t: NDArray) -> NDArray:
    value = convert_u32(seeds) + t.astype(np.uint64) * np.uint64(key.output_cw)
    value &= _OUTPUT_MASK
    if key.party == 2:
        value = (np.uint64(0) - value) & _OUTPUT_MASK
    return value


def dpf_eval(key: DpfKey, x: ArrayLike) -> NDArray:
    """Evaluate ``key`` at each point of ``x``; returns Z_2^32 shares as ``uint64``."""
    xs = np.atleast_1d(np.asarray(x, dtype=np.uint64))
    if np.any(xs >= np.uint64(1 << key.domain_bits)):
        raise ValueError(f"Evaluation point outside the {key.domain_bits}-bit domain")
    seeds = np.repeat(key.seed[None, :], xs.size, axis=0)
    t = np.full(xs.size, key.party - 1, dtype=np.uint8)
    with np.errstate(over="ignore"):
        for level in range(key.domain_bits):
            s_left, s_right, t_left, t_right, _, _ = split(expand(seeds))
            correct = t[:, None] * key.seed_cw[level][None, :]
            s_left, s_right = s_left ^ correct, s_right ^ correct
            t_left = t_left ^ (t & key.t_cw[level, 0])
            t_right = t_right ^ (t & key.t_cw[level, 1])
            go_right = ((xs >> np.uint64(key.domain_bits - 1 - level)) & np.uint64(1)).astype(bool)
            seeds = np.where(go_right[:, None], s_right, s_left)
            t = np.where(go_right, t_right, t_left)
        return _finish(key, seeds, t).reshape(np.shape(np.asarray(x)) or (1,))


def dpf_eval_full(key: DpfKey) -> NDArray:
    """Evaluate ``key`` on the whole domain by expanding the tree breadth first."""
    seeds = key.seed[None, :].copy()
    t = np.array([key.party - 1], dtype=np.uint8)
    with np.errstate(over="ignore"):
        for level in range(key.domain_bits):
            s_left, s_right, t_left, t_right, _, _ = split(expand(seeds))
            correct = t[:, None] * key.seed_cw[level][None, :]
            children = np.stack([s_left ^ correct, s_right ^ correct], axis=1)
            child_t = np.stack(
                [t_left ^ (t & key.t_cw[level, 0]), t_right ^ (t & key.t_cw[level, 1])],
                axis=1,
            )
            seeds = children.reshape(-1, SEED_BYTES)
            t = child_t.reshape(-1)
        return _finish(key, seeds, t)
