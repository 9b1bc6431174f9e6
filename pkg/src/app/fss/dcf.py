"""Distributed comparison functions with output in Z_2, and masked-input comparison gates.

Keys are generated in batches: entry ``b`` of a batched key pair shares ``1{x < alpha_b}``.
A comparison gate for a public threshold ``a`` and secret input mask ``r`` uses two such keys,
for the secret thresholds ``(r + a) mod 2^l`` and ``r``, plus a shared wrap bit ``1{r + a >= 2^l}``:
for ``y = x + r``, ``1{x < a} = 1{y < r + a} ^ 1{y < r} ^ wrap``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..mpc.ring import Ring
from .prg import SEED_BYTES, convert_bit, expand, random_seeds, split


@dataclass(frozen=True)
class DcfKey:
    party: int
    domain_bits: int
    seeds: NDArray
    seed_cw: NDArray
    v_cw: NDArray
    t_cw: NDArray
    final_cw: NDArray

    @property
    def batch(self) -> int:
        return int(self.seeds.shape[0])

    def size_bits(self, security_parameter: int = 128) -> int:
        per_key = self.domain_bits * (security_parameter + 3) + security_parameter + 1
        return self.batch * per_key


def _bits_at(values: NDArray, domain_bits: int, level: int) -> NDArray:
    return ((values >> np.uint64(domain_bits - 1 - level)) & np.uint64(1)).astype(np.uint8)


def dcf_gen(alphas: ArrayLike, domain_bits: int, rng: np.random.Generator) -> tuple[DcfKey, DcfKey]:
    """Batched keys for ``1{x < alpha}`` with beta = 1 in Z_2."""
    alpha = np.atleast_1d(np.asarray(alphas, dtype=np.uint64))
    if domain_bits < 64 and np.any(alpha >= np.uint64(1 << domain_bits)):
        raise ValueError(f"Thresholds must lie in the {domain_bits}-bit domain")
    count = alpha.size
    roots = [random_seeds(rng, count), random_seeds(rng, count)]
    s0, s1 = roots[0].copy(), roots[1].copy()
    t0 = np.zeros(count, dtype=np.uint8)
    t1 = np.ones(count, dtype=np.uint8)
    v_alpha = np.zeros(count, dtype=np.uint8)

    seed_cw = np.zeros((domain_bits, count, SEED_BYTES), dtype=np.uint8)
    v_cw = np.zeros((domain_bits, count), dtype=np.uint8)
    t_cw = np.zeros((domain_bits, count, 2), dtype=np.uint8)

    for level in range(domain_bits):
        bit = _bits_at(alpha, domain_bits, level)
        right = bit.astype(bool)
        s0l, s0r, t0l, t0r, v0l, v0r = split(expand(s0))
        s1l, s1r, t1l, t1r, v1l, v1r = split(expand(s1))

        lose0 = np.where(right[:, None], s0l, s0r)
        lose1 = np.where(right[:, None], s1l, s1r)
        keep0 = np.where(right[:, None], s0r, s0l)
        keep1 = np.where(right[:, None], s1r, s1l)
        v_lose = np.where(right, v0l ^ v1l, v0r ^ v1r)
        v_keep = np.where(right, v0r ^ v1r, v0l ^ v1l)

        seed_cw[level] = lose0 ^ lose1
        # losing the left branch means every point there is below alpha
        v_cw[level] = v_lose ^ v_alpha ^ bit
        v_alpha = v_alpha ^ v_keep ^ v_cw[level]
        t_cw[level, :, 0] = t0l ^ t1l ^ bit ^ 1
        t_cw[level, :, 1] = t0r ^ t1r ^ bit
        keep_cw = np.where(right, t_cw[level, :, 1], t_cw[level, :, 0])

        s0 = keep0 ^ (t0[:, None] * seed_cw[level])
        s1 = keep1 ^ (t1[:, None] * seed_cw[level])
        t0 = np.where(right, t0r, t0l) ^ (t0 & keep_cw)
        t1 = np.where(right, t1r, t1l) ^ (t1 & keep_cw)

    final_cw = convert_bit(s0) ^ convert_bit(s1) ^ v_alpha
    keys = tuple(
        DcfKey(party, domain_bits, roots[party - 1], seed_cw, v_cw, t_cw, final_cw) for party in (1, 2)
    )
    return keys[0], keys[1]


def dcf_eval(key: DcfKey, x: ArrayLike) -> NDArray:
    """XOR share of ``1{x_b < alpha_b}``.

    With a batch of one, the single key is evaluated at every point of ``x``; otherwise ``x`` must
    hold one point per batched key.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=np.uint64))
    if key.batch == 1:
        index = np.zeros(xs.size, dtype=np.intp)
    elif key.batch == xs.size:
        index = np.arange(xs.size)
    else:
        raise ValueError(f"Key batch of {key.batch} cannot evaluate {xs.size} points")

    seeds = key.seeds[index]
    t = np.full(xs.size, key.party - 1, dtype=np.uint8)
    v = np.zeros(xs.size, dtype=np.uint8)
    for level in range(key.domain_bits):
        s_left, s_right, t_left, t_right, v_left, v_right = split(expand(seeds))
        correct = t[:, None] * key.seed_cw[level][index]
        tcw = key.t_cw[level][index]
        go_right = _bits_at(xs, key.domain_bits, level).astype(bool)
        v = v ^ np.where(go_right, v_right, v_left) ^ (t & key.v_cw[level][index])
        seeds = np.where(go_right[:, None], s_right ^ correct, s_left ^ correct)
        t = np.where(go_right, t_right ^ (t & tcw[:, 1]), t_left ^ (t & tcw[:, 0]))
    return v ^ convert_bit(seeds) ^ (t & key.final_cw[index])


@dataclass(frozen=True)
class CmpGateKey:
    """One party's half of a batch of masked comparison gates against a public threshold."""

    party: int
    bits: int
    threshold: int
    upper: DcfKey
    lower: DcfKey
    mask_share: NDArray
    wrap_share: NDArray

    @property
    def batch(self) -> int:
        return self.upper.batch


def cmp_gen(threshold: int, bits: int, rng: np.random.Generator, count: int = 1) -> tuple[CmpGateKey, CmpGateKey]:
    ring = Ring(bits)
    if not 0 <= threshold < (1 << (bits - 1)):
        raise ValueError(f"Threshold must lie in [0, 2^{bits - 1})")
    mask = ring.random(rng, count)
    upper = ring.add(mask, ring.reduce(threshold))
    wrap = (upper < mask).astype(np.uint8)
    upper_keys = dcf_gen(upper, bits, rng)
    lower_keys = dcf_gen(mask, bits, rng)
    mask_1 = ring.random(rng, count)
    mask_2 = ring.sub(mask, mask_1)
    wrap_1 = (ring.random(rng, count) & np.uint64(1)).astype(np.uint8)
    wrap_2 = wrap ^ wrap_1
    gates = (
        CmpGateKey(1, bits, threshold, upper_keys[0], lower_keys[0], mask_1, wrap_1),
        CmpGateKey(2, bits, threshold, upper_keys[1], lower_keys[1], mask_2, wrap_2),
    )
    return gates[0], gates[1]


def cmp_eval(key: CmpGateKey, masked_x: ArrayLike) -> NDArray:
    """Binary share of ``1{x < threshold}`` from the opened ``x + r``."""
    masked = np.atleast_1d(np.asarray(masked_x, dtype=np.uint64))
    return dcf_eval(key.upper, masked) ^ dcf_eval(key.lower, masked) ^ key.wrap_share
