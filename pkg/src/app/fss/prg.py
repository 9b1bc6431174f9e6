"""Length-expanding PRG over 128-bit seeds.

Fixed-key AES in Matyas-Meyer-Oseas form, run in counter mode over the seed:
``G(s)_i = AES_K(s ^ i) ^ s ^ i``. One call yields three blocks: left seed, right seed and a block
whose low bits supply the control and value bits of both children.
"""

import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes
from numpy.typing import NDArray

SEED_BYTES = 16
EXPANSION_BLOCKS = 3

_FIXED_KEY = bytes.fromhex("5f8a2c3e91d74b06a1e3c5f708294b6d")
_COUNTERS = np.zeros((EXPANSION_BLOCKS, SEED_BYTES), dtype=np.uint8)
_COUNTERS[:, 0] = np.arange(EXPANSION_BLOCKS, dtype=np.uint8)


def random_seeds(rng: np.random.Generator, count: int) -> NDArray:
    return np.frombuffer(rng.bytes(SEED_BYTES * count), dtype=np.uint8).reshape(count, SEED_BYTES).copy()


def expand(seeds: NDArray) -> NDArray:
    """Expand ``(B, 16)`` seeds into ``(B, 3, 16)`` pseudorandom blocks."""
    count = seeds.shape[0]
    tweaked = np.bitwise_xor(seeds[:, None, :], _COUNTERS[None, :, :])
    encryptor = Cipher(algorithms.AES(_FIXED_KEY), modes.ECB()).encryptor()
    data = encryptor.update(np.ascontiguousarray(tweaked).tobytes()) + encryptor.finalize()
    blocks = np.frombuffer(data, dtype=np.uint8).reshape(count, EXPANSION_BLOCKS, SEED_BYTES)
    return np.bitwise_xor(blocks, tweaked)


def split(expanded: NDArray) -> tuple[NDArray, NDArray, NDArray, NDArray, NDArray, NDArray]:
    """Return ``(seed_left, seed_right, t_left, t_right, v_left, v_right)``."""
    bits = expanded[:, 2, 0]
    return (
        expanded[:, 0, :],
        expanded[:, 1, :],
        bits & 1,
        (bits >> 1) & 1,
        (bits >> 2) & 1,
        (bits >> 3) & 1,
    )


def convert_u32(seeds: NDArray) -> NDArray:
    """Map seeds into Z_2^32 (little-endian low word)."""
    return np.ascontiguousarray(seeds[:, :4]).view("<u4").reshape(-1).astype(np.uint64)


def convert_bit(seeds: NDArray) -> NDArray:
    return seeds[:, 0] & 1
