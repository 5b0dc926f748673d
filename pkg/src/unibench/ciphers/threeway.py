"""3-Way: 96-bit block, 96-bit key, 11 rounds plus a final output transform.

The block and key are three 32-bit words ``a[0], a[1], a[2]``; the byte
encoding is big-endian with ``a[2]`` first, which is how the published test
vectors print them.
"""

import numpy as np

from .._accel import njit
from .base import BlockCipherSpec, CipherInstance

SPEC = BlockCipherSpec("threeway", 96, 96, 11)

MASK32 = 0xFFFFFFFF
START_E = 0x0B0B
START_D = 0xB1B1


def round_constants(start: int) -> list:
    out = []
    for _ in range(SPEC.rounds + 1):
        out.append(start)
        start <<= 1
        if start & 0x10000:
            start ^= 0x11011
    return out


def _theta(a0, a1, a2):
    # works on Python ints and on uint32 arrays; Python ints are masked by the caller
    b0 = (a0 ^ (a0 >> 16) ^ (a1 << 16) ^ (a1 >> 16) ^ (a2 << 16) ^ (a1 >> 24) ^ (a2 << 8)
          ^ (a2 >> 8) ^ (a0 << 24) ^ (a2 >> 16) ^ (a0 << 16) ^ (a2 >> 24) ^ (a0 << 8))
    b1 = (a1 ^ (a1 >> 16) ^ (a2 << 16) ^ (a2 >> 16) ^ (a0 << 16) ^ (a2 >> 24) ^ (a0 << 8)
          ^ (a0 >> 8) ^ (a1 << 24) ^ (a0 >> 16) ^ (a1 << 16) ^ (a0 >> 24) ^ (a1 << 8))
    b2 = (a2 ^ (a2 >> 16) ^ (a0 << 16) ^ (a0 >> 16) ^ (a1 << 16) ^ (a0 >> 24) ^ (a1 << 8)
          ^ (a1 >> 8) ^ (a2 << 24) ^ (a1 >> 16) ^ (a2 << 16) ^ (a1 >> 24) ^ (a2 << 8))
    return b0, b1, b2


def _reverse32(x: int) -> int:
    return int(f"{x & MASK32:032b}"[::-1], 2)


def _mu(a0, a1, a2):
    """Reverse the bit order of the 96-bit block (word order flips too)."""
    return _reverse32(a2), _reverse32(a1), _reverse32(a0)


def expand_key(key: bytes) -> np.ndarray:
    """Rows 0..11: per-round (k0, k1, k2) words with round constants folded in.

    Rows 12..23 hold the same for decryption, using the theta-mu transformed key.
    """
    k2, k1, k0 = (int.from_bytes(key[4 * i:4 * i + 4], "big") for i in range(3))
    t = _theta(k0, k1, k2)
    ki = _mu(*(w & MASK32 for w in t))
    rk = np.empty((2 * (SPEC.rounds + 1), 3), dtype=np.uint32)
    for i, c in enumerate(round_constants(START_E)):
        rk[i] = (k0 ^ (c << 16)) & MASK32, k1, k2 ^ c
    for i, c in enumerate(round_constants(START_D)):
        rk[SPEC.rounds + 1 + i] = (ki[0] ^ (c << 16)) & MASK32, ki[1], ki[2] ^ c
    return rk


@njit
def _theta_nb(a0, a1, a2):
    b0 = (a0 ^ (a0 >> 16) ^ (a1 << 16) ^ (a1 >> 16) ^ (a2 << 16) ^ (a1 >> 24) ^ (a2 << 8)
          ^ (a2 >> 8) ^ (a0 << 24) ^ (a2 >> 16) ^ (a0 << 16) ^ (a2 >> 24) ^ (a0 << 8))
    b1 = (a1 ^ (a1 >> 16) ^ (a2 << 16) ^ (a2 >> 16) ^ (a0 << 16) ^ (a2 >> 24) ^ (a0 << 8)
          ^ (a0 >> 8) ^ (a1 << 24) ^ (a0 >> 16) ^ (a1 << 16) ^ (a0 >> 24) ^ (a1 << 8))
    b2 = (a2 ^ (a2 >> 16) ^ (a0 << 16) ^ (a0 >> 16) ^ (a1 << 16) ^ (a0 >> 24) ^ (a1 << 8)
          ^ (a1 >> 8) ^ (a2 << 24) ^ (a1 >> 16) ^ (a2 << 16) ^ (a1 >> 24) ^ (a2 << 8))
    return b0 & MASK32, b1 & MASK32, b2 & MASK32


@njit
def _rev32_nb(x):
    r = 0
    for _ in range(32):
        r = (r << 1) | (x & 1)
        x >>= 1
    return r


@njit
def _rounds_nb(a0, a1, a2, rk, base):
    for i in range(11):
        a0 ^= rk[base + i, 0]
        a1 ^= rk[base + i, 1]
        a2 ^= rk[base + i, 2]
        a0, a1, a2 = _theta_nb(a0, a1, a2)
        # pi_1
        a0 = ((a0 >> 10) ^ (a0 << 22)) & MASK32
        a2 = ((a2 << 1) ^ (a2 >> 31)) & MASK32
        # gamma
        a0, a1, a2 = (a0 ^ (a1 | (~a2 & MASK32)), a1 ^ (a2 | (~a0 & MASK32)), a2 ^ (a0 | (~a1 & MASK32)))
        # pi_2
        a0 = ((a0 << 1) ^ (a0 >> 31)) & MASK32
        a2 = ((a2 >> 10) ^ (a2 << 22)) & MASK32
    a0 ^= rk[base + 11, 0]
    a1 ^= rk[base + 11, 1]
    a2 ^= rk[base + 11, 2]
    return _theta_nb(a0, a1, a2)


@njit
def encrypt_loop(state, rk):
    out = np.empty_like(state)
    for b in range(state.shape[0]):
        a0, a1, a2 = _rounds_nb(np.int64(state[b, 0]), np.int64(state[b, 1]), np.int64(state[b, 2]), rk, 0)
        out[b, 0] = a0
        out[b, 1] = a1
        out[b, 2] = a2
    return out


@njit
def decrypt_loop(state, rk):
    out = np.empty_like(state)
    for b in range(state.shape[0]):
        a0 = _rev32_nb(np.int64(state[b, 2]))
        a1 = _rev32_nb(np.int64(state[b, 1]))
        a2 = _rev32_nb(np.int64(state[b, 0]))
        a0, a1, a2 = _rounds_nb(a0, a1, a2, rk, 12)
        out[b, 0] = _rev32_nb(a2)
        out[b, 1] = _rev32_nb(a1)
        out[b, 2] = _rev32_nb(a0)
    return out


def _rev32_vec(x):
    # reverse bits within each uint32 by reversing bytes, then bits inside bytes
    bytes_ = x.astype(">u4").view(np.uint8).reshape(-1, 4)[:, ::-1]
    flipped = np.unpackbits(bytes_, axis=1, bitorder="little")
    return np.packbits(flipped, axis=1).view(">u4").reshape(-1).astype(np.uint32)


def _rounds_vec(a0, a1, a2, rk, base):
    for i in range(11):
        a0 = a0 ^ rk[base + i, 0]
        a1 = a1 ^ rk[base + i, 1]
        a2 = a2 ^ rk[base + i, 2]
        a0, a1, a2 = _theta(a0, a1, a2)
        a0 = (a0 >> 10) ^ (a0 << 22)
        a2 = (a2 << 1) ^ (a2 >> 31)
        a0, a1, a2 = a0 ^ (a1 | ~a2), a1 ^ (a2 | ~a0), a2 ^ (a0 | ~a1)
        a0 = (a0 << 1) ^ (a0 >> 31)
        a2 = (a2 >> 10) ^ (a2 << 22)
    return _theta(a0 ^ rk[base + 11, 0], a1 ^ rk[base + 11, 1], a2 ^ rk[base + 11, 2])


def encrypt_vec(state, rk):
    return np.stack(_rounds_vec(state[:, 0], state[:, 1], state[:, 2], rk, 0), axis=1)


def decrypt_vec(state, rk):
    a0, a1, a2 = _rev32_vec(state[:, 2]), _rev32_vec(state[:, 1]), _rev32_vec(state[:, 0])
    a0, a1, a2 = _rounds_vec(a0, a1, a2, rk, 12)
    return np.stack([_rev32_vec(a2), _rev32_vec(a1), _rev32_vec(a0)], axis=1)


class ThreeWay(CipherInstance):
    spec = SPEC
    kernels = {"numba": (encrypt_loop, decrypt_loop), "numpy": (encrypt_vec, decrypt_vec)}

    def _expand_key(self, key):
        return expand_key(key)

    def _to_state(self, data):
        # bytes carry a[2] a[1] a[0]; state columns are a[0] a[1] a[2]
        return data.view(">u4").astype(np.uint32).reshape(-1, 3)[:, ::-1].copy()

    def _from_state(self, state):
        return np.ascontiguousarray(state[:, ::-1], dtype=">u4").view(np.uint8).reshape(-1)
