"""XTEA: 64-bit block, 128-bit key, 32 cycles (64 Feistel rounds).

Words are big-endian, matching the common published test vectors.
"""

import numpy as np

from .._accel import njit
from .base import BlockCipherSpec, CipherInstance

SPEC = BlockCipherSpec("xtea", 64, 128, 64)

DELTA = 0x9E3779B9
MASK32 = 0xFFFFFFFF


def expand_key(key: bytes) -> np.ndarray:
    """Fold ``sum + k[...]`` for every half-round into one table of 64 words."""
    k = [int.from_bytes(key[4 * i:4 * i + 4], "big") for i in range(4)]
    rk = np.empty(SPEC.rounds, dtype=np.uint32)
    s = 0
    for i in range(SPEC.rounds // 2):
        rk[2 * i] = (s + k[s & 3]) & MASK32
        s = (s + DELTA) & MASK32
        rk[2 * i + 1] = (s + k[(s >> 11) & 3]) & MASK32
    return rk


@njit
def encrypt_loop(state, rk):
    out = np.empty_like(state)
    n_half = rk.shape[0]
    for b in range(state.shape[0]):
        v0 = np.int64(state[b, 0])
        v1 = np.int64(state[b, 1])
        for i in range(0, n_half, 2):
            v0 = (v0 + (((((v1 << 4) & MASK32) ^ (v1 >> 5)) + v1) & MASK32 ^ rk[i])) & MASK32
            v1 = (v1 + (((((v0 << 4) & MASK32) ^ (v0 >> 5)) + v0) & MASK32 ^ rk[i + 1])) & MASK32
        out[b, 0] = v0
        out[b, 1] = v1
    return out


@njit
def decrypt_loop(state, rk):
    out = np.empty_like(state)
    n_half = rk.shape[0]
    for b in range(state.shape[0]):
        v0 = np.int64(state[b, 0])
        v1 = np.int64(state[b, 1])
        for i in range(n_half - 2, -1, -2):
            v1 = (v1 - ((((((v0 << 4) & MASK32) ^ (v0 >> 5)) + v0) & MASK32) ^ rk[i + 1])) & MASK32
            v0 = (v0 - ((((((v1 << 4) & MASK32) ^ (v1 >> 5)) + v1) & MASK32) ^ rk[i])) & MASK32
        out[b, 0] = v0
        out[b, 1] = v1
    return out


def encrypt_vec(state, rk):
    v0 = state[:, 0].copy()
    v1 = state[:, 1].copy()
    for i in range(0, rk.shape[0], 2):
        v0 += (((v1 << 4) ^ (v1 >> 5)) + v1) ^ rk[i]
        v1 += (((v0 << 4) ^ (v0 >> 5)) + v0) ^ rk[i + 1]
    return np.stack([v0, v1], axis=1)


def decrypt_vec(state, rk):
    v0 = state[:, 0].copy()
    v1 = state[:, 1].copy()
    for i in range(rk.shape[0] - 2, -1, -2):
        v1 -= (((v0 << 4) ^ (v0 >> 5)) + v0) ^ rk[i + 1]
        v0 -= (((v1 << 4) ^ (v1 >> 5)) + v1) ^ rk[i]
    return np.stack([v0, v1], axis=1)


class XTEA(CipherInstance):
    spec = SPEC
    kernels = {"numba": (encrypt_loop, decrypt_loop), "numpy": (encrypt_vec, decrypt_vec)}

    def _expand_key(self, key):
        return expand_key(key)

    def _to_state(self, data):
        return data.view(">u4").astype(np.uint32).reshape(-1, 2)

    def _from_state(self, state):
        return np.ascontiguousarray(state, dtype=">u4").view(np.uint8).reshape(-1)
