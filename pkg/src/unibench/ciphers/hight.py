"""HIGHT: 64-bit block, 128-bit key, 32 rounds of an 8-branch generalised Feistel.

Byte ``P_i`` of the design document is byte ``7 - i`` of the block as
written (P7 first), and ``MK_i`` is byte ``15 - i`` of the key.
"""

import numpy as np

from .._accel import njit
from .base import BlockCipherSpec, CipherInstance

SPEC = BlockCipherSpec("hight", 64, 128, 32)


def _deltas() -> list:
    s = [0, 1, 0, 1, 1, 0, 1]
    for i in range(1, 128):
        s.append(s[i + 2] ^ s[i - 1])
    return [sum(s[i + j] << j for j in range(7)) for i in range(128)]


DELTA = _deltas()


def expand_key(key: bytes) -> np.ndarray:
    """Row 0: 8 whitening keys; rows 1..16: the 128 subkeys, 8 per row."""
    mk = key[::-1]
    wk = [mk[i + 12] for i in range(4)] + [mk[i - 4] for i in range(4, 8)]
    sk = [0] * 128
    for i in range(8):
        for j in range(8):
            sk[16 * i + j] = (mk[(j - i) % 8] + DELTA[16 * i + j]) & 0xFF
            sk[16 * i + j + 8] = (mk[(j - i) % 8 + 8] + DELTA[16 * i + j + 8]) & 0xFF
    return np.array(wk + sk, dtype=np.int64)


@njit
def _f0(x):
    return (((x << 1) | (x >> 7)) ^ ((x << 2) | (x >> 6)) ^ ((x << 7) | (x >> 1))) & 0xFF


@njit
def _f1(x):
    return (((x << 3) | (x >> 5)) ^ ((x << 4) | (x >> 4)) ^ ((x << 6) | (x >> 2))) & 0xFF


@njit
def encrypt_loop(state, rk):
    out = np.empty_like(state)
    x = np.zeros(8, dtype=np.int64)
    for b in range(state.shape[0]):
        for i in range(8):
            x[i] = state[b, i]
        x[0] = (x[0] + rk[0]) & 0xFF
        x[2] = x[2] ^ rk[1]
        x[4] = (x[4] + rk[2]) & 0xFF
        x[6] = x[6] ^ rk[3]
        for r in range(32):
            k = 8 + 4 * r
            t1 = (x[1] + (_f1(x[0]) ^ rk[k])) & 0xFF
            t3 = x[3] ^ ((_f0(x[2]) + rk[k + 1]) & 0xFF)
            t5 = (x[5] + (_f1(x[4]) ^ rk[k + 2])) & 0xFF
            t7 = x[7] ^ ((_f0(x[6]) + rk[k + 3]) & 0xFF)
            if r < 31:
                x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7] = t7, x[0], t1, x[2], t3, x[4], t5, x[6]
            else:
                x[1] = t1
                x[3] = t3
                x[5] = t5
                x[7] = t7
        x[0] = (x[0] + rk[4]) & 0xFF
        x[2] = x[2] ^ rk[5]
        x[4] = (x[4] + rk[6]) & 0xFF
        x[6] = x[6] ^ rk[7]
        for i in range(8):
            out[b, i] = x[i]
    return out


@njit
def decrypt_loop(state, rk):
    out = np.empty_like(state)
    x = np.zeros(8, dtype=np.int64)
    for b in range(state.shape[0]):
        for i in range(8):
            x[i] = state[b, i]
        x[0] = (x[0] - rk[4]) & 0xFF
        x[2] = x[2] ^ rk[5]
        x[4] = (x[4] - rk[6]) & 0xFF
        x[6] = x[6] ^ rk[7]
        for r in range(31, -1, -1):
            k = 8 + 4 * r
            if r < 31:
                # undo the branch rotation first
                x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7] = x[1], x[2], x[3], x[4], x[5], x[6], x[7], x[0]
            x[1] = (x[1] - (_f1(x[0]) ^ rk[k])) & 0xFF
            x[3] = x[3] ^ ((_f0(x[2]) + rk[k + 1]) & 0xFF)
            x[5] = (x[5] - (_f1(x[4]) ^ rk[k + 2])) & 0xFF
            x[7] = x[7] ^ ((_f0(x[6]) + rk[k + 3]) & 0xFF)
        x[0] = (x[0] - rk[0]) & 0xFF
        x[2] = x[2] ^ rk[1]
        x[4] = (x[4] - rk[2]) & 0xFF
        x[6] = x[6] ^ rk[3]
        for i in range(8):
            out[b, i] = x[i]
    return out


def _rotl8(x, n):
    return (x << n) | (x >> (8 - n))


def _f0_vec(x):
    return _rotl8(x, 1) ^ _rotl8(x, 2) ^ _rotl8(x, 7)


def _f1_vec(x):
    return _rotl8(x, 3) ^ _rotl8(x, 4) ^ _rotl8(x, 6)


def encrypt_vec(state, rk):
    # uint8 arithmetic wraps mod 256, which is exactly what the cipher needs
    rk = rk.astype(np.uint8)
    x = [state[:, i].copy() for i in range(8)]
    x[0] += rk[0]
    x[2] ^= rk[1]
    x[4] += rk[2]
    x[6] ^= rk[3]
    for r in range(32):
        k = 8 + 4 * r
        t1 = x[1] + (_f1_vec(x[0]) ^ rk[k])
        t3 = x[3] ^ (_f0_vec(x[2]) + rk[k + 1])
        t5 = x[5] + (_f1_vec(x[4]) ^ rk[k + 2])
        t7 = x[7] ^ (_f0_vec(x[6]) + rk[k + 3])
        if r < 31:
            x = [t7, x[0], t1, x[2], t3, x[4], t5, x[6]]
        else:
            x[1], x[3], x[5], x[7] = t1, t3, t5, t7
    x[0] += rk[4]
    x[2] ^= rk[5]
    x[4] += rk[6]
    x[6] ^= rk[7]
    return np.stack(x, axis=1)


def decrypt_vec(state, rk):
    rk = rk.astype(np.uint8)
    x = [state[:, i].copy() for i in range(8)]
    x[0] -= rk[4]
    x[2] ^= rk[5]
    x[4] -= rk[6]
    x[6] ^= rk[7]
    for r in range(31, -1, -1):
        k = 8 + 4 * r
        if r < 31:
            x = x[1:] + x[:1]
        x[1] = x[1] - (_f1_vec(x[0]) ^ rk[k])
        x[3] = x[3] ^ (_f0_vec(x[2]) + rk[k + 1])
        x[5] = x[5] - (_f1_vec(x[4]) ^ rk[k + 2])
        x[7] = x[7] ^ (_f0_vec(x[6]) + rk[k + 3])
    x[0] -= rk[0]
    x[2] ^= rk[1]
    x[4] -= rk[2]
    x[6] ^= rk[3]
    return np.stack(x, axis=1)


class HIGHT(CipherInstance):
    spec = SPEC
    kernels = {"numba": (encrypt_loop, decrypt_loop), "numpy": (encrypt_vec, decrypt_vec)}

    def _expand_key(self, key):
        return expand_key(key)

    def _to_state(self, data):
        return np.ascontiguousarray(data.reshape(-1, 8)[:, ::-1])

    def _from_state(self, state):
        return np.ascontiguousarray(np.asarray(state, dtype=np.uint8)[:, ::-1]).reshape(-1)
