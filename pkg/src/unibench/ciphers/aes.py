"""AES-128 (the reference cipher), T-table formulation.

The S-box is derived from the GF(2^8) inverse and affine map at import time;
decryption uses the equivalent inverse cipher.
"""

import numpy as np

from .._accel import njit
from .base import BlockCipherSpec, CipherInstance

SPEC = BlockCipherSpec("aes128", 128, 128, 10)


def gf_mul(a: int, b: int) -> int:
    p = 0
    while b:
        if b & 1:
            p ^= a
        a <<= 1
        if a & 0x100:
            a ^= 0x11B
        b >>= 1
    return p


def _sbox():
    inv = [0] * 256
    for a in range(1, 256):
        for b in range(1, 256):
            if gf_mul(a, b) == 1:
                inv[a] = b
                break
    box = []
    for x in inv:
        y = x
        for sh in range(1, 5):
            y ^= ((x << sh) | (x >> (8 - sh))) & 0xFF
        box.append(y ^ 0x63)
    return box


SBOX = _sbox()
INV_SBOX = [0] * 256
for _i, _v in enumerate(SBOX):
    INV_SBOX[_v] = _i


def _ror(w, n):
    return ((w >> n) | (w << (32 - n))) & 0xFFFFFFFF


def _tables(box, coeffs):
    t0 = []
    for x in range(256):
        s = box[x]
        c = [gf_mul(s, k) for k in coeffs]
        t0.append((c[0] << 24) | (c[1] << 16) | (c[2] << 8) | c[3])
    return np.array([[_ror(w, 8 * i) for w in t0] for i in range(4)], dtype=np.int64)


TE = _tables(SBOX, (2, 1, 1, 3))
TD = _tables(INV_SBOX, (14, 9, 13, 11))
SBOX_ARR = np.array(SBOX, dtype=np.int64)
INV_SBOX_ARR = np.array(INV_SBOX, dtype=np.int64)


def _inv_mix_word(w: int) -> int:
    return int(
        TD[0][SBOX[w >> 24]] ^ TD[1][SBOX[(w >> 16) & 0xFF]] ^ TD[2][SBOX[(w >> 8) & 0xFF]] ^ TD[3][SBOX[w & 0xFF]]
    )


def expand_key(key: bytes) -> np.ndarray:
    """(2, 11, 4): encryption round keys, then equivalent-inverse decryption keys."""
    w = [int.from_bytes(key[4 * i:4 * i + 4], "big") for i in range(4)]
    rcon = 1
    for i in range(4, 44):
        t = w[i - 1]
        if i % 4 == 0:
            t = ((t << 8) | (t >> 24)) & 0xFFFFFFFF
            t = (SBOX[t >> 24] << 24) | (SBOX[(t >> 16) & 0xFF] << 16) | (SBOX[(t >> 8) & 0xFF] << 8) | SBOX[t & 0xFF]
            t ^= rcon << 24
            rcon = gf_mul(rcon, 2)
        w.append(w[i - 4] ^ t)
    enc = [w[4 * r:4 * r + 4] for r in range(11)]
    dec = [enc[10]] + [[_inv_mix_word(x) for x in enc[10 - r]] for r in range(1, 10)] + [enc[0]]
    return np.array([enc, dec], dtype=np.int64)


@njit
def _crypt_loop(state, rk, t, box, inverse):
    # inverse flips the ShiftRows direction: column j takes rows from j+1..j+3 or j-1..j-3
    out = np.empty_like(state)
    d = 3 if inverse else 1
    s = np.zeros(4, dtype=np.int64)
    n = np.zeros(4, dtype=np.int64)
    for b in range(state.shape[0]):
        for j in range(4):
            s[j] = np.int64(state[b, j]) ^ rk[0, j]
        for r in range(1, 10):
            for j in range(4):
                n[j] = (t[0, s[j] >> 24] ^ t[1, (s[(j + d) % 4] >> 16) & 0xFF]
                        ^ t[2, (s[(j + 2 * d) % 4] >> 8) & 0xFF] ^ t[3, s[(j + 3 * d) % 4] & 0xFF] ^ rk[r, j])
            for j in range(4):
                s[j] = n[j]
        for j in range(4):
            n[j] = ((box[s[j] >> 24] << 24) | (box[(s[(j + d) % 4] >> 16) & 0xFF] << 16)
                    | (box[(s[(j + 2 * d) % 4] >> 8) & 0xFF] << 8) | box[s[(j + 3 * d) % 4] & 0xFF]) ^ rk[10, j]
        for j in range(4):
            out[b, j] = n[j]
    return out


def encrypt_loop(state, rk):
    return _crypt_loop(state, rk[0], TE, SBOX_ARR, False)


def decrypt_loop(state, rk):
    return _crypt_loop(state, rk[1], TD, INV_SBOX_ARR, True)


def _crypt_vec(state, rk, t, box, d):
    s = [state[:, j].astype(np.int64) ^ rk[0, j] for j in range(4)]
    for r in range(1, 10):
        s = [
            t[0][s[j] >> 24] ^ t[1][(s[(j + d) % 4] >> 16) & 0xFF]
            ^ t[2][(s[(j + 2 * d) % 4] >> 8) & 0xFF] ^ t[3][s[(j + 3 * d) % 4] & 0xFF] ^ rk[r, j]
            for j in range(4)
        ]
    s = [
        ((box[s[j] >> 24] << 24) | (box[(s[(j + d) % 4] >> 16) & 0xFF] << 16)
         | (box[(s[(j + 2 * d) % 4] >> 8) & 0xFF] << 8) | box[s[(j + 3 * d) % 4] & 0xFF]) ^ rk[10, j]
        for j in range(4)
    ]
    return np.stack(s, axis=1).astype(np.uint32)


def encrypt_vec(state, rk):
    return _crypt_vec(state, rk[0], TE, SBOX_ARR, 1)


def decrypt_vec(state, rk):
    return _crypt_vec(state, rk[1], TD, INV_SBOX_ARR, 3)


class AES128(CipherInstance):
    spec = SPEC
    kernels = {"numba": (encrypt_loop, decrypt_loop), "numpy": (encrypt_vec, decrypt_vec)}

    def _expand_key(self, key):
        return expand_key(key)

    def _to_state(self, data):
        return data.view(">u4").astype(np.uint32).reshape(-1, 4)

    def _from_state(self, state):
        return np.ascontiguousarray(state, dtype=">u4").view(np.uint8).reshape(-1)
