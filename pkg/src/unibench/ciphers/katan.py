"""KATAN32 and KATAN64: 80-bit key, 254 rounds of bit-serial NLFSR updates.

Conventions: the block is read as a big-endian integer whose bit ``i`` is
state bit ``i`` (L2 occupies the low bits, L1 the high bits). Key bit
``k_0`` is the most significant bit of the first key byte.

The numpy path is bitsliced: every state bit becomes a plane of packed
bits across all blocks, so a shift register step is a list rotation.
"""

import numpy as np

from .._accel import njit
from .base import BlockCipherSpec, CipherInstance

ROUNDS = 254

# fmt: off
IR = np.array([
    1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 1, 1, 0, 1, 0, 1, 0, 1, 0, 1, 1, 1, 1, 0, 1, 1, 0, 0, 1, 1, 0, 0,
    1, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1,
    0, 1, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 0, 0, 1, 1, 1, 1, 1, 1, 0, 1, 0, 1, 0, 0, 0, 1, 0, 1, 0, 1,
    0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 1, 0, 1, 1, 1, 1, 1, 0, 1, 1, 1, 0, 1, 0, 0, 1, 0, 1,
    0, 1, 1, 0, 1, 0, 0, 1, 1, 1, 0, 0, 1, 1, 0, 1, 1, 0, 0, 0, 1, 0, 1, 1, 1, 0, 1, 1, 0, 1, 1, 1,
    1, 0, 0, 1, 0, 1, 1, 0, 1, 1, 0, 1, 0, 1, 1, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 1, 0, 1, 0, 0, 0, 1,
    1, 1, 0, 0, 0, 1, 0, 0, 1, 1, 1, 1, 0, 1, 0, 0, 0, 0, 1, 1, 1, 0, 1, 0, 1, 1, 0, 0, 0, 0, 0, 1,
    0, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 1, 0, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0,
], dtype=np.int64)
# fmt: on

# (|L1|, |L2|, steps per round, x1..x5, y1..y6)
GEOMETRY = {
    32: (13, 19, 1, 12, 7, 8, 5, 3, 18, 7, 12, 10, 8, 3),
    48: (19, 29, 2, 18, 12, 15, 7, 6, 28, 19, 21, 13, 15, 6),
    64: (25, 39, 3, 24, 15, 20, 11, 9, 38, 25, 33, 21, 14, 9),
}


def expand_key(key: bytes) -> np.ndarray:
    """Returns (ROUNDS, 3) int64 rows of (k_a, k_b, irregular-update flag)."""
    bits = [(key[i // 8] >> (7 - i % 8)) & 1 for i in range(80)]
    for i in range(2 * ROUNDS - 80):
        bits.append(bits[i] ^ bits[i + 19] ^ bits[i + 30] ^ bits[i + 67])
    rk = np.empty((ROUNDS, 3), dtype=np.int64)
    rk[:, 0] = bits[0::2]
    rk[:, 1] = bits[1::2]
    rk[:, 2] = IR
    return rk


@njit
def _encrypt_loop(state, rk, geo):
    n1, n2, steps = geo[0], geo[1], geo[2]
    x1, x2, x3, x4, x5 = geo[3], geo[4], geo[5], geo[6], geo[7]
    y1, y2, y3, y4, y5, y6 = geo[8], geo[9], geo[10], geo[11], geo[12], geo[13]
    m1 = (1 << n1) - 1
    m2 = (1 << n2) - 1
    out = np.empty_like(state)
    for b in range(state.shape[0]):
        s = np.int64(state[b])
        l2 = s & m2
        l1 = (s >> n2) & m1
        for r in range(rk.shape[0]):
            ka = rk[r, 0]
            kb = rk[r, 1]
            ir = rk[r, 2]
            for _ in range(steps):
                fa = ((l1 >> x1) ^ (l1 >> x2) ^ ((l1 >> x3) & (l1 >> x4)) ^ ka ^ (ir & (l1 >> x5))) & 1
                fb = ((l2 >> y1) ^ (l2 >> y2) ^ ((l2 >> y3) & (l2 >> y4)) ^ ((l2 >> y5) & (l2 >> y6)) ^ kb) & 1
                l1 = ((l1 << 1) | fb) & m1
                l2 = ((l2 << 1) | fa) & m2
        out[b] = (l1 << n2) | l2
    return out


@njit
def _decrypt_loop(state, rk, geo):
    n1, n2, steps = geo[0], geo[1], geo[2]
    x2, x3, x4, x5 = geo[4] + 1, geo[5] + 1, geo[6] + 1, geo[7] + 1
    y2, y3, y4, y5, y6 = geo[9] + 1, geo[10] + 1, geo[11] + 1, geo[12] + 1, geo[13] + 1
    m1 = (1 << n1) - 1
    m2 = (1 << n2) - 1
    out = np.empty_like(state)
    for b in range(state.shape[0]):
        s = np.int64(state[b])
        l2 = s & m2
        l1 = (s >> n2) & m1
        for r in range(rk.shape[0] - 1, -1, -1):
            ka = rk[r, 0]
            kb = rk[r, 1]
            ir = rk[r, 2]
            for _ in range(steps):
                top1 = (l2 ^ (l1 >> x2) ^ ((l1 >> x3) & (l1 >> x4)) ^ ka ^ (ir & (l1 >> x5))) & 1
                top2 = (l1 ^ (l2 >> y2) ^ ((l2 >> y3) & (l2 >> y4)) ^ ((l2 >> y5) & (l2 >> y6)) ^ kb) & 1
                l1 = (l1 >> 1) | (top1 << (n1 - 1))
                l2 = (l2 >> 1) | (top2 << (n2 - 1))
        out[b] = (l1 << n2) | l2
    return out


def _to_planes(state, nbits):
    """(n,) integers -> (nbits, words) uint64 bit planes; plane i = state bit i."""
    n = state.shape[0]
    pad = (-n) % 64
    bytes_be = np.ascontiguousarray(state, dtype=">u8").view(np.uint8).reshape(n, 8)
    bits = np.unpackbits(bytes_be, axis=1, bitorder="big")[:, ::-1][:, :nbits]
    if pad:
        bits = np.concatenate([bits, np.zeros((pad, nbits), dtype=np.uint8)])
    return np.ascontiguousarray(np.packbits(bits.T, axis=1, bitorder="little")).view(np.uint64), n


def _from_planes(planes, n, nbits):
    bits = np.unpackbits(planes.view(np.uint8), axis=1, bitorder="little")[:, :n].T
    full = np.zeros((n, 64), dtype=np.uint8)
    full[:, :nbits] = bits
    return np.packbits(full[:, ::-1], axis=1, bitorder="big").view(">u8").reshape(-1).astype(np.uint64)


_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)


def _encrypt_sliced(state, rk, geo):
    n1, n2, steps, x1, x2, x3, x4, x5, y1, y2, y3, y4, y5, y6 = geo
    planes, n = _to_planes(state, n1 + n2)
    # index j of each list is register bit j, so a shift is a prepend
    l2 = list(planes[:n2])
    l1 = list(planes[n2:])
    for ka, kb, ir in rk:
        for _ in range(steps):
            fa = l1[x1] ^ l1[x2] ^ (l1[x3] & l1[x4])
            if ir:
                fa = fa ^ l1[x5]
            if ka:
                fa = fa ^ _ONES
            fb = l2[y1] ^ l2[y2] ^ (l2[y3] & l2[y4]) ^ (l2[y5] & l2[y6])
            if kb:
                fb = fb ^ _ONES
            l1.pop()
            l1.insert(0, fb)
            l2.pop()
            l2.insert(0, fa)
    return _from_planes(np.stack(l2 + l1), n, n1 + n2)


def _decrypt_sliced(state, rk, geo):
    n1, n2, steps, x1, x2, x3, x4, x5, y1, y2, y3, y4, y5, y6 = geo
    planes, n = _to_planes(state, n1 + n2)
    l2 = list(planes[:n2])
    l1 = list(planes[n2:])
    for ka, kb, ir in rk[::-1]:
        for _ in range(steps):
            top1 = l2[0] ^ l1[x2 + 1] ^ (l1[x3 + 1] & l1[x4 + 1])
            if ir:
                top1 = top1 ^ l1[x5 + 1]
            if ka:
                top1 = top1 ^ _ONES
            top2 = l1[0] ^ l2[y2 + 1] ^ (l2[y3 + 1] & l2[y4 + 1]) ^ (l2[y5 + 1] & l2[y6 + 1])
            if kb:
                top2 = top2 ^ _ONES
            l1.pop(0)
            l1.append(top1)
            l2.pop(0)
            l2.append(top2)
    return _from_planes(np.stack(l2 + l1), n, n1 + n2)


class _Katan(CipherInstance):
    kernels = {}

    def __init__(self, key):
        super().__init__(key)
        self._geo = GEOMETRY[self.spec.block_bits]
        self._geo_arr = np.array(self._geo, dtype=np.int64)
        self.kernels = {
            "numba": (
                lambda s, rk: _encrypt_loop(s, rk, self._geo_arr),
                lambda s, rk: _decrypt_loop(s, rk, self._geo_arr),
            ),
            "numpy": (
                lambda s, rk: _encrypt_sliced(s, rk, self._geo),
                lambda s, rk: _decrypt_sliced(s, rk, self._geo),
            ),
        }

    def _expand_key(self, key):
        return expand_key(key)

    def _to_state(self, data):
        nb = self.spec.block_bytes
        padded = np.zeros((data.size // nb, 8), dtype=np.uint8)
        padded[:, 8 - nb:] = data.reshape(-1, nb)
        return padded.view(">u8").reshape(-1).astype(np.uint64)

    def _from_state(self, state):
        nb = self.spec.block_bytes
        raw = np.ascontiguousarray(state, dtype=">u8").view(np.uint8).reshape(-1, 8)
        return np.ascontiguousarray(raw[:, 8 - nb:]).reshape(-1)


class Katan32(_Katan):
    spec = BlockCipherSpec("katan32", 32, 80, ROUNDS)


class Katan64(_Katan):
    spec = BlockCipherSpec("katan64", 64, 80, ROUNDS)
