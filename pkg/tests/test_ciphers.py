import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kat_vectors import KATS
from unibench._accel import HAVE_NUMBA
from unibench.ciphers import CIPHERS, CORPUS, SPECS, decrypt_block, encrypt_block, make_cipher
from unibench.errors import BadBlockLength, BadKeyLength, UnknownCipher

BACKENDS = ["numba", "numpy"] if HAVE_NUMBA else ["numpy"]

GEOMETRY = {
    "xtea": (64, 128, 64),
    "skipjack": (64, 80, 32),
    "threeway": (96, 96, 11),
    "katan32": (32, 80, 254),
    "katan64": (64, 80, 254),
    "hight": (64, 128, 32),
    "aes128": (128, 128, 10),
}


def test_corpus_order_and_geometry():
    assert list(CORPUS) == list(GEOMETRY)
    for name, (block, key, rounds) in GEOMETRY.items():
        s = SPECS[name]
        assert (s.block_bits, s.key_bits, s.rounds) == (block, key, rounds)


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("name,key,pt,ct", KATS, ids=[f"{k[0]}-{i}" for i, k in enumerate(KATS)])
def test_known_answer(name, key, pt, ct, backend):
    c = make_cipher(name, bytes.fromhex(key))
    assert c.encrypt_block(bytes.fromhex(pt), backend).hex() == ct
    assert c.decrypt_block(bytes.fromhex(ct), backend).hex() == pt


def test_every_cipher_has_vectors():
    assert {k[0] for k in KATS} == set(CORPUS)


def test_aes_matches_cryptography_library():
    algorithms = pytest.importorskip("cryptography.hazmat.primitives.ciphers")
    rng = np.random.default_rng(11)
    for _ in range(20):
        key, data = rng.bytes(16), rng.bytes(16 * 64)
        enc = algorithms.Cipher(algorithms.algorithms.AES(key), algorithms.modes.ECB()).encryptor()
        assert make_cipher("aes128", key).encrypt_blocks(data).tobytes() == enc.update(data) + enc.finalize()


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("name", CORPUS)
def test_roundtrip_1000_random_pairs(name, backend):
    s = SPECS[name]
    rng = np.random.default_rng(CORPUS.index(name))
    for _ in range(1000):
        c = make_cipher(name, rng.bytes(s.key_bytes))
        p = rng.bytes(s.block_bytes)
        assert c.decrypt_block(c.encrypt_block(p, backend), backend) == p


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba disabled")
@pytest.mark.parametrize("name", CORPUS)
def test_backends_agree_on_bulk_data(name):
    s = SPECS[name]
    rng = np.random.default_rng(5)
    c = make_cipher(name, rng.bytes(s.key_bytes))
    data = np.frombuffer(rng.bytes(s.block_bytes * 257), dtype=np.uint8)
    a, b = c.encrypt_blocks(data, "numba"), c.encrypt_blocks(data, "numpy")
    assert np.array_equal(a, b)
    assert np.array_equal(c.decrypt_blocks(a, "numpy"), data)
    assert np.array_equal(c.decrypt_blocks(b, "numba"), data)


@pytest.mark.parametrize("name", CORPUS)
def test_blocks_are_independent(name):
    # ECB: each block encrypts the same as it would alone
    s = SPECS[name]
    rng = np.random.default_rng(9)
    c = make_cipher(name, rng.bytes(s.key_bytes))
    blocks = [rng.bytes(s.block_bytes) for _ in range(4)]
    bulk = c.encrypt_blocks(b"".join(blocks)).tobytes()
    assert bulk == b"".join(c.encrypt_block(b) for b in blocks)


@pytest.mark.parametrize("name", CORPUS)
def test_avalanche(name):
    s = SPECS[name]
    rng = np.random.default_rng(2024)
    total = 0
    for _ in range(1000):
        c = make_cipher(name, rng.bytes(s.key_bytes))
        p = bytearray(rng.bytes(s.block_bytes))
        bit = int(rng.integers(s.block_bits))
        q = bytearray(p)
        q[bit // 8] ^= 1 << (bit % 8)
        x = int.from_bytes(c.encrypt_block(bytes(p)), "big") ^ int.from_bytes(c.encrypt_block(bytes(q)), "big")
        total += bin(x).count("1") / s.block_bits
    assert 0.25 <= total / 1000 <= 0.75


@given(st.data())
def test_roundtrip_property(data):
    name = data.draw(st.sampled_from(CORPUS))
    s = SPECS[name]
    key = data.draw(st.binary(min_size=s.key_bytes, max_size=s.key_bytes))
    p = data.draw(st.binary(min_size=s.block_bytes, max_size=s.block_bytes))
    c = make_cipher(name, key)
    ct = c.encrypt_block(p)
    assert len(ct) == s.block_bytes
    assert c.decrypt_block(ct) == p
    # determinism across instances
    assert make_cipher(name, key).encrypt_block(p) == ct


def test_module_level_helpers():
    c = make_cipher("xtea", bytes(16))
    ct = encrypt_block(c, b"AAAAAAAA")
    assert ct.hex() == "ed23375a821a8c2d"
    assert decrypt_block(c, ct) == b"AAAAAAAA"


def test_bad_key_length():
    with pytest.raises(BadKeyLength) as e:
        make_cipher("xtea", bytes(8))
    assert (e.value.expected, e.value.got) == (16, 8)


def test_katan32_schedule_length():
    c = make_cipher("katan32", bytes(10))
    assert c.spec.rounds == 254
    assert len(c.expanded_key) == 254


def test_unknown_cipher():
    with pytest.raises(UnknownCipher, match="rc4"):
        make_cipher("rc4", bytes(16))


@pytest.mark.parametrize("name", CORPUS)
def test_bad_block_length(name):
    c = make_cipher(name, bytes(SPECS[name].key_bytes))
    with pytest.raises(BadBlockLength):
        c.encrypt_block(bytes(SPECS[name].block_bytes + 1))
    with pytest.raises(BadBlockLength):
        c.decrypt_blocks(bytes(SPECS[name].block_bytes * 2 - 1))


def test_unknown_backend():
    c = make_cipher("aes128", bytes(16))
    with pytest.raises(ValueError):
        c.encrypt_block(bytes(16), "cuda")


def test_cipher_classes_expose_spec():
    for name, cls in CIPHERS.items():
        assert cls.spec.name == name


def test_disable_flag_selects_numpy():
    code = "from unibench._accel import DEFAULT_BACKEND, HAVE_NUMBA; print(DEFAULT_BACKEND, HAVE_NUMBA)"
    env = dict(os.environ, UNIBENCH_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "False"]
