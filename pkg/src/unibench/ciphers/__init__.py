"""The case-study cipher corpus.

>>> c = make_cipher("xtea", bytes(16))
>>> decrypt_block(c, encrypt_block(c, b"ABCDEFGH"))
b'ABCDEFGH'
"""

from ..errors import UnknownCipher
from .aes import AES128
from .base import BlockCipherSpec, CipherInstance
from .hight import HIGHT
from .katan import Katan32, Katan64
from .skipjack import Skipjack
from .threeway import ThreeWay
from .xtea import XTEA

CIPHERS = {cls.spec.name: cls for cls in (XTEA, Skipjack, ThreeWay, Katan32, Katan64, HIGHT, AES128)}
SPECS = {name: cls.spec for name, cls in CIPHERS.items()}
CORPUS = tuple(CIPHERS)


def make_cipher(name: str, key) -> CipherInstance:
    try:
        cls = CIPHERS[name]
    except KeyError:
        raise UnknownCipher(name) from None
    return cls(key)


def encrypt_block(c: CipherInstance, plaintext, backend=None) -> bytes:
    return c.encrypt_block(plaintext, backend)


def decrypt_block(c: CipherInstance, ciphertext, backend=None) -> bytes:
    return c.decrypt_block(ciphertext, backend)


__all__ = [
    "CIPHERS",
    "CORPUS",
    "SPECS",
    "BlockCipherSpec",
    "CipherInstance",
    "decrypt_block",
    "encrypt_block",
    "make_cipher",
]
