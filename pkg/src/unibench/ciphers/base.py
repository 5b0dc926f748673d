from dataclasses import dataclass

import numpy as np

from .._accel import resolve_backend
from ..errors import BadBlockLength, BadKeyLength


@dataclass(frozen=True)
class BlockCipherSpec:
    name: str
    block_bits: int
    key_bits: int
    rounds: int

    @property
    def block_bytes(self) -> int:
        return self.block_bits // 8

    @property
    def key_bytes(self) -> int:
        return self.key_bits // 8


def as_byte_array(data) -> np.ndarray:
    if isinstance(data, np.ndarray):
        return np.ascontiguousarray(data, dtype=np.uint8).reshape(-1)
    return np.frombuffer(bytes(data), dtype=np.uint8)


class CipherInstance:
    """A block cipher with its key schedule already expanded.

    Subclasses provide ``spec``, ``_expand_key`` and the byte <-> state
    conversions, plus a ``kernels`` table mapping each backend name to an
    ``(encrypt, decrypt)`` pair of functions ``(state, expanded_key) -> state``.
    Blocks are processed independently (ECB, no chaining).
    """

    spec: BlockCipherSpec
    kernels: dict

    def __init__(self, key):
        key = bytes(key)
        if len(key) != self.spec.key_bytes:
            raise BadKeyLength(self.spec.key_bytes, len(key))
        self.key = key
        self.expanded_key = self._expand_key(key)

    def __repr__(self):
        return f"<{type(self).__name__} {self.spec.name}>"

    def _expand_key(self, key: bytes):
        raise NotImplementedError

    def _to_state(self, data: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _from_state(self, state: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _run(self, data, backend, direction):
        buf = as_byte_array(data)
        if buf.size % self.spec.block_bytes:
            raise BadBlockLength(self.spec.block_bytes, buf.size % self.spec.block_bytes)
        fn = self.kernels[resolve_backend(backend)][direction]
        return self._from_state(fn(self._to_state(buf), self.expanded_key))

    def encrypt_blocks(self, data, backend=None) -> np.ndarray:
        """Encrypt a whole number of blocks; returns a flat uint8 array."""
        return self._run(data, backend, 0)

    def decrypt_blocks(self, data, backend=None) -> np.ndarray:
        return self._run(data, backend, 1)

    def encrypt_block(self, block, backend=None) -> bytes:
        block = bytes(block)
        if len(block) != self.spec.block_bytes:
            raise BadBlockLength(self.spec.block_bytes, len(block))
        return self.encrypt_blocks(block, backend).tobytes()

    def decrypt_block(self, block, backend=None) -> bytes:
        block = bytes(block)
        if len(block) != self.spec.block_bytes:
            raise BadBlockLength(self.spec.block_bytes, len(block))
        return self.decrypt_blocks(block, backend).tobytes()
