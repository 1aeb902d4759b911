"""Fixed-width bit strings and the hash/XOR primitives the protocol is built on."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

DEFAULT_HASH_ID = "sha256"
DEFAULT_WIDTH = 256

# Timestamps embed as a 64-bit field, so narrower protocol widths are unusable.
MIN_WIDTH = 64


@dataclass(frozen=True)
class Bits:
    """An immutable bit string of fixed width, canonically big-endian bytes.

    The width is whatever the value was created with; every operation that
    combines two values insists the widths match.
    """

    value: bytes

    def __post_init__(self) -> None:
        if not isinstance(self.value, bytes):
            object.__setattr__(self, "value", bytes(self.value))
        if len(self.value) == 0:
            raise ValueError("Bits value must be non-empty")

    @property
    def width(self) -> int:
        """Width in bits (always a multiple of 8)."""
        return len(self.value) * 8

    @classmethod
    def zeros(cls, width: int) -> Bits:
        if width <= 0 or width % 8:
            raise ValueError(f"width must be a positive multiple of 8, got {width}")
        return cls(bytes(width // 8))

    @classmethod
    def from_hex(cls, text: str) -> Bits:
        return cls(bytes.fromhex(text))

    def hex(self) -> str:
        return self.value.hex()

    def __xor__(self, other: Bits) -> Bits:
        if not isinstance(other, Bits):
            return NotImplemented
        if self.width != other.width:
            raise ValueError(f"width mismatch: {self.width} != {other.width}")
        return Bits(bytes(a ^ b for a, b in zip(self.value, other.value)))

    def __repr__(self) -> str:
        return f"Bits({self.value.hex()!r})"


def hash_width(hash_id: str) -> int:
    """Output width in bits of the named hash algorithm."""
    try:
        digest_size = hashlib.new(hash_id).digest_size
    except (ValueError, TypeError) as exc:
        raise ValueError(f"unknown hash algorithm {hash_id!r}") from exc
    if digest_size == 0:
        raise ValueError(f"hash algorithm {hash_id!r} has no fixed output width")
    return digest_size * 8


def hash_bytes(data: bytes, hash_id: str = DEFAULT_HASH_ID) -> Bits:
    """One-way hash of an arbitrary byte string, as a digest-width value."""
    return Bits(hashlib.new(hash_id, data).digest())


def hash_bits(b: Bits, hash_id: str = DEFAULT_HASH_ID) -> Bits:
    """One-way hash of a fixed-width value via its canonical byte encoding."""
    return hash_bytes(b.value, hash_id)


def embed_timestamp(t: int, width: int = DEFAULT_WIDTH) -> Bits:
    """Embed epoch seconds as a 64-bit big-endian field, zero-padded to width.

    Injective over 0 <= t < 2**64; anything outside is rejected.
    """
    if not 0 <= t < 1 << 64:
        raise ValueError(f"timestamp out of 64-bit range: {t}")
    if width < MIN_WIDTH or width % 8:
        raise ValueError(f"width must be a multiple of 8 and at least {MIN_WIDTH}, got {width}")
    pad = bytes((width - 64) // 8)
    return Bits(pad + t.to_bytes(8, "big"))
