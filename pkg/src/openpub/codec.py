"""Deterministic byte codec used for transcripts, transactions and blocks.

Layout rules: integers are fixed-width big-endian; variable-length byte
strings and lists carry a u32 length prefix; fields are written in a fixed
order with no padding.  Two encodings of equal objects are byte-identical,
which is what transaction hashing and golden-log replay rely on.
"""

from __future__ import annotations

from .errors import DecodingError


class Encoder:
    __slots__ = ("_parts",)

    def __init__(self):
        self._parts = []

    def u8(self, v: int) -> "Encoder":
        self._parts.append(int(v).to_bytes(1, "big"))
        return self

    def u16(self, v: int) -> "Encoder":
        self._parts.append(int(v).to_bytes(2, "big"))
        return self

    def u32(self, v: int) -> "Encoder":
        self._parts.append(int(v).to_bytes(4, "big"))
        return self

    def u64(self, v: int) -> "Encoder":
        self._parts.append(int(v).to_bytes(8, "big"))
        return self

    def i64(self, v: int) -> "Encoder":
        self._parts.append(int(v).to_bytes(8, "big", signed=True))
        return self

    def raw(self, data: bytes) -> "Encoder":
        """Fixed-width field; the reader must know its length."""
        self._parts.append(bytes(data))
        return self

    def blob(self, data: bytes) -> "Encoder":
        """Length-prefixed byte string."""
        self.u32(len(data))
        self._parts.append(bytes(data))
        return self

    def text(self, s: str) -> "Encoder":
        return self.blob(s.encode("utf-8"))

    def done(self) -> bytes:
        return b"".join(self._parts)


class Decoder:
    __slots__ = ("_data", "_pos")

    def __init__(self, data: bytes):
        self._data = bytes(data)
        self._pos = 0

    def _take(self, n: int) -> bytes:
        if self._pos + n > len(self._data):
            raise DecodingError("truncated encoding")
        out = self._data[self._pos : self._pos + n]
        self._pos += n
        return out

    def u8(self) -> int:
        return self._take(1)[0]

    def u16(self) -> int:
        return int.from_bytes(self._take(2), "big")

    def u32(self) -> int:
        return int.from_bytes(self._take(4), "big")

    def u64(self) -> int:
        return int.from_bytes(self._take(8), "big")

    def i64(self) -> int:
        return int.from_bytes(self._take(8), "big", signed=True)

    def raw(self, n: int) -> bytes:
        return self._take(n)

    def blob(self) -> bytes:
        return self._take(self.u32())

    def text(self) -> str:
        return self.blob().decode("utf-8")

    def finish(self) -> None:
        if self._pos != len(self._data):
            raise DecodingError("trailing bytes after decode")
