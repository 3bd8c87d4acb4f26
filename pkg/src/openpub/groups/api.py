"""Public surface of the bilinear-group package.

Wraps the raw tower/curve internals in three types:

* :class:`Scalar` -- element of the prime order field Zq,
* :class:`GroupElement` -- tagged element of G1, G2 or GT,
* :class:`PairingContext` -- the fixed curve context (generators, order,
  pairing, hashing).

The context is a process-wide constant for the one supported curve
(``bn254``); the ``OPENPUB_CURVE`` environment variable may pin it and is
rejected if it names anything else.  All values are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import hashlib
import os
from functools import lru_cache
from typing import Iterable, List, Sequence, Tuple

from ..errors import ConfigError, DecodingError, GroupMismatchError
from ..rng import SeededRng
from . import _curve, _fp, _pairing

CURVE_ID = "bn254"
ORDER = int(_fp.Q)

G1 = "g1"
G2 = "g2"
GT = "gt"

ENCODED_SIZE = {G1: _curve.G1_BYTES, G2: _curve.G2_BYTES}
SCALAR_SIZE = _curve.SCALAR_BYTES


class Scalar:
    """Field element mod the group order, canonical representation."""

    __slots__ = ("value",)

    def __init__(self, value: int):
        object.__setattr__(self, "value", int(value) % ORDER)

    def __setattr__(self, *_):
        raise AttributeError("Scalar is immutable")

    @classmethod
    def zero(cls) -> "Scalar":
        return cls(0)

    @classmethod
    def one(cls) -> "Scalar":
        return cls(1)

    def __add__(self, other: "Scalar") -> "Scalar":
        return Scalar(self.value + other.value)

    def __sub__(self, other: "Scalar") -> "Scalar":
        return Scalar(self.value - other.value)

    def __mul__(self, other: "Scalar") -> "Scalar":
        return Scalar(self.value * other.value)

    def __neg__(self) -> "Scalar":
        return Scalar(-self.value)

    def __pow__(self, exponent: int) -> "Scalar":
        return Scalar(pow(self.value, int(exponent), ORDER))

    def inverse(self) -> "Scalar":
        if self.value == 0:
            raise ZeroDivisionError("inverse of zero scalar")
        return Scalar(pow(self.value, ORDER - 2, ORDER))

    def is_zero(self) -> bool:
        return self.value == 0

    def __eq__(self, other) -> bool:
        return isinstance(other, Scalar) and self.value == other.value

    def __hash__(self) -> int:
        return hash(("scalar", self.value))

    def __repr__(self) -> str:
        return f"Scalar(0x{self.value:x})"

    def to_bytes(self) -> bytes:
        return self.value.to_bytes(SCALAR_SIZE, "big")

    @classmethod
    def from_bytes(cls, data: bytes) -> "Scalar":
        if len(data) != SCALAR_SIZE:
            raise DecodingError(f"scalar encoding must be {SCALAR_SIZE} bytes")
        v = int.from_bytes(data, "big")
        if v >= ORDER:
            raise DecodingError("scalar out of range")
        return cls(v)


class GroupElement:
    """Element of G1, G2 or GT, tagged by group."""

    __slots__ = ("group", "_raw")

    def __init__(self, group: str, raw):
        if group not in (G1, G2, GT):
            raise GroupMismatchError(f"unknown group tag {group!r}")
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "_raw", raw)

    def __setattr__(self, *_):
        raise AttributeError("GroupElement is immutable")

    # -- group law -----------------------------------------------------
    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._same(other)
        if self.group == G1:
            return GroupElement(G1, _curve.g1_add(self._raw, other._raw))
        if self.group == G2:
            return GroupElement(G2, _curve.g2_add(self._raw, other._raw))
        return GroupElement(GT, _fp.fq12_mul(self._raw, other._raw))

    def __neg__(self) -> "GroupElement":
        if self.group == G1:
            return GroupElement(G1, _curve.g1_neg(self._raw))
        if self.group == G2:
            return GroupElement(G2, _curve.g2_neg(self._raw))
        return GroupElement(GT, _fp.fq12_inv(self._raw))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def __mul__(self, scalar: "Scalar | int") -> "GroupElement":
        k = scalar.value if isinstance(scalar, Scalar) else int(scalar) % ORDER
        if self.group == G1:
            return GroupElement(G1, _curve.g1_mul(self._raw, k))
        if self.group == G2:
            return GroupElement(G2, _curve.g2_mul(self._raw, k))
        raise GroupMismatchError("use ** to exponentiate GT elements")

    __rmul__ = __mul__

    def __pow__(self, scalar: "Scalar | int") -> "GroupElement":
        if self.group != GT:
            raise GroupMismatchError("** is defined for GT elements only")
        k = scalar.value if isinstance(scalar, Scalar) else int(scalar) % ORDER
        return GroupElement(GT, _fp.fq12_cyclo_pow(self._raw, k))

    # -- predicates -----------------------------------------------------
    def is_identity(self) -> bool:
        if self.group == GT:
            return self._raw == _fp.FQ12_ONE
        return self._raw is None

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement) or other.group != self.group:
            return False
        if self.group == G1:
            return _curve.g1_eq(self._raw, other._raw)
        if self.group == G2:
            return _curve.g2_eq(self._raw, other._raw)
        return self._raw == other._raw

    def __hash__(self) -> int:
        if self.group == GT:
            raise TypeError("GT elements are not hashable")
        return hash((self.group, self.to_bytes()))

    def __repr__(self) -> str:
        if self.group == GT:
            return "GroupElement(gt, ...)"
        return f"GroupElement({self.group}, {self.to_bytes().hex()})"

    # -- codec ------------------------------------------------------------
    def to_bytes(self) -> bytes:
        """Canonical compressed encoding; GT has no persistent form."""
        if self.group == G1:
            return _curve.g1_to_bytes(self._raw)
        if self.group == G2:
            return _curve.g2_to_bytes(self._raw)
        raise GroupMismatchError("GT elements have no canonical encoding")

    def digest_bytes(self) -> bytes:
        """Deterministic bytes for transcript hashing (any group).

        For GT this is the flattened coefficient tuple; it is an in-memory
        hashing form, not a persistence codec.
        """
        if self.group != GT:
            return self.to_bytes()
        (a, b) = self._raw
        out = bytearray()
        for triple in (a, b):
            for c0, c1 in triple:
                out += int(c0).to_bytes(32, "big") + int(c1).to_bytes(32, "big")
        return bytes(out)

    @classmethod
    def from_bytes(cls, group: str, data: bytes) -> "GroupElement":
        if group == G1:
            return cls(G1, _curve.g1_from_bytes(data))
        if group == G2:
            return cls(G2, _curve.g2_from_bytes(data))
        raise GroupMismatchError(f"cannot decode elements of group {group!r}")

    def _same(self, other: "GroupElement") -> None:
        if not isinstance(other, GroupElement) or other.group != self.group:
            raise GroupMismatchError(
                f"operands in different groups: {self.group} vs "
                f"{getattr(other, 'group', type(other).__name__)}"
            )


@lru_cache(maxsize=256)
def _prepared(g2_bytes: bytes) -> _pairing.PreparedG2:
    return _pairing.PreparedG2(_curve.g2_from_bytes(g2_bytes))


class PairingContext:
    """Immutable description of the bilinear group setting."""

    __slots__ = ("curve_id", "order", "g1", "g2")

    def __init__(self):
        object.__setattr__(self, "curve_id", CURVE_ID)
        object.__setattr__(self, "order", ORDER)
        object.__setattr__(self, "g1", GroupElement(G1, _curve.G1_GEN))
        object.__setattr__(self, "g2", GroupElement(G2, _curve.G2_GEN))

    def __setattr__(self, *_):
        raise AttributeError("PairingContext is immutable")

    def identity(self, group: str) -> GroupElement:
        if group == GT:
            return GroupElement(GT, _fp.FQ12_ONE)
        if group in (G1, G2):
            return GroupElement(group, None)
        raise GroupMismatchError(f"unknown group tag {group!r}")

    # -- randomness -----------------------------------------------------
    def scalar_random(self, rng: SeededRng) -> Scalar:
        return Scalar(rng.randbelow(self.order))

    # -- pairing --------------------------------------------------------
    def pairing(self, a: GroupElement, b: GroupElement) -> GroupElement:
        if a.group != G1 or b.group != G2:
            raise GroupMismatchError("pairing expects (G1, G2) operands")
        if a._raw is None or b._raw is None:
            return self.identity(GT)
        prep = _prepared(b.to_bytes())
        return GroupElement(GT, _pairing.final_exp(_pairing.miller_loop([(a._raw, prep)])))

    def multi_pairing(self, pairs: Iterable[Tuple[GroupElement, GroupElement]]) -> GroupElement:
        """Product of pairings with a single shared final exponentiation."""
        prepared = []
        for a, b in pairs:
            if a.group != G1 or b.group != G2:
                raise GroupMismatchError("pairing expects (G1, G2) operands")
            if a._raw is None or b._raw is None:
                continue
            prepared.append((a._raw, _prepared(b.to_bytes())))
        return GroupElement(GT, _pairing.final_exp(_pairing.miller_loop(prepared)))

    def pairing_check(self, pairs: Iterable[Tuple[GroupElement, GroupElement]]) -> bool:
        """True iff the pairing product over the pairs is the identity."""
        return self.multi_pairing(pairs).is_identity()

    def gt_multiexp(self, pairs: Iterable[Tuple[GroupElement, "Scalar | int"]]) -> GroupElement:
        """prod base_i ** exp_i over GT with shared squarings.

        Bases must be pairing outputs (order-q subgroup), which is the only
        kind of GT element this API hands out.
        """
        raw = []
        for base, e in pairs:
            if base.group != GT:
                raise GroupMismatchError("gt_multiexp expects GT bases")
            k = e.value if isinstance(e, Scalar) else int(e)
            raw.append((base._raw, k))
        return GroupElement(GT, _fp.fq12_cyclo_multi_pow(raw))

    # -- hashing ----------------------------------------------------------
    def hash_to_scalar(self, tag: bytes, msg: bytes) -> Scalar:
        frame = (
            b"openpub-h2s\x00"
            + len(tag).to_bytes(2, "big")
            + tag
            + msg
        )
        digest = hashlib.sha512(frame).digest()
        return Scalar(int.from_bytes(digest, "big"))

    def hash_to_group(self, tag: bytes, msg: bytes, target: str) -> GroupElement:
        if target == G1:
            return GroupElement(G1, _curve.hash_to_g1(tag, msg))
        if target == G2:
            return GroupElement(G2, _curve.hash_to_g2(tag, msg))
        raise GroupMismatchError("hashing into GT is not supported")

    # -- batched exponentiation -------------------------------------------
    def multiexp(
        self, elements: Sequence[GroupElement], scalars: Sequence["Scalar | int"]
    ) -> GroupElement:
        """sum(scalar_i * element_i) with a shared doubling chain."""
        if len(elements) != len(scalars):
            raise ValueError("elements and scalars differ in length")
        if not elements:
            raise ValueError("empty multiexp")
        group = elements[0].group
        ks = [s.value if isinstance(s, Scalar) else int(s) % ORDER for s in scalars]
        raw_pairs: List = []
        for el, k in zip(elements, ks):
            if el.group != group:
                raise GroupMismatchError("multiexp over mixed groups")
            raw_pairs.append((el._raw, k))
        if group == G1:
            return GroupElement(G1, _curve.g1_multiexp(raw_pairs))
        if group == G2:
            return GroupElement(G2, _curve.g2_multiexp(raw_pairs))
        raise GroupMismatchError("multiexp is defined on G1/G2")


_CONTEXT = PairingContext()


def get_context() -> PairingContext:
    """Return the process-wide pairing context, honoring OPENPUB_CURVE."""
    pinned = os.environ.get("OPENPUB_CURVE", CURVE_ID)
    if pinned != CURVE_ID:
        raise ConfigError(
            f"unsupported curve {pinned!r}: this build provides {CURVE_ID!r} only"
        )
    return _CONTEXT
