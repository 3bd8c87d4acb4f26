"""Point arithmetic on BN254: G1 over Fp and G2 over Fp2 (sextic twist).

Points are Jacobian triples; the point at infinity is ``None``.  Scalar
multiplication uses width-4 wNAF; ``multiexp`` interleaves wNAF digits
across bases so the doubling chain is shared (the verifiable-secret-sharing
commitment evaluations lean on it heavily).

Canonical encodings are compressed: a tag byte (0x00 infinity, 0x02 even-y,
0x03 odd-y) followed by the big-endian x coordinate (32 bytes for G1, the
two Fp2 limbs c0 || c1 for G2).  Decoding rejects out-of-range limbs,
off-curve x, non-zero padding on infinity, and (for G2) points outside the
order-q subgroup.
"""

from __future__ import annotations

import hashlib

from gmpy2 import invert, mpz

from ..errors import DecodingError
from ._fp import (
    FQ2_ONE,
    FQ2_ZERO,
    P,
    Q,
    fq2_add,
    fq2_inv,
    fq2_is_zero,
    fq2_mul,
    fq2_neg,
    fq2_scale,
    fq2_sqr,
    fq2_sqrt,
    fq2_sub,
)

B1 = mpz(3)                                  # G1: y^2 = x^3 + 3
B2 = fq2_scale(fq2_inv((mpz(9), mpz(1))), 3)  # twist: y^2 = x^3 + 3/(9+i)

G1_GEN = (mpz(1), mpz(2), mpz(1))
G2_GEN = (
    (
        mpz(10857046999023057135944570762232829481370756359578518086990519993285655852781),
        mpz(11559732032986387107991004021392285783925812861821192530917403151452391805634),
    ),
    (
        mpz(8495653923123431417604973247489272438418190587263600148770280649306958101930),
        mpz(4082367875863433681332203403145435568316851327593401208105741076214120093531),
    ),
    FQ2_ONE,
)

# G2 cofactor for a BN curve's correct sextic twist.
G2_COFACTOR = 2 * P - Q

G1_BYTES = 33
G2_BYTES = 65
SCALAR_BYTES = 32


def _wnaf(k: int, w: int = 4):
    """Width-w non-adjacent form, least significant digit first."""
    digits = []
    k = int(k)
    while k:
        if k & 1:
            d = k % (1 << w)
            if d >= 1 << (w - 1):
                d -= 1 << w
            k -= d
        else:
            d = 0
        digits.append(d)
        k >>= 1
    return digits


# ---------------------------------------------------------------------------
# G1
# ---------------------------------------------------------------------------

def g1_is_inf(pt) -> bool:
    return pt is None


def g1_neg(pt):
    if pt is None:
        return None
    return (pt[0], (-pt[1]) % P, pt[2])


def g1_dbl(pt):
    if pt is None:
        return None
    X, Y, Z = pt
    if Y == 0:
        return None
    A = X * X % P
    B = Y * Y % P
    C = B * B % P
    D = 2 * ((X + B) * (X + B) - A - C) % P
    E = 3 * A % P
    F = E * E % P
    X3 = (F - 2 * D) % P
    Y3 = (E * (D - X3) - 8 * C) % P
    Z3 = 2 * Y * Z % P
    return (X3, Y3, Z3)


def g1_add(p1, p2):
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    X1, Y1, Z1 = p1
    X2, Y2, Z2 = p2
    Z1Z1 = Z1 * Z1 % P
    Z2Z2 = Z2 * Z2 % P
    U1 = X1 * Z2Z2 % P
    U2 = X2 * Z1Z1 % P
    S1 = Y1 * Z2 * Z2Z2 % P
    S2 = Y2 * Z1 * Z1Z1 % P
    if U1 == U2:
        if S1 != S2:
            return None
        return g1_dbl(p1)
    H = (U2 - U1) % P
    I = 4 * H * H % P
    J = H * I % P
    r = 2 * (S2 - S1) % P
    V = U1 * I % P
    X3 = (r * r - J - 2 * V) % P
    Y3 = (r * (V - X3) - 2 * S1 * J) % P
    Z3 = ((Z1 + Z2) * (Z1 + Z2) - Z1Z1 - Z2Z2) * H % P
    return (X3, Y3, Z3)


def g1_mul(pt, k: int):
    k = int(k) % int(Q)
    if k == 0 or pt is None:
        return None
    digits = _wnaf(k)
    dbl = g1_dbl(pt)
    table = [pt]  # odd multiples 1P, 3P, ..., 15P
    for _ in range(7):
        table.append(g1_add(table[-1], dbl))
    acc = None
    for d in reversed(digits):
        acc = g1_dbl(acc)
        if d > 0:
            acc = g1_add(acc, table[d >> 1])
        elif d < 0:
            acc = g1_add(acc, g1_neg(table[(-d) >> 1]))
    return acc


def g1_multiexp(pairs):
    """Compute sum(k_i * P_i) with a shared doubling chain."""
    entries = []
    maxlen = 0
    for pt, k in pairs:
        k = int(k) % int(Q)
        if k == 0 or pt is None:
            continue
        digits = _wnaf(k)
        dbl = g1_dbl(pt)
        table = [pt]
        for _ in range(7):
            table.append(g1_add(table[-1], dbl))
        entries.append((digits, table))
        maxlen = max(maxlen, len(digits))
    acc = None
    for i in range(maxlen - 1, -1, -1):
        acc = g1_dbl(acc)
        for digits, table in entries:
            if i < len(digits):
                d = digits[i]
                if d > 0:
                    acc = g1_add(acc, table[d >> 1])
                elif d < 0:
                    acc = g1_add(acc, g1_neg(table[(-d) >> 1]))
    return acc


def g1_affine(pt):
    if pt is None:
        return None
    X, Y, Z = pt
    zinv = invert(Z, P)
    zinv2 = zinv * zinv % P
    return (X * zinv2 % P, Y * zinv2 * zinv % P)


def g1_eq(p1, p2) -> bool:
    if p1 is None or p2 is None:
        return p1 is None and p2 is None
    X1, Y1, Z1 = p1
    X2, Y2, Z2 = p2
    Z1Z1 = Z1 * Z1 % P
    Z2Z2 = Z2 * Z2 % P
    return (
        X1 * Z2Z2 % P == X2 * Z1Z1 % P
        and Y1 * Z2 * Z2Z2 % P == Y2 * Z1 * Z1Z1 % P
    )


def g1_on_curve(pt) -> bool:
    if pt is None:
        return True
    x, y = g1_affine(pt)
    return (y * y - x * x * x - B1) % P == 0


def g1_to_bytes(pt) -> bytes:
    if pt is None:
        return b"\x00" + b"\x00" * 32
    x, y = g1_affine(pt)
    tag = 0x02 | (int(y) & 1)
    return bytes([tag]) + int(x).to_bytes(32, "big")


def g1_from_bytes(data: bytes):
    if len(data) != G1_BYTES:
        raise DecodingError(f"G1 encoding must be {G1_BYTES} bytes")
    tag = data[0]
    if tag == 0x00:
        if any(data[1:]):
            raise DecodingError("non-canonical G1 infinity encoding")
        return None
    if tag not in (0x02, 0x03):
        raise DecodingError(f"bad G1 tag byte 0x{tag:02x}")
    x = mpz(int.from_bytes(data[1:], "big"))
    if x >= P:
        raise DecodingError("G1 x coordinate out of range")
    rhs = (x * x * x + B1) % P
    y = pow(rhs, (P + 1) // 4, P)
    if y * y % P != rhs:
        raise DecodingError("G1 x coordinate not on curve")
    if (int(y) & 1) != (tag & 1):
        y = (-y) % P
    return (x, mpz(y), mpz(1))


# ---------------------------------------------------------------------------
# G2 (same formulas over Fp2)
# ---------------------------------------------------------------------------

def g2_neg(pt):
    if pt is None:
        return None
    return (pt[0], fq2_neg(pt[1]), pt[2])


def g2_dbl(pt):
    if pt is None:
        return None
    X, Y, Z = pt
    if fq2_is_zero(Y):
        return None
    A = fq2_sqr(X)
    B = fq2_sqr(Y)
    C = fq2_sqr(B)
    t = fq2_add(X, B)
    D = fq2_sub(fq2_sqr(t), fq2_add(A, C))
    D = fq2_add(D, D)
    E = fq2_add(fq2_add(A, A), A)
    F = fq2_sqr(E)
    X3 = fq2_sub(F, fq2_add(D, D))
    C8 = fq2_scale(C, 8)
    Y3 = fq2_sub(fq2_mul(E, fq2_sub(D, X3)), C8)
    YZ = fq2_mul(Y, Z)
    Z3 = fq2_add(YZ, YZ)
    return (X3, Y3, Z3)


def g2_add(p1, p2):
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    X1, Y1, Z1 = p1
    X2, Y2, Z2 = p2
    Z1Z1 = fq2_sqr(Z1)
    Z2Z2 = fq2_sqr(Z2)
    U1 = fq2_mul(X1, Z2Z2)
    U2 = fq2_mul(X2, Z1Z1)
    S1 = fq2_mul(fq2_mul(Y1, Z2), Z2Z2)
    S2 = fq2_mul(fq2_mul(Y2, Z1), Z1Z1)
    if U1 == U2:
        if S1 != S2:
            return None
        return g2_dbl(p1)
    H = fq2_sub(U2, U1)
    I = fq2_sqr(fq2_add(H, H))
    J = fq2_mul(H, I)
    r = fq2_sub(S2, S1)
    r = fq2_add(r, r)
    V = fq2_mul(U1, I)
    X3 = fq2_sub(fq2_sub(fq2_sqr(r), J), fq2_add(V, V))
    SJ = fq2_mul(S1, J)
    Y3 = fq2_sub(fq2_mul(r, fq2_sub(V, X3)), fq2_add(SJ, SJ))
    Z3 = fq2_mul(fq2_sub(fq2_sqr(fq2_add(Z1, Z2)), fq2_add(Z1Z1, Z2Z2)), H)
    return (X3, Y3, Z3)


def g2_mul(pt, k: int):
    k = int(k)
    if pt is None:
        return None
    if k < 0:
        return g2_mul(g2_neg(pt), -k)
    if k == 0:
        return None
    digits = _wnaf(k)
    dbl = g2_dbl(pt)
    table = [pt]
    for _ in range(7):
        table.append(g2_add(table[-1], dbl))
    acc = None
    for d in reversed(digits):
        acc = g2_dbl(acc)
        if d > 0:
            acc = g2_add(acc, table[d >> 1])
        elif d < 0:
            acc = g2_add(acc, g2_neg(table[(-d) >> 1]))
    return acc


def g2_multiexp(pairs):
    entries = []
    maxlen = 0
    for pt, k in pairs:
        k = int(k) % int(Q)
        if k == 0 or pt is None:
            continue
        digits = _wnaf(k)
        dbl = g2_dbl(pt)
        table = [pt]
        for _ in range(7):
            table.append(g2_add(table[-1], dbl))
        entries.append((digits, table))
        maxlen = max(maxlen, len(digits))
    acc = None
    for i in range(maxlen - 1, -1, -1):
        acc = g2_dbl(acc)
        for digits, table in entries:
            if i < len(digits):
                d = digits[i]
                if d > 0:
                    acc = g2_add(acc, table[d >> 1])
                elif d < 0:
                    acc = g2_add(acc, g2_neg(table[(-d) >> 1]))
    return acc


def g2_affine(pt):
    if pt is None:
        return None
    X, Y, Z = pt
    zinv = fq2_inv(Z)
    zinv2 = fq2_sqr(zinv)
    return (fq2_mul(X, zinv2), fq2_mul(fq2_mul(Y, zinv2), zinv))


def g2_eq(p1, p2) -> bool:
    if p1 is None or p2 is None:
        return p1 is None and p2 is None
    X1, Y1, Z1 = p1
    X2, Y2, Z2 = p2
    Z1Z1 = fq2_sqr(Z1)
    Z2Z2 = fq2_sqr(Z2)
    return fq2_mul(X1, Z2Z2) == fq2_mul(X2, Z1Z1) and fq2_mul(
        fq2_mul(Y1, Z2), Z2Z2
    ) == fq2_mul(fq2_mul(Y2, Z1), Z1Z1)


def g2_on_curve(pt) -> bool:
    if pt is None:
        return True
    x, y = g2_affine(pt)
    return fq2_sub(fq2_sqr(y), fq2_add(fq2_mul(fq2_sqr(x), x), B2)) == FQ2_ZERO


def g2_in_subgroup(pt) -> bool:
    return g2_on_curve(pt) and g2_mul(pt, int(Q)) is None


def g2_to_bytes(pt) -> bytes:
    if pt is None:
        return b"\x00" + b"\x00" * 64
    (x0, x1), (y0, y1) = g2_affine(pt)
    parity = int(y0) & 1 if y0 != 0 else int(y1) & 1
    tag = 0x02 | parity
    return bytes([tag]) + int(x0).to_bytes(32, "big") + int(x1).to_bytes(32, "big")


def g2_from_bytes(data: bytes):
    if len(data) != G2_BYTES:
        raise DecodingError(f"G2 encoding must be {G2_BYTES} bytes")
    tag = data[0]
    if tag == 0x00:
        if any(data[1:]):
            raise DecodingError("non-canonical G2 infinity encoding")
        return None
    if tag not in (0x02, 0x03):
        raise DecodingError(f"bad G2 tag byte 0x{tag:02x}")
    x0 = mpz(int.from_bytes(data[1:33], "big"))
    x1 = mpz(int.from_bytes(data[33:], "big"))
    if x0 >= P or x1 >= P:
        raise DecodingError("G2 x coordinate out of range")
    x = (x0, x1)
    rhs = fq2_add(fq2_mul(fq2_sqr(x), x), B2)
    y = fq2_sqrt(rhs)
    if y is None:
        raise DecodingError("G2 x coordinate not on curve")
    parity = int(y[0]) & 1 if y[0] != 0 else int(y[1]) & 1
    if parity != (tag & 1):
        y = fq2_neg(y)
    pt = (x, y, FQ2_ONE)
    if not g2_in_subgroup(pt):
        raise DecodingError("G2 point not in the prime-order subgroup")
    return pt


# ---------------------------------------------------------------------------
# Hashing to the curve (try-and-increment)
# ---------------------------------------------------------------------------

def _hash_blocks(tag: bytes, msg: bytes, ctr: int, n: int) -> int:
    out = b""
    block = 0
    while len(out) < n:
        out += hashlib.sha256(
            b"openpub-h2c\x00"
            + len(tag).to_bytes(2, "big")
            + tag
            + ctr.to_bytes(4, "big")
            + block.to_bytes(2, "big")
            + msg
        ).digest()
        block += 1
    return int.from_bytes(out[:n], "big")


def hash_to_g1(tag: bytes, msg: bytes):
    ctr = 0
    while True:
        h = _hash_blocks(tag, msg, ctr, 41)
        x = mpz(h >> 8) % P
        rhs = (x * x * x + B1) % P
        y = pow(rhs, (P + 1) // 4, P)
        if y * y % P == rhs:
            if h & 1:  # sign bit from the spare hash byte
                y = (-y) % P
            return (x, mpz(y), mpz(1))
        ctr += 1


def hash_to_g2(tag: bytes, msg: bytes):
    ctr = 0
    while True:
        h0 = _hash_blocks(tag, msg, 2 * ctr, 41)
        h1 = _hash_blocks(tag, msg, 2 * ctr + 1, 40)
        x = (mpz(h0 >> 8) % P, mpz(h1) % P)
        rhs = fq2_add(fq2_mul(fq2_sqr(x), x), B2)
        y = fq2_sqrt(rhs)
        if y is not None:
            if h0 & 1:
                y = fq2_neg(y)
            pt = g2_mul((x, y, FQ2_ONE), int(G2_COFACTOR))
            if pt is not None:
                return pt
        ctr += 1
