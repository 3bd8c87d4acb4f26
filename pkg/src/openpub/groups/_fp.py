"""Field tower for the BN254 pairing curve.

Layout: Fp2 = Fp[i]/(i^2 + 1), Fp6 = Fp2[v]/(v^3 - XI) with XI = 9 + i,
Fp12 = Fp6[w]/(w^2 - v).  Elements are plain tuples of gmpy2 integers
(mpz), kept canonical (reduced mod P) after every operation; the functional
style avoids per-element object overhead in the Miller loop.

All derived constants (Frobenius multipliers, twist coefficients) are
computed at import time from the curve parameter U rather than transcribed,
so a typo cannot silently corrupt them.
"""

from __future__ import annotations

from gmpy2 import invert, mpz

# Curve parameter u and the BN polynomial parametrization of (p, q).
U = mpz(4965661367192848881)
P = 36 * U**4 + 36 * U**3 + 24 * U**2 + 6 * U + 1
Q = 36 * U**4 + 36 * U**3 + 18 * U**2 + 6 * U + 1
ATE_LOOP = 6 * U + 2

assert P % 4 == 3  # enables sqrt via x^((p+1)/4)
assert P % 6 == 1

_P = P  # local alias; hot functions bind it as a default arg

# ---------------------------------------------------------------------------
# Fp2
# ---------------------------------------------------------------------------

FQ2_ZERO = (mpz(0), mpz(0))
FQ2_ONE = (mpz(1), mpz(0))
XI = (mpz(9), mpz(1))


def fq2(a: int, b: int = 0):
    return (mpz(a) % P, mpz(b) % P)


def fq2_add(x, y, p=_P):
    return ((x[0] + y[0]) % p, (x[1] + y[1]) % p)


def fq2_sub(x, y, p=_P):
    return ((x[0] - y[0]) % p, (x[1] - y[1]) % p)


def fq2_neg(x, p=_P):
    return ((-x[0]) % p, (-x[1]) % p)


def fq2_mul(x, y, p=_P):
    a0, a1 = x
    b0, b1 = y
    t0 = a0 * b0
    t1 = a1 * b1
    return ((t0 - t1) % p, ((a0 + a1) * (b0 + b1) - t0 - t1) % p)


def fq2_sqr(x, p=_P):
    a0, a1 = x
    return ((a0 + a1) * (a0 - a1) % p, (a0 * a1 * 2) % p)


def fq2_scale(x, c, p=_P):
    return (x[0] * c % p, x[1] * c % p)


def fq2_mul_xi(x, p=_P):
    # (9 + i) * (a0 + a1 i) = (9 a0 - a1) + (9 a1 + a0) i
    a0, a1 = x
    return ((9 * a0 - a1) % p, (9 * a1 + a0) % p)


def fq2_conj(x, p=_P):
    return (x[0], (-x[1]) % p)


def fq2_inv(x, p=_P):
    a0, a1 = x
    norm = (a0 * a0 + a1 * a1) % p
    ninv = invert(norm, p)
    return (a0 * ninv % p, (-a1) * ninv % p)


def fq2_pow(x, e: int):
    r = FQ2_ONE
    b = x
    e = int(e)
    while e:
        if e & 1:
            r = fq2_mul(r, b)
        b = fq2_sqr(b)
        e >>= 1
    return r


def fq2_is_zero(x) -> bool:
    return x[0] == 0 and x[1] == 0


def fq2_sqrt(x):
    """Square root in Fp2, or None when x is a non-residue."""
    a, b = x
    if b == 0:
        if pow(a, (P - 1) // 2, P) != P - 1:
            return (pow(a, (P + 1) // 4, P), mpz(0))
        # a is a non-residue in Fp: sqrt(a) = i * sqrt(-a)
        return (mpz(0), pow((-a) % P, (P + 1) // 4, P))
    norm = (a * a + b * b) % P
    s = pow(norm, (P + 1) // 4, P)
    if s * s % P != norm:
        return None
    inv2 = invert(mpz(2), P)
    t = (a + s) * inv2 % P
    if pow(t, (P - 1) // 2, P) == P - 1:
        t = (a - s) * inv2 % P
    u = pow(t, (P + 1) // 4, P)
    if u * u % P != t:
        return None
    v = b * invert(2 * u % P, P) % P
    cand = (u, v)
    return cand if fq2_sqr(cand) == (a % P, b % P) else None


# ---------------------------------------------------------------------------
# Fp6: (c0, c1, c2) with value c0 + c1 v + c2 v^2
# ---------------------------------------------------------------------------

FQ6_ZERO = (FQ2_ZERO, FQ2_ZERO, FQ2_ZERO)
FQ6_ONE = (FQ2_ONE, FQ2_ZERO, FQ2_ZERO)


def fq6_add(x, y):
    return (fq2_add(x[0], y[0]), fq2_add(x[1], y[1]), fq2_add(x[2], y[2]))


def fq6_sub(x, y):
    return (fq2_sub(x[0], y[0]), fq2_sub(x[1], y[1]), fq2_sub(x[2], y[2]))


def fq6_neg(x):
    return (fq2_neg(x[0]), fq2_neg(x[1]), fq2_neg(x[2]))


def fq6_mul(x, y):
    a0, a1, a2 = x
    b0, b1, b2 = y
    v0 = fq2_mul(a0, b0)
    v1 = fq2_mul(a1, b1)
    v2 = fq2_mul(a2, b2)
    c0 = fq2_add(v0, fq2_mul_xi(fq2_sub(fq2_mul(fq2_add(a1, a2), fq2_add(b1, b2)), fq2_add(v1, v2))))
    c1 = fq2_add(fq2_sub(fq2_mul(fq2_add(a0, a1), fq2_add(b0, b1)), fq2_add(v0, v1)), fq2_mul_xi(v2))
    c2 = fq2_add(fq2_sub(fq2_mul(fq2_add(a0, a2), fq2_add(b0, b2)), fq2_add(v0, v2)), v1)
    return (c0, c1, c2)


def fq6_sqr(x):
    a0, a1, a2 = x
    s0 = fq2_sqr(a0)
    ab = fq2_mul(a0, a1)
    s1 = fq2_add(ab, ab)
    s2 = fq2_sqr(fq2_add(fq2_sub(a0, a1), a2))
    bc = fq2_mul(a1, a2)
    s3 = fq2_add(bc, bc)
    s4 = fq2_sqr(a2)
    c0 = fq2_add(s0, fq2_mul_xi(s3))
    c1 = fq2_add(s1, fq2_mul_xi(s4))
    c2 = fq2_sub(fq2_add(fq2_add(s1, s2), s3), fq2_add(s0, s4))
    return (c0, c1, c2)


def fq6_mul_by_v(x):
    return (fq2_mul_xi(x[2]), x[0], x[1])


def fq6_scale_fq2(x, c):
    return (fq2_mul(x[0], c), fq2_mul(x[1], c), fq2_mul(x[2], c))


def fq6_inv(x):
    a0, a1, a2 = x
    c0 = fq2_sub(fq2_sqr(a0), fq2_mul_xi(fq2_mul(a1, a2)))
    c1 = fq2_sub(fq2_mul_xi(fq2_sqr(a2)), fq2_mul(a0, a1))
    c2 = fq2_sub(fq2_sqr(a1), fq2_mul(a0, a2))
    f = fq2_add(
        fq2_mul(a0, c0),
        fq2_mul_xi(fq2_add(fq2_mul(a2, c1), fq2_mul(a1, c2))),
    )
    finv = fq2_inv(f)
    return (fq2_mul(c0, finv), fq2_mul(c1, finv), fq2_mul(c2, finv))


def fq6_is_zero(x) -> bool:
    return all(fq2_is_zero(c) for c in x)


# ---------------------------------------------------------------------------
# Fp12: (b0, b1) with value b0 + b1 w
# ---------------------------------------------------------------------------

FQ12_ZERO = (FQ6_ZERO, FQ6_ZERO)
FQ12_ONE = (FQ6_ONE, FQ6_ZERO)


def fq12_mul(x, y):
    x0, x1 = x
    y0, y1 = y
    t0 = fq6_mul(x0, y0)
    t1 = fq6_mul(x1, y1)
    c0 = fq6_add(t0, fq6_mul_by_v(t1))
    c1 = fq6_sub(fq6_mul(fq6_add(x0, x1), fq6_add(y0, y1)), fq6_add(t0, t1))
    return (c0, c1)


def fq12_sqr(x):
    x0, x1 = x
    t = fq6_mul(x0, x1)
    c0 = fq6_sub(
        fq6_mul(fq6_add(x0, x1), fq6_add(x0, fq6_mul_by_v(x1))),
        fq6_add(t, fq6_mul_by_v(t)),
    )
    return (c0, fq6_add(t, t))


def fq12_conj(x):
    return (x[0], fq6_neg(x[1]))


def fq12_inv(x):
    x0, x1 = x
    t = fq6_inv(fq6_sub(fq6_sqr(x0), fq6_mul_by_v(fq6_sqr(x1))))
    return (fq6_mul(x0, t), fq6_neg(fq6_mul(x1, t)))


def fq12_pow(x, e: int):
    e = int(e)
    if e < 0:
        x = fq12_inv(x)
        e = -e
    r = FQ12_ONE
    b = x
    while e:
        if e & 1:
            r = fq12_mul(r, b)
        b = fq12_sqr(b)
        e >>= 1
    return r


def fq12_is_one(x) -> bool:
    return x == FQ12_ONE


# Cyclotomic-subgroup shortcuts.  Pairing outputs live in the subgroup of
# order Phi_12(p), where inversion is conjugation and squaring admits the
# Granger-Scott formulas (9 Fp2 squarings instead of a full Fp12 square).

def fq12_cyclo_sqr(x):
    (g0, g1, g2), (h0, h1, h2) = x
    t0 = fq2_sqr(h1)
    t1 = fq2_sqr(g0)
    t6 = fq2_sub(fq2_sqr(fq2_add(h1, g0)), fq2_add(t0, t1))   # 2 g0 h1
    t2 = fq2_sqr(g2)
    t3 = fq2_sqr(h0)
    t7 = fq2_sub(fq2_sqr(fq2_add(g2, h0)), fq2_add(t2, t3))   # 2 g2 h0
    t4 = fq2_sqr(h2)
    t5 = fq2_sqr(g1)
    t8 = fq2_mul_xi(fq2_sub(fq2_sqr(fq2_add(h2, g1)), fq2_add(t4, t5)))
    t0 = fq2_add(fq2_mul_xi(t0), t1)
    t2 = fq2_add(fq2_mul_xi(t2), t3)
    t4 = fq2_add(fq2_mul_xi(t4), t5)
    out_g0 = fq2_add(fq2_scale(fq2_sub(t0, g0), 2), t0)
    out_g1 = fq2_add(fq2_scale(fq2_sub(t2, g1), 2), t2)
    out_g2 = fq2_add(fq2_scale(fq2_sub(t4, g2), 2), t4)
    out_h0 = fq2_add(fq2_scale(fq2_add(t8, h0), 2), t8)
    out_h1 = fq2_add(fq2_scale(fq2_add(t6, h1), 2), t6)
    out_h2 = fq2_add(fq2_scale(fq2_add(t7, h2), 2), t7)
    return ((out_g0, out_g1, out_g2), (out_h0, out_h1, out_h2))


def _wnaf(k: int, w: int = 4):
    digits = []
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


def fq12_cyclo_pow(x, e: int):
    """x^e for x in the cyclotomic subgroup (conjugation as inversion)."""
    return fq12_cyclo_multi_pow([(x, e)])


def fq12_cyclo_multi_pow(pairs):
    """prod base_i^exp_i over cyclotomic elements, shared squarings."""
    entries = []
    maxlen = 0
    for base, e in pairs:
        e = int(e)
        if e == 0:
            continue
        if e < 0:
            base = fq12_conj(base)
            e = -e
        digits = _wnaf(e)
        x2 = fq12_cyclo_sqr(base)
        table = [base]
        for _ in range(7):
            table.append(fq12_mul(table[-1], x2))
        entries.append((digits, table))
        maxlen = max(maxlen, len(digits))
    acc = FQ12_ONE
    for i in range(maxlen - 1, -1, -1):
        acc = fq12_cyclo_sqr(acc)
        for digits, table in entries:
            if i < len(digits):
                d = digits[i]
                if d > 0:
                    acc = fq12_mul(acc, table[d >> 1])
                elif d < 0:
                    acc = fq12_mul(acc, fq12_conj(table[(-d) >> 1]))
    return acc


# Frobenius multipliers: viewing Fp12 over Fp2 with basis w^0..w^5
# (w^6 = XI), the k-th coefficient of x^(p^m) picks up XI^(k (p^m - 1)/6).
def _frob_coeffs(m: int):
    return tuple(fq2_pow(XI, k * (P**m - 1) // 6) for k in range(6))


_FROB1 = _frob_coeffs(1)
_FROB2 = _frob_coeffs(2)
_FROB3 = _frob_coeffs(3)

# Untwist-Frobenius multipliers for G2 points (x, y) on the twist:
# pi(x, y) = (conj(x) * TW_X1, conj(y) * TW_Y1) and similarly for pi^2.
TW_X1 = fq2_pow(XI, (P - 1) // 3)
TW_Y1 = fq2_pow(XI, (P - 1) // 2)
TW_X2 = fq2_pow(XI, (P * P - 1) // 3)
TW_Y2 = fq2_pow(XI, (P * P - 1) // 2)
assert TW_X2[1] == 0 and TW_Y2[1] == 0  # p^2 multipliers sit in Fp


def _fq12_coeffs(x):
    (a0, a1, a2), (b0, b1, b2) = x
    return [a0, b0, a1, b1, a2, b2]  # w^0, w^1, ..., w^5


def _fq12_from_coeffs(c):
    return ((c[0], c[2], c[4]), (c[1], c[3], c[5]))


def fq12_frob(x, m: int = 1):
    """x^(p^m) for m in {1, 2, 3}."""
    table = {1: _FROB1, 2: _FROB2, 3: _FROB3}[m]
    conj = m % 2 == 1
    out = []
    for k, c in enumerate(_fq12_coeffs(x)):
        if conj:
            c = fq2_conj(c)
        out.append(fq2_mul(c, table[k]))
    return _fq12_from_coeffs(out)


def fq12_mul_line(f, c0: int, c1, c3):
    """Multiply f by the sparse element c0 + c1 w + c3 w^3 (c0 in Fp)."""
    f0, f1 = f
    g0, g1, g2 = f1
    # t0 = f0 * c0  (scalar in Fp)
    t0 = (fq2_scale(f0[0], c0), fq2_scale(f0[1], c0), fq2_scale(f0[2], c0))
    # t1 = f1 * (c1 + c3 v)
    t1 = (
        fq2_add(fq2_mul(g0, c1), fq2_mul_xi(fq2_mul(g2, c3))),
        fq2_add(fq2_mul(g0, c3), fq2_mul(g1, c1)),
        fq2_add(fq2_mul(g1, c3), fq2_mul(g2, c1)),
    )
    # middle = (f0 + f1) * ((c0 + c1) + c3 v)
    h = fq6_add(f0, f1)
    d0 = (c1[0] + c0) % P, c1[1]
    mid = (
        fq2_add(fq2_mul(h[0], d0), fq2_mul_xi(fq2_mul(h[2], c3))),
        fq2_add(fq2_mul(h[0], c3), fq2_mul(h[1], d0)),
        fq2_add(fq2_mul(h[1], c3), fq2_mul(h[2], d0)),
    )
    out0 = fq6_add(t0, fq6_mul_by_v(t1))
    out1 = fq6_sub(mid, fq6_add(t0, t1))
    return (out0, out1)
