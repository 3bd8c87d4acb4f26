"""Optimal ate pairing on BN254.

The Miller loop consumes precomputed line coefficients for the G2 argument
(:class:`PreparedG2`), so pairings against a fixed right-hand point -- the
generator, a group verify key -- cost only sparse Fp12 updates.  A
multi-pairing entry point shares the accumulator squarings across all pairs
and applies a single final exponentiation, which is what the signature
verification equations use.

``final_exp_naive`` is the slow reference: one plain exponentiation by
(p^12 - 1)/q.  The structured routine is cross-checked against it in the
test suite.
"""

from __future__ import annotations

from gmpy2 import invert

from ._fp import (
    FQ12_ONE,
    P,
    Q,
    TW_X1,
    TW_X2,
    TW_Y1,
    TW_Y2,
    U,
    fq2_conj,
    fq2_mul,
    fq2_neg,
    fq2_scale,
    fq2_sqr,
    fq2_sub,
    fq12_conj,
    fq12_cyclo_pow,
    fq12_cyclo_sqr,
    fq12_frob,
    fq12_inv,
    fq12_mul,
    fq12_mul_line,
    fq12_pow,
    fq12_sqr,
)
from ._curve import g1_affine, g2_affine

# Ate loop 6u + 2 in NAF, most significant digit first (leading digit dropped).
def _naf(k: int):
    digits = []
    while k:
        if k & 1:
            d = 2 - (k % 4)
            k -= d
        else:
            d = 0
        digits.append(d)
        k >>= 1
    return digits


_ATE_NAF = _naf(int(6 * U + 2))[::-1]  # MSB first
_ATE_PATTERN = _ATE_NAF[1:]


class PreparedG2:
    """Line coefficients of the ate Miller loop for a fixed G2 point.

    Each entry is an (A, B) pair over Fp2 describing the line through the
    running point: evaluated at P = (xP, yP) in G1 it contributes the sparse
    element yP - A xP w + B w^3.
    """

    __slots__ = ("coeffs", "is_infinity")

    def __init__(self, q_jacobian):
        if q_jacobian is None:
            self.is_infinity = True
            self.coeffs = []
            return
        self.is_infinity = False
        qx, qy = g2_affine(q_jacobian)
        nqx, nqy = qx, fq2_neg(qy)
        coeffs = []
        tx, ty = qx, qy

        def dbl_step():
            nonlocal tx, ty
            # lam = 3 x^2 / (2 y)
            lam = fq2_mul(
                fq2_scale(fq2_sqr(tx), 3),
                _fq2_inverse(fq2_scale(ty, 2)),
            )
            b = fq2_sub(fq2_mul(lam, tx), ty)
            coeffs.append((lam, b))
            x3 = fq2_sub(fq2_sqr(lam), fq2_scale(tx, 2))
            y3 = fq2_sub(fq2_mul(lam, fq2_sub(tx, x3)), ty)
            tx, ty = x3, y3

        def add_step(px, py):
            nonlocal tx, ty
            lam = fq2_mul(fq2_sub(ty, py), _fq2_inverse(fq2_sub(tx, px)))
            b = fq2_sub(fq2_mul(lam, tx), ty)
            coeffs.append((lam, b))
            x3 = fq2_sub(fq2_sub(fq2_sqr(lam), tx), px)
            y3 = fq2_sub(fq2_mul(lam, fq2_sub(tx, x3)), ty)
            tx, ty = x3, y3

        for digit in _ATE_PATTERN:
            dbl_step()
            if digit == 1:
                add_step(qx, qy)
            elif digit == -1:
                add_step(nqx, nqy)

        # Frobenius endings: T + pi(Q), then T - pi^2(Q).
        q1x = fq2_mul(fq2_conj(qx), TW_X1)
        q1y = fq2_mul(fq2_conj(qy), TW_Y1)
        q2x = fq2_mul(qx, TW_X2)
        q2y = fq2_mul(qy, TW_Y2)
        add_step(q1x, q1y)
        add_step(q2x, fq2_neg(q2y))
        self.coeffs = coeffs


def _fq2_inverse(x):
    a0, a1 = x
    norm = (a0 * a0 + a1 * a1) % P
    ninv = invert(norm, P)
    return (a0 * ninv % P, (-a1) * ninv % P)


def miller_loop(pairs) -> "tuple":
    """Shared-squaring Miller loop over [(g1_point, PreparedG2), ...]."""
    live = []
    for pt, prep in pairs:
        if pt is None or prep.is_infinity:
            continue
        xp, yp = g1_affine(pt)
        live.append((int(xp), int(yp), prep.coeffs))
    if not live:
        return FQ12_ONE

    f = FQ12_ONE
    idx = 0
    for digit in _ATE_PATTERN:
        f = fq12_sqr(f)
        for xp, yp, coeffs in live:
            a, b = coeffs[idx]
            f = fq12_mul_line(f, yp, fq2_scale(a, -xp), b)
        idx += 1
        if digit != 0:
            for xp, yp, coeffs in live:
                a, b = coeffs[idx]
                f = fq12_mul_line(f, yp, fq2_scale(a, -xp), b)
            idx += 1
    for _ in range(2):  # the two Frobenius addition steps
        for xp, yp, coeffs in live:
            a, b = coeffs[idx]
            f = fq12_mul_line(f, yp, fq2_scale(a, -xp), b)
        idx += 1
    return f


def final_exp(f):
    """Structured final exponentiation f^((p^12 - 1) / q)."""
    # easy part: f^((p^6 - 1)(p^2 + 1))
    t = fq12_mul(fq12_conj(f), fq12_inv(f))
    t = fq12_mul(fq12_frob(t, 2), t)

    # hard part, standard BN addition chain (operands are cyclotomic, so
    # squarings and exponentiations use the compressed forms)
    u = int(U)
    fp = fq12_frob(t, 1)
    fp2 = fq12_frob(t, 2)
    fp3 = fq12_frob(fp2, 1)
    fu = fq12_cyclo_pow(t, u)
    fu2 = fq12_cyclo_pow(fu, u)
    fu3 = fq12_cyclo_pow(fu2, u)
    y3 = fq12_conj(fq12_frob(fu, 1))
    fu2p = fq12_frob(fu2, 1)
    fu3p = fq12_frob(fu3, 1)
    y2 = fq12_frob(fu2, 2)
    y0 = fq12_mul(fq12_mul(fp, fp2), fp3)
    y1 = fq12_conj(t)
    y5 = fq12_conj(fu2)
    y4 = fq12_conj(fq12_mul(fu, fu2p))
    y6 = fq12_conj(fq12_mul(fu3, fu3p))

    t0 = fq12_mul(fq12_mul(fq12_cyclo_sqr(y6), y4), y5)
    t1 = fq12_mul(fq12_mul(y3, y5), t0)
    t0 = fq12_mul(t0, y2)
    t1 = fq12_mul(fq12_cyclo_sqr(t1), t0)
    t1 = fq12_cyclo_sqr(t1)
    t0 = fq12_mul(t1, y1)
    t1 = fq12_mul(t1, y0)
    t0 = fq12_cyclo_sqr(t0)
    return fq12_mul(t0, t1)


def final_exp_naive(f):
    """Reference final exponentiation by the full exponent."""
    return fq12_pow(f, (int(P) ** 12 - 1) // int(Q))


def pairing(g1_point, g2_point):
    return final_exp(miller_loop([(g1_point, PreparedG2(g2_point))]))


def multi_pairing(pairs):
    """Product of pairings with one shared final exponentiation."""
    return final_exp(miller_loop(pairs))


def pairing_check(pairs) -> bool:
    """True iff the product of e(P_i, Q_i) is the identity."""
    return multi_pairing(pairs) == FQ12_ONE
