"""Bilinear group layer: scalars, points, pairing, hashing, codecs."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from openpub.errors import ConfigError, DecodingError, GroupMismatchError
from openpub.groups import G1, G2, GT, ORDER, GroupElement, Scalar, get_context
from openpub.groups._curve import B2, FQ2_ONE, g2_in_subgroup, g2_to_bytes
from openpub.groups._fp import P, fq2_add, fq2_mul, fq2_sqr, fq2_sqrt, mpz
from openpub.groups._pairing import PreparedG2, final_exp, final_exp_naive, miller_loop
from openpub.rng import SeededRng


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------

def test_scalar_random_deterministic(ctx):
    a = ctx.scalar_random(SeededRng(42))
    b = ctx.scalar_random(SeededRng(42))
    assert a == b


def test_scalar_random_in_range(ctx):
    rng = SeededRng(7)
    for _ in range(10_000):
        assert 0 <= ctx.scalar_random(rng).value < ORDER


def test_scalar_random_distinct_seeds(ctx):
    # 100 draws from 100 distinct seeds: collision count must be 0
    seen = {ctx.scalar_random(SeededRng(seed)).value for seed in range(100)}
    assert len(seen) == 100


@settings(max_examples=200, deadline=None)
@given(
    a=st.integers(min_value=0, max_value=ORDER - 1),
    b=st.integers(min_value=0, max_value=ORDER - 1),
)
def test_scalar_matches_bigint_oracle(a, b):
    sa, sb = Scalar(a), Scalar(b)
    assert (sa + sb).value == (a + b) % ORDER
    assert (sa - sb).value == (a - b) % ORDER
    assert (sa * sb).value == (a * b) % ORDER
    assert (-sa).value == (-a) % ORDER
    if a:
        assert (sa * sa.inverse()).value == 1


def test_scalar_bulk_arithmetic_oracle(ctx):
    rng = SeededRng(99)
    for _ in range(10_000):
        a = rng.randbelow(ORDER)
        b = rng.randbelow(ORDER)
        op = rng.randbelow(3)
        if op == 0:
            assert (Scalar(a) + Scalar(b)).value == (a + b) % ORDER
        elif op == 1:
            assert (Scalar(a) - Scalar(b)).value == (a - b) % ORDER
        else:
            assert (Scalar(a) * Scalar(b)).value == (a * b) % ORDER


def test_scalar_constants_and_codec():
    assert Scalar.zero().is_zero()
    assert not Scalar.one().is_zero()
    s = Scalar(123456789)
    assert Scalar.from_bytes(s.to_bytes()) == s
    assert len(s.to_bytes()) == 32
    with pytest.raises(DecodingError):
        Scalar.from_bytes((ORDER).to_bytes(32, "big"))
    with pytest.raises(DecodingError):
        Scalar.from_bytes(b"\x00" * 31)


# ---------------------------------------------------------------------------
# pairing
# ---------------------------------------------------------------------------

def test_pairing_non_degenerate(ctx):
    assert ctx.pairing(ctx.g1, ctx.g2) != ctx.identity(GT)


def test_pairing_small_bilinearity(ctx):
    e = ctx.pairing(ctx.g1, ctx.g2)
    assert ctx.pairing(ctx.g1 * 2, ctx.g2 * 3) == e ** 6


def test_pairing_identity_operand(ctx):
    assert ctx.pairing(ctx.identity(G1), ctx.g2) == ctx.identity(GT)


def test_pairing_group_mismatch(ctx):
    with pytest.raises(GroupMismatchError):
        ctx.pairing(ctx.g2, ctx.g1)
    with pytest.raises(GroupMismatchError):
        ctx.pairing(ctx.g1, ctx.g1)


def test_bilinearity_random_exponents(ctx):
    # invariant: holds on 100 random (x, y) pairs
    rng = SeededRng(2024)
    base = ctx.pairing(ctx.g1, ctx.g2)
    for _ in range(100):
        x = ctx.scalar_random(rng)
        y = ctx.scalar_random(rng)
        assert ctx.pairing(ctx.g1 * x, ctx.g2 * y) == base ** (x * y)


def test_multi_pairing_matches_product(ctx):
    rng = SeededRng(5)
    pairs = []
    prod = ctx.identity(GT)
    for _ in range(4):
        a = ctx.g1 * ctx.scalar_random(rng)
        b = ctx.g2 * ctx.scalar_random(rng)
        pairs.append((a, b))
        prod = prod + ctx.pairing(a, b)
    assert ctx.multi_pairing(pairs) == prod


def test_pairing_check(ctx):
    rng = SeededRng(6)
    x = ctx.scalar_random(rng)
    # e(x g1, g2) * e(-(x g1), g2) = 1
    p = ctx.g1 * x
    assert ctx.pairing_check([(p, ctx.g2), (-p, ctx.g2)])
    assert not ctx.pairing_check([(p, ctx.g2), (p, ctx.g2)])


def test_structured_final_exp_matches_naive(ctx):
    # dual-route check: fast final exponentiation vs plain pow
    rng = SeededRng(8)
    for _ in range(3):
        a = (ctx.g1 * ctx.scalar_random(rng))._raw
        b = (ctx.g2 * ctx.scalar_random(rng))._raw
        f = miller_loop([(a, PreparedG2(b))])
        assert final_exp(f) == final_exp_naive(f)


def test_gt_order(ctx):
    e = ctx.pairing(ctx.g1, ctx.g2)
    assert (e ** ORDER).is_identity()
    assert not (e ** (ORDER - 1)).is_identity()


# ---------------------------------------------------------------------------
# hashing
# ---------------------------------------------------------------------------

def test_hash_to_scalar_deterministic(ctx):
    assert ctx.hash_to_scalar(b"t", b"m") == ctx.hash_to_scalar(b"t", b"m")


def test_hash_to_scalar_domain_separated(ctx):
    assert ctx.hash_to_scalar(b"grp", b"x") != ctx.hash_to_scalar(b"usr", b"x")


def test_hash_to_scalar_in_range(ctx):
    for i in range(100):
        assert 0 <= ctx.hash_to_scalar(b"t", str(i).encode()).value < ORDER


@pytest.mark.parametrize("target", [G1, G2])
def test_hash_to_group_roundtrip(ctx, target):
    pt = ctx.hash_to_group(b"tag", b"message", target)
    assert GroupElement.from_bytes(target, pt.to_bytes()) == pt


def test_hash_to_group_no_collisions_g1(ctx):
    points = {ctx.hash_to_group(b"c", str(i).encode(), G1).to_bytes() for i in range(1000)}
    assert len(points) == 1000


def test_hash_to_group_never_identity_g1(ctx):
    rng = SeededRng(11)
    for _ in range(1000):
        msg = rng.read(16)
        assert not ctx.hash_to_group(b"n", msg, G1).is_identity()


def test_hash_to_group_gt_rejected(ctx):
    with pytest.raises(GroupMismatchError):
        ctx.hash_to_group(b"t", b"m", GT)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("group", [G1, G2])
def test_point_roundtrip(ctx, group, rng):
    gen = ctx.g1 if group == G1 else ctx.g2
    for _ in range(20):
        pt = gen * ctx.scalar_random(rng)
        enc = pt.to_bytes()
        assert len(enc) == (33 if group == G1 else 65)
        assert GroupElement.from_bytes(group, enc) == pt


@pytest.mark.parametrize("group", [G1, G2])
def test_identity_roundtrip(ctx, group):
    ident = ctx.identity(group)
    assert GroupElement.from_bytes(group, ident.to_bytes()).is_identity()


def test_decode_rejects_bad_length():
    with pytest.raises(DecodingError):
        GroupElement.from_bytes(G1, b"\x02" * 10)


def test_decode_rejects_bad_tag(ctx):
    enc = bytearray(ctx.g1.to_bytes())
    enc[0] = 0x07
    with pytest.raises(DecodingError):
        GroupElement.from_bytes(G1, bytes(enc))


def test_decode_rejects_out_of_range_x():
    enc = b"\x02" + (int(P)).to_bytes(32, "big")
    with pytest.raises(DecodingError):
        GroupElement.from_bytes(G1, enc)


def test_decode_rejects_noncanonical_infinity():
    with pytest.raises(DecodingError):
        GroupElement.from_bytes(G1, b"\x00" + b"\x00" * 31 + b"\x01")


def test_decode_rejects_off_curve_x():
    # x = 5: 5^3 + 3 = 128 is not a QR mod p for this curve
    for x in range(2, 40):
        rhs = (x * x * x + 3) % int(P)
        if pow(rhs, (int(P) - 1) // 2, int(P)) != 1:
            enc = b"\x02" + x.to_bytes(32, "big")
            with pytest.raises(DecodingError):
                GroupElement.from_bytes(G1, enc)
            return
    pytest.fail("no non-residue x found in probe range")


def test_decode_rejects_g2_outside_subgroup():
    # find a twist-curve point that is not in the order-q subgroup
    x = (mpz(1), mpz(0))
    while True:
        rhs = fq2_add(fq2_mul(fq2_sqr(x), x), B2)
        y = fq2_sqrt(rhs)
        if y is not None:
            pt = (x, y, FQ2_ONE)
            if not g2_in_subgroup(pt):
                enc = g2_to_bytes(pt)
                with pytest.raises(DecodingError):
                    GroupElement.from_bytes(G2, enc)
                return
        x = (x[0] + 1, x[1])


# ---------------------------------------------------------------------------
# context and element algebra
# ---------------------------------------------------------------------------

def test_context_immutable(ctx):
    with pytest.raises(AttributeError):
        ctx.order = 5


def test_curve_pin_env(monkeypatch):
    monkeypatch.setenv("OPENPUB_CURVE", "bls12-381")
    with pytest.raises(ConfigError):
        get_context()
    monkeypatch.setenv("OPENPUB_CURVE", "bn254")
    assert get_context().curve_id == "bn254"


def test_multiexp_matches_naive(ctx, rng):
    points = [ctx.g1 * ctx.scalar_random(rng) for _ in range(6)]
    scalars = [ctx.scalar_random(rng) for _ in range(6)]
    naive = ctx.identity(G1)
    for p, s in zip(points, scalars):
        naive = naive + p * s
    assert ctx.multiexp(points, scalars) == naive


def test_mixed_group_addition_rejected(ctx):
    with pytest.raises(GroupMismatchError):
        _ = ctx.g1 + ctx.g2


def test_rng_fork_independence():
    root = SeededRng(1)
    a = root.fork("a").read(16)
    b = root.fork("b").read(16)
    assert a != b
    assert SeededRng(1).fork("a").read(16) == a
