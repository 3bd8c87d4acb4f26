"""Verifiable secret sharing: dealt shares, verification, reconstruction."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from openpub import vss
from openpub.errors import (
    DuplicateIndexError,
    IndexNotInSubsetError,
    InsufficientSharesError,
    InvalidParamsError,
    UnverifiedDealingError,
    VssFailureError,
)
from openpub.groups import G1, G2, ORDER, Scalar, get_context
from openpub.rng import SeededRng


def dealing_from_coeffs(coeffs, dealer=1, n=3, group=G1):
    """Build a dealing from pinned polynomial coefficients (test oracle)."""
    ctx = get_context()
    k = len(coeffs)
    gen = ctx.g1 if group == G1 else ctx.g2
    scalars = [Scalar(c) for c in coeffs]
    return vss.Dealing(
        dealer=dealer,
        params=(k, n),
        group=group,
        commitments=tuple(gen * c for c in scalars),
        sub_shares={j: vss.poly_eval(scalars, j) for j in range(1, n + 1)},
    )


# ---------------------------------------------------------------------------
# deal
# ---------------------------------------------------------------------------

def test_deal_hand_evaluated_polynomial():
    # polynomial 5 + 3x over recipients 1..3: shares 8, 11, 14
    d = dealing_from_coeffs([5, 3], n=3)
    assert d.sub_shares[1] == Scalar(8)
    assert d.sub_shares[2] == Scalar(11)
    assert d.sub_shares[3] == Scalar(14)
    for j in (1, 2, 3):
        assert vss.verify_share(d, j, d.sub_shares[j])


def test_deal_constant_term_is_secret(rng):
    # reconstructing any k sub-shares of one dealing yields the dealt secret
    secret = Scalar(424242)
    d = vss.deal((3, 5), 1, secret, rng)
    assert vss.reconstruct((3, 5), [(j, d.sub_shares[j]) for j in (2, 4, 5)]) == secret


def test_deal_degenerate_one_one(rng):
    secret = Scalar(77)
    d = vss.deal((1, 1), 1, secret, rng)
    assert d.sub_shares[1] == secret


def test_deal_three_of_five_all_verify(rng):
    d = vss.deal((3, 5), 2, Scalar(9), rng)
    assert all(vss.verify_share(d, j, d.sub_shares[j]) for j in range(1, 6))


def test_deal_invalid_params(rng):
    with pytest.raises(InvalidParamsError):
        vss.deal((4, 3), 1, Scalar(1), rng)
    with pytest.raises(InvalidParamsError):
        vss.deal((0, 3), 1, Scalar(1), rng)


# ---------------------------------------------------------------------------
# verify_share
# ---------------------------------------------------------------------------

def test_verify_share_rejects_offset():
    d = dealing_from_coeffs([5, 3])
    assert not vss.verify_share(d, 2, d.sub_shares[2] + Scalar.one())


def test_verify_share_rejects_wrong_recipient():
    # valid share for index 1 presented as index 2: polynomial values differ
    d = dealing_from_coeffs([5, 3])
    assert d.sub_shares[1] != d.sub_shares[2]
    assert not vss.verify_share(d, 2, d.sub_shares[1])


def test_verify_share_out_of_range_recipient():
    d = dealing_from_coeffs([5, 3])
    assert not vss.verify_share(d, 9, d.sub_shares[1])


# ---------------------------------------------------------------------------
# aggregate_shares
# ---------------------------------------------------------------------------

def test_aggregate_two_dealers_hand_summed():
    # (5 + 3x) and (2 + x) at i = 2: 11 + 4 = 15
    d1 = dealing_from_coeffs([5, 3], dealer=1)
    d2 = dealing_from_coeffs([2, 1], dealer=2)
    assert vss.aggregate_shares([d1, d2], 2) == Scalar(15)


def test_aggregate_single_dealer():
    d = dealing_from_coeffs([5, 3], dealer=1)
    assert vss.aggregate_shares([d], 3) == d.sub_shares[3]


def test_aggregate_all_or_nothing():
    d1 = dealing_from_coeffs([5, 3], dealer=1)
    bad_shares = dict(d1.sub_shares)
    bad_shares[2] = bad_shares[2] + Scalar.one()
    d_bad = vss.Dealing(
        dealer=2, params=d1.params, group=d1.group,
        commitments=d1.commitments, sub_shares=bad_shares,
    )
    with pytest.raises(UnverifiedDealingError):
        vss.aggregate_shares([d1, d_bad], 2)


# ---------------------------------------------------------------------------
# reconstruct
# ---------------------------------------------------------------------------

def test_reconstruct_hand_lagrange():
    # joint polynomial 7 + 4x + x^2: f(1)=12, f(2)=19, f(3)=28 -> f(0)=7
    shares = [(1, Scalar(12)), (2, Scalar(19)), (3, Scalar(28))]
    assert vss.reconstruct((3, 5), shares) == Scalar(7)


def test_reconstruct_all_subsets_agree(rng):
    t = vss.run_ceremony((3, 5), rng)
    secrets = {
        vss.reconstruct((3, 5), [(i, t.final_shares[i]) for i in subset]).value
        for subset in itertools.combinations(range(1, 6), 3)
    }
    assert len(secrets) == 1


def test_reconstruct_threshold_boundary():
    shares = [(1, Scalar(12)), (2, Scalar(19))]
    with pytest.raises(InsufficientSharesError):
        vss.reconstruct((3, 5), shares)


def test_reconstruct_duplicate_index():
    shares = [(1, Scalar(12)), (1, Scalar(12)), (3, Scalar(28))]
    with pytest.raises(DuplicateIndexError):
        vss.reconstruct((3, 5), shares)


# ---------------------------------------------------------------------------
# lagrange_coefficient
# ---------------------------------------------------------------------------

def test_lagrange_hand_computed():
    assert vss.lagrange_coefficient([1, 2], 1, 0) == Scalar(2)
    assert vss.lagrange_coefficient([1, 2], 2, 0) == Scalar(-1)


def test_lagrange_singleton():
    assert vss.lagrange_coefficient([4], 4, 4) == Scalar.one()


def test_lagrange_reproduces_constant():
    basis = vss.lagrange_basis([2, 5, 7])
    total = Scalar.zero()
    for lam in basis.values():
        total = total + lam * Scalar(13)  # constant polynomial f(x) = 13
    assert total == Scalar(13)


def test_lagrange_errors():
    with pytest.raises(IndexNotInSubsetError):
        vss.lagrange_coefficient([1, 2], 3, 0)
    with pytest.raises(DuplicateIndexError):
        vss.lagrange_coefficient([1, 1, 2], 1, 0)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(min_value=1, max_value=40), min_size=1, max_size=6, unique=True),
       st.integers(min_value=0, max_value=ORDER - 1))
def test_lagrange_interpolates_polynomials(subset, c0):
    # sum lam_i f(i) == f(0) for a degree < |subset| polynomial
    coeffs = [Scalar((c0 * (j + 1) ** 3 + j) % ORDER) for j in range(len(subset))]
    basis = vss.lagrange_basis(subset)
    total = Scalar.zero()
    for i in subset:
        total = total + basis[i] * vss.poly_eval(coeffs, i)
    assert total == vss.poly_eval(coeffs, 0)


# ---------------------------------------------------------------------------
# ceremony
# ---------------------------------------------------------------------------

def test_ceremony_subset_consistency_small(rng):
    for k, n in [(1, 1), (2, 3), (3, 4), (4, 6)]:
        t = vss.run_ceremony((k, n), rng.fork(f"{k}-{n}"))
        values = {
            vss.reconstruct((k, n), [(i, t.final_shares[i]) for i in sub]).value
            for sub in itertools.combinations(range(1, n + 1), k)
        }
        assert len(values) == 1


def test_ceremony_joint_public_consistent(rng, ctx):
    t = vss.run_ceremony((3, 5), rng)
    secret = vss.reconstruct((3, 5), sorted(t.final_shares.items()))
    assert t.joint_public() == ctx.g1 * secret
    # per-index commitment evaluation matches the final shares
    for i in range(1, 6):
        assert t.joint_commitment(i) == ctx.g1 * t.final_shares[i]


def test_ceremony_g2_commitments(rng, ctx):
    t = vss.run_ceremony((2, 4), rng, group=G2)
    secret = vss.reconstruct((2, 4), sorted(t.final_shares.items()))
    assert t.joint_public() == ctx.g2 * secret


def test_ceremony_excludes_bad_dealer(rng):
    honest = vss.run_ceremony((2, 4), rng)
    bad = dealing_from_coeffs([5, 3], dealer=2, n=4)
    tampered_shares = dict(bad.sub_shares)
    tampered_shares[3] = tampered_shares[3] + Scalar.one()
    bad = vss.Dealing(
        dealer=2, params=(2, 4), group=bad.group,
        commitments=bad.commitments, sub_shares=tampered_shares,
    )
    t = vss.run_ceremony((2, 4), rng.fork("redo"), tamper={2: bad})
    assert 2 not in t.valid_dealers
    assert len(t.valid_dealers) == 3
    # remaining dealings still reconstruct consistently
    secret = vss.reconstruct((2, 4), sorted(t.final_shares.items()))
    assert t.joint_public() == get_context().g1 * secret


def test_ceremony_fails_below_threshold(rng):
    bads = {}
    for dealer in (1, 2, 3):
        bad = dealing_from_coeffs([dealer, 1], dealer=dealer, n=4)
        shares = dict(bad.sub_shares)
        shares[1] = shares[1] + Scalar.one()
        bads[dealer] = vss.Dealing(
            dealer=dealer, params=(2, 4), group=bad.group,
            commitments=bad.commitments, sub_shares=shares,
        )
    with pytest.raises(VssFailureError):
        vss.run_ceremony((2, 4), rng, tamper=bads)


def test_tamper_detection_bit_flips(rng):
    # flipping any low bit of a sub-share must flip verification
    d = vss.deal((3, 6), 1, Scalar(1234), rng)
    for j in range(1, 7):
        for bit in (0, 1, 13, 200):
            bad = Scalar(d.sub_shares[j].value ^ (1 << bit))
            assert not vss.verify_share(d, j, bad)


def test_transcript_serialization_deterministic(rng):
    t1 = vss.run_ceremony((2, 3), SeededRng(5))
    t2 = vss.run_ceremony((2, 3), SeededRng(5))
    assert t1.to_bytes() == t2.to_bytes()
    assert vss.run_ceremony((2, 3), SeededRng(6)).to_bytes() != t1.to_bytes()
