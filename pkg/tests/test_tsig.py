"""Threshold signature: keygen, share signing, combination, verification."""

import itertools

import pytest

from openpub import tsig, vss
from openpub.errors import DuplicateIndexError, InsufficientSharesError, InvalidParamsError
from openpub.rng import SeededRng


@pytest.fixture(scope="module")
def keyset34():
    return tsig.thres_keygen((3, 4), SeededRng(0xBEEF))


def test_keygen_pbft_match(keyset34):
    # (2f+1, 3f+1) with f=1
    assert keyset34.params == (3, 4)
    assert len(keyset34.secret_shares) == 4
    assert len(keyset34.account_id) == 65


def test_keygen_degenerate_plain_keypair(ctx):
    ks = tsig.thres_keygen((1, 1), SeededRng(1))
    assert ks.public_key == ctx.g2 * ks.secret_shares[1]
    share = tsig.thres_sign(b"m", ks.secret_shares[1], 1)
    assert tsig.ts_verify(ks.public_key, b"m", tsig.ThresholdSignature(share.partial))


def test_keygen_reconstruction_oracle(keyset34, ctx):
    # test-only: interpolated shares' public image equals the aggregate key
    secret = vss.reconstruct((3, 4), sorted(keyset34.secret_shares.items()))
    assert keyset34.public_key == ctx.g2 * secret
    for i, vk in keyset34.verify_keys.items():
        assert vk == ctx.g2 * keyset34.secret_shares[i]


def test_keygen_invalid_threshold():
    with pytest.raises(InvalidParamsError):
        tsig.thres_keygen((5, 4), SeededRng(2))


def test_share_sign_deterministic(keyset34):
    a = tsig.thres_sign(b"m", keyset34.secret_shares[2], 2)
    b = tsig.thres_sign(b"m", keyset34.secret_shares[2], 2)
    assert a == b


def test_share_verification_matrix(keyset34):
    # share from signer j must verify only under verify key j
    msg = b"cross-check"
    shares = {i: tsig.thres_sign(msg, keyset34.secret_shares[i], i) for i in range(1, 5)}
    for i in range(1, 5):
        for j in range(1, 5):
            expected = i == j
            got = tsig.sig_share_ver(
                keyset34.public_key, keyset34.verify_keys[i], msg, shares[j]
            )
            assert got == expected


def test_share_tamper_detected(keyset34, ctx):
    share = tsig.thres_sign(b"m", keyset34.secret_shares[1], 1)
    bad = tsig.SigShare(signer=1, partial=share.partial + ctx.g1)
    assert not tsig.sig_share_ver(keyset34.public_key, keyset34.verify_keys[1], b"m", bad)


def test_combination_subset_independent(keyset34):
    msg = b"aggregate me"
    shares = [tsig.thres_sign(msg, keyset34.secret_shares[i], i) for i in range(1, 5)]
    blobs = {
        tsig.sig_share_comb(list(sub), (3, 4)).to_bytes()
        for sub in itertools.combinations(shares, 3)
    }
    assert len(blobs) == 1
    sig = tsig.ThresholdSignature.from_bytes(next(iter(blobs)))
    assert tsig.ts_verify(keyset34.public_key, msg, sig)


def test_combination_order_independent(keyset34):
    msg = b"ordering"
    shares = [tsig.thres_sign(msg, keyset34.secret_shares[i], i) for i in (1, 2, 3)]
    a = tsig.sig_share_comb(shares, (3, 4))
    b = tsig.sig_share_comb(shares[::-1], (3, 4))
    assert a.to_bytes() == b.to_bytes()


def test_combination_threshold_boundary(keyset34):
    shares = [tsig.thres_sign(b"m", keyset34.secret_shares[i], i) for i in (1, 2)]
    with pytest.raises(InsufficientSharesError):
        tsig.sig_share_comb(shares, (3, 4))


def test_combination_duplicate_index(keyset34):
    s = tsig.thres_sign(b"m", keyset34.secret_shares[1], 1)
    with pytest.raises(DuplicateIndexError):
        tsig.sig_share_comb([s, s, s], (3, 4))


def test_verify_rejects_wrong_message(keyset34):
    shares = [tsig.thres_sign(b"m", keyset34.secret_shares[i], i) for i in (1, 2, 3)]
    sig = tsig.sig_share_comb(shares, (3, 4))
    assert not tsig.ts_verify(keyset34.public_key, b"other", sig)


def test_verify_rejects_foreign_keyset(keyset34):
    other = tsig.thres_keygen((3, 4), SeededRng(3))
    shares = [tsig.thres_sign(b"m", other.secret_shares[i], i) for i in (1, 2, 3)]
    sig = tsig.sig_share_comb(shares, (3, 4))
    assert not tsig.ts_verify(keyset34.public_key, b"m", sig)


def test_iff_property_small():
    # every >=k subset combines to one verifying signature; every smaller
    # subset, force-combined at its own size, never verifies
    ks = tsig.thres_keygen((3, 4), SeededRng(4))
    msg = b"iff"
    shares = [tsig.thres_sign(msg, ks.secret_shares[i], i) for i in range(1, 5)]
    good = set()
    for size in range(1, 5):
        for sub in itertools.combinations(shares, size):
            sig = tsig.sig_share_comb(list(sub), (size, 4))
            verified = tsig.ts_verify(ks.public_key, msg, sig)
            if size >= 3:
                assert verified
                good.add(sig.to_bytes())
            else:
                assert not verified
    assert len(good) == 1
