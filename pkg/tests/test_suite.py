"""Ordinary signature and hybrid encryption primitives."""

import pytest

from openpub import suite
from openpub.errors import DecryptionError


@pytest.fixture()
def keypair(rng):
    return suite.sig_keygen(rng)


def test_sign_verify_roundtrip(keypair):
    sig = suite.sig_sign(b"hello", keypair.sk)
    assert suite.sig_verify(keypair.pk, b"hello", sig)


def test_signature_is_65_bytes(keypair):
    assert len(suite.sig_sign(b"x", keypair.sk)) == 65


def test_verify_rejects_wrong_key(keypair, rng):
    other = suite.sig_keygen(rng)
    sig = suite.sig_sign(b"hello", keypair.sk)
    assert not suite.sig_verify(other.pk, b"hello", sig)


def test_verify_rejects_wrong_message(keypair):
    sig = suite.sig_sign(b"hello", keypair.sk)
    assert not suite.sig_verify(keypair.pk, b"goodbye", sig)


def test_sign_deterministic(keypair):
    assert suite.sig_sign(b"m", keypair.sk) == suite.sig_sign(b"m", keypair.sk)


def test_verify_rejects_malformed(keypair):
    sig = suite.sig_sign(b"m", keypair.sk)
    assert not suite.sig_verify(keypair.pk, b"m", sig[:64])
    assert not suite.sig_verify(keypair.pk, b"m", b"\x00" * 65)
    assert not suite.sig_verify(b"\x09" * 33, b"m", sig)


def test_signature_low_s_canonical(keypair, rng):
    n = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
    for i in range(20):
        sig = suite.sig_sign(rng.read(16), keypair.sk)
        s = int.from_bytes(sig[32:64], "big")
        assert 1 <= s <= n // 2


def test_enc_dec_roundtrip(rng):
    kp = suite.enc_keygen(rng)
    ct = suite.enc(b"review assignment", kp.pk, rng)
    assert suite.dec(ct, kp.sk) == b"review assignment"


def test_encryption_randomized(rng):
    kp = suite.enc_keygen(rng)
    a = suite.enc(b"same plaintext", kp.pk, rng)
    b = suite.enc(b"same plaintext", kp.pk, rng)
    assert a != b


def test_cross_decryption_fails(rng):
    # decryption under any non-recipient key must raise, 100 trials
    keys = [suite.enc_keygen(rng) for _ in range(10)]
    cts = [suite.enc(b"msg %d" % i, keys[i].pk, rng) for i in range(10)]
    failures = 0
    for i in range(10):
        for j in range(10):
            if i == j:
                assert suite.dec(cts[i], keys[j].sk) == b"msg %d" % i
                continue
            with pytest.raises(DecryptionError):
                suite.dec(cts[i], keys[j].sk)
            failures += 1
    assert failures == 90


def test_trial_decryption_unique(rng):
    # each recipient of a batch decrypts exactly one ciphertext
    keys = [suite.enc_keygen(rng) for _ in range(5)]
    batch = [suite.enc(b"slot %d" % i, keys[i].pk, rng) for i in range(5)]
    for i, kp in enumerate(keys):
        hits = []
        for ct in batch:
            try:
                hits.append(suite.dec(ct, kp.sk))
            except DecryptionError:
                pass
        assert hits == [b"slot %d" % i]


def test_ciphertext_hides_recipient(rng):
    kp = suite.enc_keygen(rng)
    ct = suite.enc(b"blind me", kp.pk, rng)
    assert kp.pk not in ct
    assert kp.pk[1:] not in ct  # x-coordinate bytes absent too


def test_tampered_ciphertext_rejected(rng):
    kp = suite.enc_keygen(rng)
    ct = bytearray(suite.enc(b"tamper", kp.pk, rng))
    ct[-1] ^= 1
    with pytest.raises(DecryptionError):
        suite.dec(bytes(ct), kp.sk)


def test_account_hex_prefix(keypair):
    h = suite.account_hex(keypair.pk, type_prefix=2)
    assert h.startswith("02")
    assert bytes.fromhex(h)[1:] == keypair.pk
