"""Threshold group signature: the eight operations plus the game harnesses."""

import itertools

import pytest

from openpub import tibgs, vss
from openpub.errors import (
    DuplicateIndexError,
    InsufficientSharesError,
    InsufficientValidSharesError,
    InvalidParamsError,
    InvalidSignatureError,
    OracleViolationError,
    UnknownSignerError,
)
from openpub.groups import Scalar, get_context
from openpub.rng import SeededRng

GRP = "venue"


@pytest.fixture(scope="module")
def master35():
    return tibgs.setup((3, 5), SeededRng(0xA11CE))


@pytest.fixture(scope="module")
def stack35(master35):
    """Group shares, verify keys, and one member key at (3, 5)."""
    shares = {
        i: tibgs.grp_setup(GRP, i, master35.shares[i], master35.params)
        for i in range(1, 6)
    }
    gvks = {i: s.gvk for i, s in shares.items()}
    frags = [tibgs.ext_share("alice", shares[i]) for i in (1, 2, 3)]
    key = tibgs.reconst_key("alice", frags, gvks, (3, 5), master35)
    return shares, gvks, key


# ---------------------------------------------------------------------------
# setup
# ---------------------------------------------------------------------------

def test_setup_degenerate_single_manager():
    m = tibgs.setup((1, 1), SeededRng(1))
    assert set(m.shares) == {1}
    ctx = get_context()
    assert m.mpk1 == ctx.g1 * m.shares[1]
    assert m.mpk2 == ctx.g2 * m.shares[1]


def test_setup_mpk_matches_reconstructed_secret(master35):
    # test-only oracle: interpolate the master shares and compare exponents
    secret = vss.reconstruct((3, 5), sorted(master35.shares.items()))
    ctx = get_context()
    assert master35.mpk1 == ctx.g1 * secret
    assert master35.mpk2 == ctx.g2 * secret


def test_setup_invalid_threshold():
    with pytest.raises(InvalidParamsError):
        tibgs.setup((4, 3), SeededRng(2))


def test_setup_transcript_grows_quadratically():
    sizes = {}
    for k, n in [(3, 8), (11, 16)]:
        m = tibgs.setup((k, n), SeededRng(n))
        sizes[n] = len(m.transcript.to_bytes())
    # doubling n with proportional k should far more than double the bytes
    assert sizes[16] > 3 * sizes[8]


# ---------------------------------------------------------------------------
# grp_setup
# ---------------------------------------------------------------------------

def test_grp_setup_deterministic(master35):
    a = tibgs.grp_setup(GRP, 2, master35.shares[2], (3, 5))
    b = tibgs.grp_setup(GRP, 2, master35.shares[2], (3, 5))
    assert a == b


def test_grp_setup_distinct_groups(master35):
    a = tibgs.grp_setup("venue-a", 2, master35.shares[2], (3, 5))
    b = tibgs.grp_setup("venue-b", 2, master35.shares[2], (3, 5))
    assert a.gsk != b.gsk


def test_grp_setup_gvk_is_public_image(master35, ctx):
    s = tibgs.grp_setup(GRP, 4, master35.shares[4], (3, 5))
    assert s.gvk == ctx.g2 * s.gsk


def test_grp_setup_unknown_manager(master35):
    with pytest.raises(InvalidParamsError):
        tibgs.grp_setup(GRP, 9, master35.shares[1], (3, 5))


# ---------------------------------------------------------------------------
# ext_share / reconst_key
# ---------------------------------------------------------------------------

def test_ext_share_verifies(stack35):
    shares, gvks, _ = stack35
    frag = tibgs.ext_share("bob", shares[2])
    assert tibgs.verify_user_share(frag, gvks[2])


def test_ext_share_tamper_detected(stack35, ctx):
    shares, gvks, _ = stack35
    frag = tibgs.ext_share("bob", shares[2])
    forged = tibgs.UserKeyShare(
        grp_id=frag.grp_id, user_id=frag.user_id, manager=frag.manager,
        fragment=frag.fragment + ctx.g1,
    )
    assert not tibgs.verify_user_share(forged, gvks[2])


def test_reconst_key_subset_independent(master35, stack35):
    shares, gvks, _ = stack35
    frags = [tibgs.ext_share("carol", shares[i]) for i in range(1, 6)]
    images = {
        tibgs.reconst_key(
            "carol", [frags[i] for i in sub], gvks, (3, 5), master35
        ).key.to_bytes()
        for sub in itertools.combinations(range(5), 3)
    }
    assert len(images) == 1


def test_reconst_key_robust_to_corrupt_minority(master35, stack35, ctx):
    # two corrupted fragments out of five: reconstruction still succeeds
    shares, gvks, _ = stack35
    frags = [tibgs.ext_share("dave", shares[i]) for i in range(1, 6)]
    corrupt = [
        tibgs.UserKeyShare(f.grp_id, f.user_id, f.manager, f.fragment + ctx.g1)
        for f in frags[:2]
    ]
    key = tibgs.reconst_key("dave", corrupt + frags[2:], gvks, (3, 5), master35)
    honest = tibgs.reconst_key("dave", frags[2:], gvks, (3, 5), master35)
    assert key.key == honest.key


def test_reconst_key_insufficient_valid(master35, stack35, ctx):
    shares, gvks, _ = stack35
    frags = [tibgs.ext_share("erin", shares[i]) for i in range(1, 6)]
    corrupt = [
        tibgs.UserKeyShare(f.grp_id, f.user_id, f.manager, f.fragment + ctx.g1)
        for f in frags[:3]
    ]
    with pytest.raises(InsufficientValidSharesError) as err:
        tibgs.reconst_key("erin", corrupt + frags[3:], gvks, (3, 5), master35)
    assert set(err.value.bad_indices) == {1, 2, 3}


def test_reconst_key_duplicate_index(master35, stack35):
    shares, gvks, _ = stack35
    frag = tibgs.ext_share("frank", shares[1])
    with pytest.raises(DuplicateIndexError):
        tibgs.reconst_key("frank", [frag, frag], gvks, (3, 5), master35)


# ---------------------------------------------------------------------------
# sign / verify
# ---------------------------------------------------------------------------

def test_sign_verify_roundtrip(master35, stack35):
    _, _, key = stack35
    sig = tibgs.sign(b"a manuscript", key, SeededRng(3))
    assert tibgs.verify(b"a manuscript", sig, master35, GRP)


def test_sign_randomized(master35, stack35):
    _, _, key = stack35
    s1 = tibgs.sign(b"m", key, SeededRng(4))
    s2 = tibgs.sign(b"m", key, SeededRng(5))
    assert s1.to_bytes() != s2.to_bytes()
    assert tibgs.verify(b"m", s1, master35, GRP)
    assert tibgs.verify(b"m", s2, master35, GRP)


def test_signature_size_constant_across_thresholds(stack35):
    _, _, key35 = stack35
    sizes = {len(tibgs.sign(b"m", key35, SeededRng(6)).to_bytes())}
    for k, n in [(1, 1), (2, 3)]:
        m = tibgs.setup((k, n), SeededRng(10 + n))
        key = tibgs.extract_full_key(m, GRP, "zoe")
        sizes.add(len(tibgs.sign(b"m", key, SeededRng(7)).to_bytes()))
    assert sizes == {tibgs.SIGNATURE_SIZE}


def test_verify_rejects_wrong_group(master35, stack35):
    _, _, key = stack35
    sig = tibgs.sign(b"m", key, SeededRng(8))
    assert not tibgs.verify(b"m", sig, master35, "other-venue")


def test_verify_rejects_wrong_message(master35, stack35):
    _, _, key = stack35
    sig = tibgs.sign(b"m", key, SeededRng(9))
    assert not tibgs.verify(b"m2", sig, master35, GRP)


def test_verify_rejects_byte_flips(master35, stack35):
    _, _, key = stack35
    sig = tibgs.sign(b"flip target", key, SeededRng(10))
    blob = bytearray(sig.to_bytes())
    rng = SeededRng(11)
    rejected = 0
    for _ in range(100):
        pos = rng.randbelow(len(blob))
        bit = 1 << rng.randbelow(8)
        mutated = bytearray(blob)
        mutated[pos] ^= bit
        try:
            parsed = tibgs.GroupSignature.from_bytes(bytes(mutated))
        except Exception:
            rejected += 1
            continue
        if not tibgs.verify(b"flip target", parsed, master35, GRP):
            rejected += 1
    assert rejected == 100


def test_sign_with_non_member_key_fails(master35, stack35, ctx):
    # an outsider fabricates a member key for its own identity
    _, _, key = stack35
    fake = tibgs.UserGroupKey(
        grp_id=GRP, user_id="mallory",
        key=ctx.g1 * ctx.hash_to_scalar(b"fake", b"mallory"),
        w1=key.w1, w2=key.w2,
    )
    sig = tibgs.sign(b"intrusion", fake, SeededRng(12))
    assert not tibgs.verify(b"intrusion", sig, master35, GRP)


# ---------------------------------------------------------------------------
# open_part / open
# ---------------------------------------------------------------------------

def test_open_recovers_signer(master35, stack35):
    shares, _, key = stack35
    sig = tibgs.sign(b"anon", key, SeededRng(13))
    parts = [tibgs.open_part(shares[i], sig, b"anon", master35) for i in (1, 4, 5)]
    uid = tibgs.open((3, 5), sig, parts, ["bob", "alice", "carol"], GRP)
    assert uid == "alice"


def test_open_part_deterministic(master35, stack35):
    shares, _, key = stack35
    sig = tibgs.sign(b"det", key, SeededRng(14))
    a = tibgs.open_part(shares[2], sig, b"det", master35)
    b = tibgs.open_part(shares[2], sig, b"det", master35)
    assert a == b


def test_open_part_rejects_tampered_sig(master35, stack35):
    shares, _, key = stack35
    sig = tibgs.sign(b"tam", key, SeededRng(15))
    bad = tibgs.GroupSignature(
        sig.c1, sig.c2, sig.z, sig.chal, sig.resp_t + Scalar.one(), sig.resp_a
    )
    with pytest.raises(InvalidSignatureError):
        tibgs.open_part(shares[1], bad, b"tam", master35)


def test_open_threshold_boundary(master35, stack35):
    shares, _, key = stack35
    sig = tibgs.sign(b"thr", key, SeededRng(16))
    parts = [tibgs.open_part(shares[i], sig, b"thr", master35) for i in (1, 2)]
    with pytest.raises(InsufficientSharesError):
        tibgs.open((3, 5), sig, parts, ["alice"], GRP)


def test_open_subsets_agree(master35, stack35):
    shares, _, key = stack35
    sig = tibgs.sign(b"sub", key, SeededRng(17))
    parts = [
        tibgs.open_part(shares[i], sig, b"sub", master35, verify_sigma=False)
        for i in range(1, 6)
    ]
    uids = {
        tibgs.open((3, 5), sig, list(sub), ["alice", "bob"], GRP)
        for sub in itertools.combinations(parts, 3)
    }
    assert uids == {"alice"}


def test_open_unknown_signer(master35, stack35):
    shares, _, key = stack35
    sig = tibgs.sign(b"unk", key, SeededRng(18))
    parts = [
        tibgs.open_part(shares[i], sig, b"unk", master35, verify_sigma=False)
        for i in (1, 2, 3)
    ]
    with pytest.raises(UnknownSignerError):
        tibgs.open((3, 5), sig, parts, ["bob", "carol"], GRP)


def test_threshold_exactness_exhaustive(master35, stack35):
    # every (k-1)-subset of opening shares and key fragments must fail
    shares, gvks, key = stack35
    sig = tibgs.sign(b"exact", key, SeededRng(40))
    parts = [
        tibgs.open_part(shares[i], sig, b"exact", master35, verify_sigma=False)
        for i in range(1, 6)
    ]
    for sub in itertools.combinations(parts, 2):
        with pytest.raises(InsufficientSharesError):
            tibgs.open((3, 5), sig, list(sub), ["alice"], GRP)
    frags = [tibgs.ext_share("norma", shares[i]) for i in range(1, 6)]
    for sub in itertools.combinations(frags, 2):
        with pytest.raises(InsufficientValidSharesError):
            tibgs.reconst_key("norma", list(sub), gvks, (3, 5), master35)


def test_open_filters_corrupt_shares(master35, stack35, ctx):
    shares, gvks, key = stack35
    sig = tibgs.sign(b"rob", key, SeededRng(19))
    parts = [
        tibgs.open_part(shares[i], sig, b"rob", master35, verify_sigma=False)
        for i in range(1, 6)
    ]
    parts[0] = tibgs.OpenShare(manager=1, value=parts[0].value + ctx.g1)
    uid = tibgs.open((3, 5), sig, parts, ["alice"], GRP, gvks=gvks)
    assert uid == "alice"


# ---------------------------------------------------------------------------
# degenerate (1, 1) equivalence with the single-manager scheme
# ---------------------------------------------------------------------------

def test_degenerate_extract_equals_reconstruct():
    m = tibgs.setup((1, 1), SeededRng(20))
    gs = tibgs.grp_setup(GRP, 1, m.shares[1], (1, 1))
    frag = tibgs.ext_share("gina", gs)
    key = tibgs.reconst_key("gina", [frag], {1: gs.gvk}, (1, 1), m)
    # single-share reconstruction is the fragment itself
    assert key.key == frag.fragment


def test_degenerate_open_pipeline():
    m = tibgs.setup((1, 1), SeededRng(21))
    gs = tibgs.grp_setup(GRP, 1, m.shares[1], (1, 1))
    key = tibgs.reconst_key(
        "hal", [tibgs.ext_share("hal", gs)], {1: gs.gvk}, (1, 1), m
    )
    sig = tibgs.sign(b"single", key, SeededRng(22))
    part = tibgs.open_part(gs, sig, b"single", m)
    assert tibgs.open((1, 1), sig, [part], ["hal", "iris"], GRP) == "hal"


# ---------------------------------------------------------------------------
# game harnesses (small trial counts; the acceptance suite runs 2000)
# ---------------------------------------------------------------------------

def test_anonymity_game_random_guesser():
    adv = tibgs.RandomGuessAdversary(seed=1)
    advantage = tibgs.anonymity_game((2, 3), 200, adv, SeededRng(23))
    assert advantage <= 0.12


def test_anonymity_game_byte_inspection():
    adv = tibgs.ByteInspectionAdversary()
    advantage = tibgs.anonymity_game((2, 3), 200, adv, SeededRng(24))
    assert advantage <= 0.12


def test_anonymity_game_share_grab_rejected():
    adv = tibgs.ShareGrabbingAdversary(k=2)
    with pytest.raises(OracleViolationError):
        tibgs.anonymity_game((2, 3), 1, adv, SeededRng(25))


def test_traceability_replay_forger():
    def forger(oracles, mpk, rng):
        sig = oracles.sign(GRP, "judy", b"paper")
        return (GRP, b"paper", sig)

    assert tibgs.traceability_game((2, 3), 20, forger, SeededRng(26)) == 0.0


def test_traceability_random_bytes_forger():
    def forger(oracles, mpk, rng):
        return (GRP, b"paper", rng.read(tibgs.SIGNATURE_SIZE))

    assert tibgs.traceability_game((2, 3), 20, forger, SeededRng(27)) == 0.0


def test_traceability_corrupt_extraction_forger():
    def forger(oracles, mpk, rng):
        frags = [oracles.ext_share(GRP, i, "kate", corrupt=True) for i in (1, 2)]
        gvks = {i: oracles.grp_setup(GRP, i).gvk for i in (1, 2)}
        key = tibgs.reconst_key("kate", frags, gvks, (2, 3), mpk)
        return (GRP, b"stolen", tibgs.sign(b"stolen", key, rng))

    assert tibgs.traceability_game((2, 3), 20, forger, SeededRng(28)) == 0.0
