"""Threshold identity-bound group signature with distributed managers.

The manager role of an ordinary group signature (issuing member keys and
de-anonymizing signers) is split across n managers with threshold k:

* ``setup`` runs the dealerless VSS ceremony; each manager ends up with a
  Shamir share of an unrevealed master secret, and the master public key
  commits to that secret in both source groups.
* ``grp_setup`` derives per-group manager shares by shifting the master
  shares with a group-bound scalar, so they remain Shamir shares (of the
  per-group secret) with the same threshold structure.
* ``ext_share`` issues one manager's fragment of a member key: the member's
  identity point raised to the manager's group share.  Extraction is linear
  in the share, so ``reconst_key`` combines any k valid fragments by
  Lagrange interpolation in the exponent; every qualifying subset yields
  the same G1 point.
* ``sign`` ElGamal-encrypts the signer's identity point to the managers
  under the group opening key and attaches a signature of knowledge (over
  the encryption randomness and the key-blinding scalar) that the encrypted
  identity's member key is held.  The identity point cancels out of
  everything a verifier computes, signatures are randomized, and the size
  is constant in (k, n).
* ``verify`` needs only the master public key and the group id.
* ``open_part`` / ``open`` threshold-decrypt the identity ciphertext: each
  manager contributes c1 raised to its group share, any k contributions
  interpolate to the blinding factor, and the recovered identity point is
  matched against the registry of enrolled member ids.

The ``*_game`` functions are statistical harnesses for the anonymity and
traceability experiments: they estimate adversary advantage empirically and
enforce the oracle budget (strictly fewer than k manager shares may be
touched for the challenged group).  They are sanity instruments, not
security proofs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

from . import vss
from .codec import Decoder, Encoder
from .errors import (
    DuplicateIndexError,
    InsufficientSharesError,
    InsufficientValidSharesError,
    InvalidParamsError,
    InvalidSignatureError,
    OracleViolationError,
    UnknownSignerError,
    VssFailureError,
)
from .groups import G1, G2, GroupElement, PairingContext, Scalar, get_context
from .rng import SeededRng

GRP_TAG = b"openpub/tibgs/grp"
UID_TAG = b"openpub/tibgs/uid"
CHAL_TAG = b"openpub/tibgs/chal"

Params = Tuple[int, int]

SIGNATURE_SIZE = 3 * 33 + 3 * 32  # three G1 points, three scalars


# ---------------------------------------------------------------------------
# key material
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MasterKey:
    """Ceremony output: public commitments plus per-manager secret shares.

    The simulator holds all shares in one object for orchestration; a real
    deployment hands ``shares[i]`` to manager i only.  Reconstructing the
    master secret from the shares is a test-only oracle and never happens
    in protocol code.
    """

    params: Params
    mpk1: GroupElement                         # g1 ** master_secret
    mpk2: GroupElement                         # g2 ** master_secret
    shares: Mapping[int, Scalar]               # manager index -> master share
    share_publics: Mapping[int, GroupElement]  # g2 ** share, cross-checked
    transcript: vss.VssTranscript

    def public_bytes(self) -> bytes:
        return self.mpk1.to_bytes() + self.mpk2.to_bytes()


@dataclass(frozen=True)
class GroupKeyShare:
    grp_id: str
    manager: int
    params: Params
    gsk: Scalar                 # group secret key share
    gvk: GroupElement           # g2 ** gsk, published


@dataclass(frozen=True)
class UserKeyShare:
    grp_id: str
    user_id: str
    manager: int
    fragment: GroupElement      # identity point ** gsk_manager (G1)


@dataclass(frozen=True)
class UserGroupKey:
    grp_id: str
    user_id: str
    key: GroupElement           # identity point ** group_secret (G1)
    w1: GroupElement            # g1 ** group_secret (public, cached for signing)
    w2: GroupElement            # g2 ** group_secret (public, cached for signing)


@dataclass(frozen=True)
class OpenShare:
    manager: int
    value: GroupElement         # c1 ** gsk_manager (G1)


@dataclass(frozen=True)
class GroupSignature:
    """Constant-size signature: three G1 points and three scalars.

    (c1, c2) is the ElGamal encryption of the signer's identity point under
    the group opening key; z is the blinded member key; (chal, resp_t,
    resp_a) is the challenge-response transcript binding the message.
    """

    c1: GroupElement
    c2: GroupElement
    z: GroupElement
    chal: Scalar
    resp_t: Scalar
    resp_a: Scalar

    def to_bytes(self) -> bytes:
        enc = Encoder()
        for pt in (self.c1, self.c2, self.z):
            enc.raw(pt.to_bytes())
        for s in (self.chal, self.resp_t, self.resp_a):
            enc.raw(s.to_bytes())
        return enc.done()

    @classmethod
    def from_bytes(cls, data: bytes) -> "GroupSignature":
        dec = Decoder(data)
        pts = [GroupElement.from_bytes(G1, dec.raw(33)) for _ in range(3)]
        scalars = [Scalar.from_bytes(dec.raw(32)) for _ in range(3)]
        dec.finish()
        return cls(pts[0], pts[1], pts[2], scalars[0], scalars[1], scalars[2])


# ---------------------------------------------------------------------------
# derivations
# ---------------------------------------------------------------------------

def group_shift(grp_id: str, ctx: "PairingContext | None" = None) -> Scalar:
    """Group-bound scalar added to every master share for this group."""
    return (ctx or get_context()).hash_to_scalar(GRP_TAG, grp_id.encode("utf-8"))


def identity_point(grp_id: str, user_id: str, ctx: "PairingContext | None" = None) -> GroupElement:
    """The member's identity point in G1 for this group."""
    ctx = ctx or get_context()
    msg = len(grp_id).to_bytes(4, "big") + grp_id.encode("utf-8") + user_id.encode("utf-8")
    return ctx.hash_to_group(UID_TAG, msg, G1)


def group_public_keys(
    mpk1: GroupElement, mpk2: GroupElement, grp_id: str
) -> Tuple[GroupElement, GroupElement]:
    """(w1, w2) = generators raised to the per-group joint secret."""
    w1, w2, _ = _group_bases(mpk1.to_bytes(), mpk2.to_bytes(), grp_id)
    return w1, w2


@lru_cache(maxsize=64)
def _group_bases(mpk1_bytes: bytes, mpk2_bytes: bytes, grp_id: str):
    """(w1, w2, D = e(w1, w2)) for a group, cached per (mpk, grp_id)."""
    ctx = get_context()
    h = group_shift(grp_id, ctx)
    w1 = GroupElement.from_bytes(G1, mpk1_bytes) + ctx.g1 * h
    w2 = GroupElement.from_bytes(G2, mpk2_bytes) + ctx.g2 * h
    return w1, w2, _pair_cache(w1, w2)


@lru_cache(maxsize=1)
def _gt_generator():
    ctx = get_context()
    return ctx.pairing(ctx.g1, ctx.g2)


def _mpk_pair(mpk) -> Tuple[GroupElement, GroupElement]:
    return (mpk.mpk1, mpk.mpk2) if isinstance(mpk, MasterKey) else tuple(mpk)


# ---------------------------------------------------------------------------
# the eight operations
# ---------------------------------------------------------------------------

def setup(params: Params, rng: SeededRng) -> MasterKey:
    """Distributed master key generation among n simulated managers."""
    k, n = vss.check_params(params)
    ctx = get_context()
    transcript = vss.run_ceremony((k, n), rng.fork("vss"), group=G1)
    mpk1 = transcript.joint_public()

    shares = dict(transcript.final_shares)
    share_publics: Dict[int, GroupElement] = {}
    for i, share in shares.items():
        image = ctx.g2 * share
        # cross-group consistency: the published G2 image must match the
        # G1 commitment evaluation at the same index
        if not ctx.pairing_check(
            [(transcript.joint_commitment(i), ctx.g2), (-ctx.g1, image)]
        ):
            raise VssFailureError(f"manager {i} published an inconsistent G2 image")
        share_publics[i] = image

    indices = sorted(share_publics)[:k]
    basis = vss.lagrange_basis(indices)
    mpk2 = ctx.multiexp([share_publics[i] for i in indices], [basis[i] for i in indices])
    if not ctx.pairing_check([(mpk1, ctx.g2), (-ctx.g1, mpk2)]):
        raise VssFailureError("master public key halves disagree")
    return MasterKey(
        params=(k, n),
        mpk1=mpk1,
        mpk2=mpk2,
        shares=shares,
        share_publics=share_publics,
        transcript=transcript,
    )


def grp_setup(grp_id: str, manager: int, master_share: Scalar, params: Params) -> GroupKeyShare:
    """Deterministic per-group manager key share (and its public image)."""
    k, n = vss.check_params(params)
    if not (1 <= manager <= n):
        raise InvalidParamsError(f"unknown manager index {manager} for n={n}")
    ctx = get_context()
    gsk = master_share + group_shift(grp_id, ctx)
    return GroupKeyShare(
        grp_id=grp_id, manager=int(manager), params=(k, n), gsk=gsk, gvk=ctx.g2 * gsk
    )


def ext_share(user_id: str, group_share: GroupKeyShare) -> UserKeyShare:
    """One manager's fragment of the member key for user_id."""
    point = identity_point(group_share.grp_id, user_id)
    return UserKeyShare(
        grp_id=group_share.grp_id,
        user_id=user_id,
        manager=group_share.manager,
        fragment=point * group_share.gsk,
    )


def verify_user_share(share: UserKeyShare, gvk: GroupElement) -> bool:
    """Check the fragment against the issuing manager's published verify key."""
    ctx = get_context()
    point = identity_point(share.grp_id, share.user_id, ctx)
    return ctx.pairing_check([(share.fragment, ctx.g2), (-point, gvk)])


def reconst_key(
    user_id: str,
    shares: Sequence[UserKeyShare],
    gvks: Mapping[int, GroupElement],
    params: Params,
    mpk,
) -> UserGroupKey:
    """Filter invalid fragments, then combine any k valid ones into the key.

    Fragments failing their verify-key check are dropped silently; the
    offending manager indices ride along on the raised error when fewer
    than k remain.  The combination is subset-independent, so the first k
    valid fragments (by manager index) are canonical.
    """
    k, n = vss.check_params(params)
    indices = [s.manager for s in shares]
    if len(set(indices)) != len(indices):
        raise DuplicateIndexError("user key shares with repeated manager index")
    grp_id = shares[0].grp_id if shares else ""
    valid: List[UserKeyShare] = []
    bad: List[int] = []
    for s in shares:
        if (
            s.user_id == user_id
            and s.manager in gvks
            and verify_user_share(s, gvks[s.manager])
        ):
            valid.append(s)
        else:
            bad.append(s.manager)
    if len(valid) < k:
        raise InsufficientValidSharesError(
            f"only {len(valid)} of {len(shares)} user key shares verified "
            f"(threshold {k}); rejected managers: {sorted(bad)}",
            bad_indices=tuple(sorted(bad)),
        )
    ctx = get_context()
    chosen = sorted(valid, key=lambda s: s.manager)[:k]
    basis = vss.lagrange_basis([s.manager for s in chosen])
    key = ctx.multiexp([s.fragment for s in chosen], [basis[s.manager] for s in chosen])

    mpk1, mpk2 = _mpk_pair(mpk)
    w1, w2 = group_public_keys(mpk1, mpk2, grp_id)
    if not ctx.pairing_check(
        [(key, ctx.g2), (-identity_point(grp_id, user_id, ctx), w2)]
    ):
        raise InvalidSignatureError(
            "combined member key fails the master consistency check"
        )
    return UserGroupKey(grp_id=grp_id, user_id=user_id, key=key, w1=w1, w2=w2)


def _challenge(
    grp_id: str,
    message: bytes,
    c1: GroupElement,
    c2: GroupElement,
    z: GroupElement,
    commit1: GroupElement,
    commit2: GroupElement,
    ctx: PairingContext,
) -> Scalar:
    enc = Encoder().text(grp_id).blob(message)
    for el in (c1, c2, z, commit1):
        enc.raw(el.to_bytes())
    enc.raw(commit2.digest_bytes())
    return ctx.hash_to_scalar(CHAL_TAG, enc.done())


def sign(message: bytes, user_key: UserGroupKey, rng: SeededRng) -> GroupSignature:
    """Randomized constant-size signature hiding the signer's identity.

    Relations proven (witnesses t, a):
        c1 = g1^t
        e(z, g2) / e(c2, w2) = E0^a * D^(-t)
    where E0 = e(g1, g2) and D = e(w1, w2).  With z = key * g1^a and
    c2 = identity_point * w1^t both relations hold and the identity point
    cancels from everything the verifier computes.
    """
    ctx = get_context()
    d_gt = _pair_cache(user_key.w1, user_key.w2)
    e0 = _gt_generator()

    t = ctx.scalar_random(rng)
    a = ctx.scalar_random(rng)
    rho_t = ctx.scalar_random(rng)
    rho_a = ctx.scalar_random(rng)

    point = identity_point(user_key.grp_id, user_key.user_id, ctx)
    c1 = ctx.g1 * t
    c2 = point + user_key.w1 * t        # ElGamal: identity blinded by w1^t
    z = user_key.key + ctx.g1 * a       # member key blinded by g1^a
    commit1 = ctx.g1 * rho_t
    commit2 = ctx.gt_multiexp([(e0, rho_a), (d_gt, -rho_t)])
    chal = _challenge(user_key.grp_id, message, c1, c2, z, commit1, commit2, ctx)
    return GroupSignature(
        c1=c1,
        c2=c2,
        z=z,
        chal=chal,
        resp_t=rho_t + chal * t,
        resp_a=rho_a + chal * a,
    )


@lru_cache(maxsize=64)
def _pair_cache_bytes(w1_bytes: bytes, w2_bytes: bytes):
    ctx = get_context()
    return ctx.pairing(
        GroupElement.from_bytes(G1, w1_bytes), GroupElement.from_bytes(G2, w2_bytes)
    )


def _pair_cache(w1: GroupElement, w2: GroupElement):
    return _pair_cache_bytes(w1.to_bytes(), w2.to_bytes())


def verify(message: bytes, sig: GroupSignature, mpk, grp_id: str) -> bool:
    """Membership verification from public data only."""
    ctx = get_context()
    mpk1, mpk2 = _mpk_pair(mpk)
    w1, w2, d_gt = _group_bases(mpk1.to_bytes(), mpk2.to_bytes(), grp_id)
    e0 = _gt_generator()

    # target = e(z, g2) / e(c2, w2) = E0^a * D^(-t) for honest signatures
    target = ctx.multi_pairing([(sig.z, ctx.g2), (-sig.c2, w2)])
    commit1 = ctx.g1 * sig.resp_t - sig.c1 * sig.chal
    commit2 = ctx.gt_multiexp(
        [(e0, sig.resp_a), (d_gt, -sig.resp_t), (target, -sig.chal)]
    )
    expected = _challenge(grp_id, message, sig.c1, sig.c2, sig.z, commit1, commit2, ctx)
    return expected == sig.chal


def open_part(
    group_share: GroupKeyShare,
    sig: GroupSignature,
    message: bytes,
    mpk,
    verify_sigma: bool = True,
) -> OpenShare:
    """One manager's deterministic contribution to de-anonymization.

    The signature is verified before anything is revealed; callers that
    already verified it (a committed transaction, say) may pass
    ``verify_sigma=False`` to skip the duplicate work.
    """
    if verify_sigma and not verify(message, sig, mpk, group_share.grp_id):
        raise InvalidSignatureError("refusing to open an unverifiable signature")
    return OpenShare(manager=group_share.manager, value=sig.c1 * group_share.gsk)


def open(
    params: Params,
    sig: GroupSignature,
    shares: Sequence[OpenShare],
    registry: Sequence[str],
    grp_id: str,
    gvks: "Mapping[int, GroupElement] | None" = None,
) -> str:
    """Combine k opening contributions and match the identity point.

    When ``gvks`` is supplied each contribution is validity-checked
    (e(value, g2) == e(c1, gvk_manager)) and invalid ones are dropped,
    keeping the opening robust against corrupted managers.  The result is
    independent of which k valid contributions are used.
    """
    k, _ = vss.check_params(params)
    indices = [s.manager for s in shares]
    if len(set(indices)) != len(indices):
        raise DuplicateIndexError("open shares with repeated manager index")
    ctx = get_context()
    usable = list(shares)
    if gvks is not None:
        usable = [
            s
            for s in usable
            if s.manager in gvks
            and ctx.pairing_check([(s.value, ctx.g2), (-sig.c1, gvks[s.manager])])
        ]
    if len(usable) < k:
        raise InsufficientSharesError(
            f"need {k} opening shares, have {len(usable)} usable"
        )
    chosen = sorted(usable, key=lambda s: s.manager)[:k]
    basis = vss.lagrange_basis([s.manager for s in chosen])
    blind = ctx.multiexp([s.value for s in chosen], [basis[s.manager] for s in chosen])
    point = sig.c2 - blind
    for user_id in registry:
        if identity_point(grp_id, user_id, ctx) == point:
            return user_id
    raise UnknownSignerError("recovered identity point matches no registered id")


# ---------------------------------------------------------------------------
# security game harnesses (statistical sanity checks, not proofs)
# ---------------------------------------------------------------------------

class ManagerOracles:
    """Oracle frontend handed to game adversaries.

    Tracks which manager indices the adversary touched per group (key-share
    and opening queries) and per (group, member) pair (extraction queries).
    Once a challenge is frozen, the combined touched set for the challenge
    group -- including extractions for the two challenge identities -- must
    stay strictly below the threshold k.
    """

    def __init__(self, master: MasterKey, k: int):
        self._master = master
        self._k = k
        self._grp_touched: Dict[str, Set[int]] = {}
        self._uid_touched: Dict[Tuple[str, str], Set[int]] = {}
        self._challenge: Optional[Tuple[str, Tuple[str, ...]]] = None

    def _budget(self, grp_id: str) -> Set[int]:
        total = set(self._grp_touched.get(grp_id, set()))
        if self._challenge and self._challenge[0] == grp_id:
            for uid in self._challenge[1]:
                total |= self._uid_touched.get((grp_id, uid), set())
        return total

    def _enforce(self, grp_id: str) -> None:
        if self._challenge and self._challenge[0] == grp_id:
            if len(self._budget(grp_id)) >= self._k:
                raise OracleViolationError(
                    f"adversary reached {self._k} manager shares for the challenge group"
                )

    def freeze_challenge(self, grp_id: str, user_ids: Tuple[str, ...]) -> None:
        self._challenge = (grp_id, tuple(user_ids))
        self._enforce(grp_id)

    def _group_share(self, grp_id: str, manager: int) -> GroupKeyShare:
        return grp_setup(grp_id, manager, self._master.shares[manager], self._master.params)

    # -- oracles ----------------------------------------------------------
    def grp_setup(self, grp_id: str, manager: int) -> GroupKeyShare:
        self._grp_touched.setdefault(grp_id, set()).add(manager)
        self._enforce(grp_id)
        return self._group_share(grp_id, manager)

    def ext_share(self, grp_id: str, manager: int, user_id: str) -> UserKeyShare:
        self._uid_touched.setdefault((grp_id, user_id), set()).add(manager)
        self._enforce(grp_id)
        return ext_share(user_id, self._group_share(grp_id, manager))

    def open_part(
        self, grp_id: str, manager: int, sig: GroupSignature, message: bytes
    ) -> OpenShare:
        self._grp_touched.setdefault(grp_id, set()).add(manager)
        self._enforce(grp_id)
        return open_part(self._group_share(grp_id, manager), sig, message, self._master)

    def gvk(self, grp_id: str, manager: int) -> GroupElement:
        # public data: no budget consumed
        return self._group_share(grp_id, manager).gvk


def extract_full_key(master: MasterKey, grp_id: str, user_id: str) -> UserGroupKey:
    """Harness-side extraction using the first k managers."""
    k, _ = master.params
    shares = []
    gvks = {}
    for i in range(1, k + 1):
        gs = grp_setup(grp_id, i, master.shares[i], master.params)
        shares.append(ext_share(user_id, gs))
        gvks[i] = gs.gvk
    return reconst_key(user_id, shares, gvks, master.params, master)


def anonymity_game(params: Params, trials: int, adversary, rng: SeededRng) -> float:
    """Estimate |Pr[b' = b] - 1/2| over repeated challenge rounds.

    ``adversary`` provides ``choose(oracles, mpk) -> (grp_id, uid0, uid1,
    message, state)`` and ``guess(oracles, sig, state) -> bit``; oracle
    budgets are enforced per round and a violation aborts the game.
    """
    k, _ = vss.check_params(params)
    master = setup(params, rng.fork("setup"))
    wins = 0
    key_cache: Dict[Tuple[str, str], UserGroupKey] = {}
    for trial in range(trials):
        oracles = ManagerOracles(master, k)
        grp_id, uid0, uid1, message, state = adversary.choose(
            oracles, (master.mpk1, master.mpk2)
        )
        oracles.freeze_challenge(grp_id, (uid0, uid1))
        b = rng.fork(f"bit/{trial}").bit()
        uid = (uid0, uid1)[b]
        if (grp_id, uid) not in key_cache:
            key_cache[(grp_id, uid)] = extract_full_key(master, grp_id, uid)
        sig = sign(message, key_cache[(grp_id, uid)], rng.fork(f"sign/{trial}"))
        if adversary.guess(oracles, sig, state) == b:
            wins += 1
    return abs(wins / trials - 0.5)


class TraceabilityOracles:
    """Oracles for the traceability experiment.

    Extraction queries may be flagged ``corrupt``; the harness records the
    distinct manager indices corrupt-extracted per (group, member).  Sign
    oracle outputs are remembered so replays are not counted as forgeries.
    """

    def __init__(self, master: MasterKey, rng: SeededRng):
        self._master = master
        self._rng = rng
        self._count = 0
        self.corrupt: Dict[Tuple[str, str], Set[int]] = {}
        self.issued: Set[Tuple[str, bytes, bytes]] = set()

    def _group_share(self, grp_id: str, manager: int) -> GroupKeyShare:
        return grp_setup(grp_id, manager, self._master.shares[manager], self._master.params)

    def grp_setup(self, grp_id: str, manager: int) -> GroupKeyShare:
        return self._group_share(grp_id, manager)

    def ext_share(
        self, grp_id: str, manager: int, user_id: str, corrupt: bool = False
    ) -> UserKeyShare:
        if corrupt:
            self.corrupt.setdefault((grp_id, user_id), set()).add(manager)
        return ext_share(user_id, self._group_share(grp_id, manager))

    def sign(self, grp_id: str, user_id: str, message: bytes) -> GroupSignature:
        key = extract_full_key(self._master, grp_id, user_id)
        self._count += 1
        sig = sign(message, key, self._rng.fork(f"oracle-sign/{self._count}"))
        self.issued.add((grp_id, message, sig.to_bytes()))
        return sig

    def open_part(
        self, grp_id: str, manager: int, sig: GroupSignature, message: bytes
    ) -> OpenShare:
        return open_part(self._group_share(grp_id, manager), sig, message, self._master)


def traceability_game(params: Params, trials: int, forger, rng: SeededRng) -> float:
    """Fraction of rounds with a fresh verifying signature tracing to no
    fully-corrupted identity.

    An identity counts as corrupted only when at least k of its key
    fragments were corrupt-extracted; opening is done harness-side with all
    managers and the set of corrupt-extracted identities as the registry.
    """
    k, n = vss.check_params(params)
    master = setup(params, rng.fork("setup"))
    successes = 0
    for trial in range(trials):
        oracles = TraceabilityOracles(master, rng.fork(f"trial/{trial}"))
        out = forger(oracles, (master.mpk1, master.mpk2), rng.fork(f"forge/{trial}"))
        if out is None:
            continue
        grp_id, message, sig = out
        if isinstance(sig, (bytes, bytearray)):
            try:
                sig = GroupSignature.from_bytes(bytes(sig))
            except Exception:
                continue  # malformed bytes cannot verify
        if not verify(message, sig, master, grp_id):
            continue
        if (grp_id, message, sig.to_bytes()) in oracles.issued:
            continue  # replay of an oracle signature is not a forgery
        # open with every manager, harness-side
        shares = [
            open_part(
                grp_setup(grp_id, i, master.shares[i], master.params),
                sig,
                message,
                master,
                verify_sigma=False,
            )
            for i in range(1, n + 1)
        ]
        registry = sorted({uid for (g, uid) in oracles.corrupt if g == grp_id})
        try:
            opened = open(master.params, sig, shares, registry, grp_id)
        except UnknownSignerError:
            successes += 1  # verifies yet traces to nobody
            continue
        if len(oracles.corrupt.get((grp_id, opened), ())) < k:
            successes += 1
    return successes / trials


# -- stock adversaries used by the sanity tests ------------------------------

class RandomGuessAdversary:
    """Baseline distinguisher: ignores everything and flips a coin."""

    def __init__(self, seed: int = 0):
        self._rng = SeededRng(seed, b"random-guess")
        self._n = 0

    def choose(self, oracles, mpk):
        self._n += 1
        return ("venue", "author-0", "author-1", b"challenge %d" % self._n, None)

    def guess(self, oracles, sig, state):
        return self._rng.bit()


class ByteInspectionAdversary:
    """Correlates signature bytes with the candidate identity points."""

    def __init__(self):
        self._n = 0

    def choose(self, oracles, mpk):
        self._n += 1
        return ("venue", "author-0", "author-1", b"inspect %d" % self._n, None)

    def guess(self, oracles, sig, state):
        blob = sig.to_bytes()
        scores = []
        for uid in ("author-0", "author-1"):
            target = (identity_point("venue", uid).to_bytes() * 7)[: len(blob)]
            scores.append(sum(x == y for x, y in zip(blob, target)))
        return 0 if scores[0] >= scores[1] else 1


class ShareGrabbingAdversary:
    """Requests a full threshold of opening shares; the harness must refuse."""

    def __init__(self, k: int):
        self._k = k

    def choose(self, oracles, mpk):
        return ("venue", "author-0", "author-1", b"grab", None)

    def guess(self, oracles, sig, state):
        for i in range(1, self._k + 1):
            oracles.open_part("venue", i, sig, b"grab")
        return 0
