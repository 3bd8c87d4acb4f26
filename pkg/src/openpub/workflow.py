"""The publication protocol: the seven procedures over the ledger.

Each procedure is a pure function producing transactions (and, where the
protocol calls for it, collecting key or opening shares through a caller
supplied fetch function, which is how the simulator injects validator
behavior, including Byzantine corruption).  State changes happen only when
the produced transactions commit through the ledger's validation gate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from . import ledger, suite, tibgs, tsig, vss
from .codec import Decoder, Encoder
from .errors import (
    BeforeEndtimeError,
    DecryptionError,
    InsufficientFundsError,
    InsufficientReviewersError,
    InsufficientSharesError,
    OracleViolationError,
)
from .groups import GroupElement, Scalar
from .ledger import (
    ACCEPT,
    REJECT,
    AccountType,
    ChainState,
    ContentStore,
    DistributeTx,
    FeeSchedule,
    LedgerEnv,
    OpenTx,
    PK_ANONYMITY,
    ReviewTx,
    SubmitTx,
    TransferTx,
    assignment_digest,
    tx_hash,
    tx_preimage,
)
from .rng import SeededRng

Params = Tuple[int, int]


# ---------------------------------------------------------------------------
# system initialization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ValidatorIdentity:
    """Everything one validator holds after initialization."""

    index: int
    keypair: suite.KeyPair
    master_share: Scalar
    group_share: tibgs.GroupKeyShare
    tsig_share: Scalar


@dataclass(frozen=True)
class SystemKeys:
    """Shared initialization output (each validator holds its own slice)."""

    params: Params
    grp_id: str
    fees: FeeSchedule
    master: tibgs.MasterKey
    group_shares: Mapping[int, tibgs.GroupKeyShare]
    gvks: Mapping[int, GroupElement]
    threshold: tsig.ThresholdKeySet
    validators: Mapping[int, ValidatorIdentity]

    @property
    def acc_pub(self) -> bytes:
        return self.threshold.account_id

    def env(self, f: int = 0) -> LedgerEnv:
        return LedgerEnv(
            mpk=(self.master.mpk1, self.master.mpk2),
            grp_id=self.grp_id,
            acc_pub=self.acc_pub,
            tsig_pk=self.threshold.public_key,
            fees=self.fees,
            validators=tuple(
                self.validators[i].keypair.pk for i in sorted(self.validators)
            ),
            f=f,
        )


def system_initialization(
    params: Params,
    grp_id: str,
    rng: SeededRng,
    fees: "FeeSchedule | None" = None,
) -> SystemKeys:
    """Run all key ceremonies; every validator ends up fully equipped."""
    k, n = vss.check_params(params)
    fees = fees or FeeSchedule()
    master = tibgs.setup(params, rng.fork("tibgs"))
    keyset = tsig.thres_keygen(params, rng.fork("tsig"))
    group_shares = {
        i: tibgs.grp_setup(grp_id, i, master.shares[i], params) for i in range(1, n + 1)
    }
    validators = {
        i: ValidatorIdentity(
            index=i,
            keypair=suite.sig_keygen(rng.fork(f"validator/{i}")),
            master_share=master.shares[i],
            group_share=group_shares[i],
            tsig_share=keyset.secret_shares[i],
        )
        for i in range(1, n + 1)
    }
    return SystemKeys(
        params=params,
        grp_id=grp_id,
        fees=fees,
        master=master,
        group_shares=group_shares,
        gvks={i: s.gvk for i, s in group_shares.items()},
        threshold=keyset,
        validators=validators,
    )


# ---------------------------------------------------------------------------
# registration
# ---------------------------------------------------------------------------

ShareFetch = Callable[[str], Sequence[tibgs.UserKeyShare]]


@dataclass(frozen=True)
class Registration:
    keypair: suite.KeyPair
    deposit_tx: Optional[TransferTx]
    user_key: Optional[tibgs.UserGroupKey]


def registration(
    acc_type: AccountType,
    user_id: str,
    rng: SeededRng,
    system: SystemKeys,
    balance: int = 0,
    share_fetch: "ShareFetch | None" = None,
) -> Registration:
    """Create account keys; authors also deposit and collect a member key.

    Readers and reviewers get a key pair and nothing else.  Authors must
    cover the deposit, emit the deposit transfer, and (once ``share_fetch``
    can supply at least k fragments) reconstruct their group signing key --
    in the simulator the fetch happens after the deposit commits.
    """
    keypair = suite.sig_keygen(rng.fork("account"))
    if acc_type in (AccountType.READER, AccountType.REVIEWER):
        return Registration(keypair=keypair, deposit_tx=None, user_key=None)
    if balance < system.fees.deposit:
        raise InsufficientFundsError(
            f"author balance {balance} cannot cover deposit {system.fees.deposit}"
        )
    body = TransferTx(
        sender=keypair.pk,
        receiver=system.acc_pub,
        user_id=user_id,
        amount=system.fees.deposit,
    )
    deposit = TransferTx(
        body.sender, body.receiver, body.user_id, body.amount,
        sig=suite.sig_sign(tx_preimage(body), keypair.sk),
    )
    user_key = None
    if share_fetch is not None:
        user_key = collect_member_key(user_id, share_fetch, system)
    return Registration(keypair=keypair, deposit_tx=deposit, user_key=user_key)


def collect_member_key(
    user_id: str, share_fetch: ShareFetch, system: SystemKeys
) -> tibgs.UserGroupKey:
    """Reconstruct the member key from whatever fragments arrived."""
    shares = list(share_fetch(user_id))
    return tibgs.reconst_key(user_id, shares, system.gvks, system.params, system.master)


def recover_key(user_id: str, share_fetch: ShareFetch, system: SystemKeys) -> tibgs.UserGroupKey:
    """Re-extraction after key loss; identical to the original collection."""
    return collect_member_key(user_id, share_fetch, system)


# ---------------------------------------------------------------------------
# submission
# ---------------------------------------------------------------------------

def submission(
    field_name: str,
    paper: bytes,
    user_key: tibgs.UserGroupKey,
    store: ContentStore,
    acc_pub: bytes,
    rng: SeededRng,
) -> SubmitTx:
    """Anonymous submission: sentinel sender, group-signed body."""
    digest = store.put(paper)
    body = SubmitTx(
        sender=PK_ANONYMITY,
        receiver=acc_pub,
        field_name=field_name,
        paper_hash=digest,
        paper_len=len(paper),
    )
    gsig = tibgs.sign(tx_preimage(body), user_key, rng)
    return SubmitTx(
        body.sender, body.receiver, body.field_name, body.paper_hash,
        body.paper_len, gsig=gsig.to_bytes(),
    )


# ---------------------------------------------------------------------------
# distribution
# ---------------------------------------------------------------------------

def _assignment_plaintext(submit_hash: bytes, reviewer_id: str, nonce: bytes) -> bytes:
    return Encoder().raw(submit_hash).text(reviewer_id).raw(nonce).done()


def _parse_assignment(plain: bytes) -> Tuple[bytes, str, bytes]:
    dec = Decoder(plain)
    submit_hash = dec.raw(32)
    reviewer_id = dec.text()
    nonce = dec.raw(32)
    dec.finish()
    return submit_hash, reviewer_id, nonce


@dataclass(frozen=True)
class DistributionResult:
    tx: DistributeTx
    assignments: Mapping[str, bytes]   # reviewer id -> sealed nonce (distributor-only)


def distribution(
    submit_hash: bytes,
    field_name: str,
    state: ChainState,
    count: int,
    endtime: int,
    validator: ValidatorIdentity,
    acc_pub: bytes,
    rng: SeededRng,
) -> DistributionResult:
    """Select reviewers for the paper's field and seal their assignments.

    Each chosen reviewer gets a fresh nonce encrypted to their account key;
    the published transaction carries the shuffled ciphertexts plus
    assignment digests so any validator can later check a review's echo.
    Nothing in it names a reviewer.
    """
    pool = [
        acct
        for acct in state.accounts.values()
        if acct.type == AccountType.REVIEWER and acct.research_field == field_name
    ]
    pool.sort(key=lambda a: a.user_id)
    if len(pool) < count:
        raise InsufficientReviewersError(
            f"field {field_name!r} has {len(pool)} reviewers, need {count}"
        )
    chosen = rng.sample(pool, count)
    assignments: Dict[str, bytes] = {}
    ciphertexts: List[bytes] = []
    digests: List[bytes] = []
    for acct in chosen:
        nonce = rng.read(32)
        assignments[acct.user_id] = nonce
        plain = _assignment_plaintext(submit_hash, acct.user_id, nonce)
        ciphertexts.append(suite.enc(plain, acct.pk, rng))
        digests.append(assignment_digest(submit_hash, acct.user_id, nonce))
    rng.shuffle(ciphertexts)
    rng.shuffle(digests)
    body = DistributeTx(
        sender=validator.keypair.pk,
        receiver=acc_pub,
        submit_hash=submit_hash,
        ciphertexts=tuple(ciphertexts),
        assignment_digests=tuple(digests),
        endtime=endtime,
    )
    tx = DistributeTx(
        body.sender, body.receiver, body.submit_hash, body.ciphertexts,
        body.assignment_digests, body.endtime,
        sig=suite.sig_sign(tx_preimage(body), validator.keypair.sk),
    )
    return DistributionResult(tx=tx, assignments=assignments)


# ---------------------------------------------------------------------------
# review
# ---------------------------------------------------------------------------

Judgment = Callable[[bytes], Tuple[str, int]]


def review(
    reviewer: suite.KeyPair,
    distribute_tx: DistributeTx,
    store: ContentStore,
    state: ChainState,
    judge: Judgment,
    acc_pub: bytes,
) -> Optional[ReviewTx]:
    """Trial-decrypt the assignment batch; review on the unique hit.

    Returns None when no ciphertext decrypts (this reviewer was not
    chosen).  The produced transaction echoes the sealed (reviewer, nonce)
    pair, which validators check against the published digests.
    """
    found = None
    for ct in distribute_tx.ciphertexts:
        try:
            plain = suite.dec(ct, reviewer.sk)
        except DecryptionError:
            continue
        found = _parse_assignment(plain)
        break
    if found is None:
        return None
    submit_hash, reviewer_id, nonce = found
    paper = state.papers[submit_hash]
    manuscript = store.get(paper.paper_hash)
    if manuscript is None:
        raise KeyError("manuscript missing from the content store")
    comment, score = judge(manuscript)
    body = ReviewTx(
        sender=reviewer.pk,
        receiver=acc_pub,
        submit_hash=submit_hash,
        reviewer_id=reviewer_id,
        nonce=nonce,
        comment=comment,
        score=score,
    )
    return ReviewTx(
        body.sender, body.receiver, body.submit_hash, body.reviewer_id,
        body.nonce, body.comment, body.score,
        sig=suite.sig_sign(tx_preimage(body), reviewer.sk),
    )


def reader_comment(
    reader: suite.KeyPair,
    submit_hash: bytes,
    comment: str,
    score: int,
    acc_pub: bytes,
) -> ReviewTx:
    """Unassigned commentary; committed but never counted in decisions."""
    body = ReviewTx(
        sender=reader.pk, receiver=acc_pub, submit_hash=submit_hash,
        reviewer_id="", nonce=b"", comment=comment, score=score,
    )
    return ReviewTx(
        body.sender, body.receiver, body.submit_hash, body.reviewer_id,
        body.nonce, body.comment, body.score,
        sig=suite.sig_sign(tx_preimage(body), reader.sk),
    )


# ---------------------------------------------------------------------------
# decision + open
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecisionRule:
    min_reviews: int = 2
    accept_mean: float = 6.0


def decide(state: ChainState, submit_hash: bytes, rule: DecisionRule) -> int:
    """Accept iff enough on-time assigned reviews average at the bar."""
    paper = state.papers[submit_hash]
    scores = [
        r.score
        for (h, _), r in state.reviews.items()
        if h == submit_hash and r.height < paper.endtime
    ]
    if len(scores) < rule.min_reviews:
        return REJECT
    return ACCEPT if sum(scores) / len(scores) >= rule.accept_mean else REJECT


OkFetch = Callable[[tibgs.GroupSignature, bytes], Sequence[tibgs.OpenShare]]


def open_paper(
    submit_tx: SubmitTx,
    state: ChainState,
    validator: ValidatorIdentity,
    ok_fetch: OkFetch,
    system: SystemKeys,
    rule: DecisionRule,
) -> OpenTx:
    """De-anonymize the author and publish the decision after the deadline."""
    submit_hash = tx_hash(submit_tx)
    paper = state.papers[submit_hash]
    if state.height < paper.endtime:
        raise BeforeEndtimeError(
            f"height {state.height} precedes review deadline {paper.endtime}"
        )
    sig = tibgs.GroupSignature.from_bytes(submit_tx.gsig)
    message = tx_preimage(submit_tx)
    shares = list(ok_fetch(sig, message))
    registry = sorted(
        uid
        for uid, pk in state.user_pk.items()
        if state.accounts[pk].type == AccountType.AUTHOR
    )
    author = tibgs.open(
        system.params, sig, shares, registry, system.grp_id, gvks=system.gvks
    )
    reviewer_ids = tuple(
        sorted(rid for (h, rid) in state.reviews if h == submit_hash)
    )
    body = OpenTx(
        sender=validator.keypair.pk,
        receiver=system.acc_pub,
        submit_hash=submit_hash,
        user_id=author,
        result=decide(state, submit_hash, rule),
        reviewer_ids=reviewer_ids,
    )
    return OpenTx(
        body.sender, body.receiver, body.submit_hash, body.user_id, body.result,
        body.reviewer_ids,
        sig=suite.sig_sign(tx_preimage(body), validator.keypair.sk),
    )


# ---------------------------------------------------------------------------
# reward
# ---------------------------------------------------------------------------

TsigFetch = Callable[[bytes], Sequence[tsig.SigShare]]


def reward_payments(
    open_tx: OpenTx, state: ChainState, system: SystemKeys
) -> List[TransferTx]:
    """Unsigned payment bodies owed after an open transaction.

    Review fees and the acceptance incentive carry a per-paper context
    suffix in the user-id field so equal payments for different papers hash
    differently; the deposit refund carries the author's exact id, which is
    what flips the deposit flag back at commit time.
    """
    fees = system.fees
    tag = open_tx.submit_hash.hex()[:8]
    payments: List[TransferTx] = []
    for rid in open_tx.reviewer_ids:
        payments.append(TransferTx(
            sender=system.acc_pub, receiver=state.user_pk[rid],
            user_id=f"{rid}@{tag}", amount=fees.review,
        ))
    author_pk = state.user_pk[open_tx.user_id]
    if open_tx.result == ACCEPT:
        payments.append(TransferTx(
            sender=system.acc_pub, receiver=author_pk,
            user_id=f"{open_tx.user_id}@{tag}", amount=fees.incentive,
        ))
    if state.accounts[author_pk].deposit_held:
        payments.append(TransferTx(
            sender=system.acc_pub, receiver=author_pk,
            user_id=open_tx.user_id, amount=fees.deposit,
        ))
    total = sum(p.amount for p in payments)
    if state.balance(system.acc_pub) < total:
        raise InsufficientFundsError(
            f"public account holds {state.balance(system.acc_pub)}, owes {total}"
        )
    return payments


def reward(
    open_tx: OpenTx,
    state: ChainState,
    system: SystemKeys,
    tsig_fetch: TsigFetch,
) -> List[TransferTx]:
    """Pay reviewers, reward accepted authors, refund held deposits.

    Every transfer spends from the public account and therefore needs at
    least k valid threshold-signature shares; short collections raise and
    the caller retries next round.
    """
    k, _ = system.params
    transfers: List[TransferTx] = []
    for body in reward_payments(open_tx, state, system):
        preimage = tx_preimage(body)
        valid = [
            s
            for s in tsig_fetch(preimage)
            if tsig.sig_share_ver(
                system.threshold.public_key,
                system.threshold.verify_keys[s.signer],
                preimage,
                s,
            )
        ]
        if len(valid) < k:
            raise InsufficientSharesError(
                f"{len(valid)} valid threshold shares for a payment, need {k}"
            )
        agg = tsig.sig_share_comb(valid, system.params)
        transfers.append(
            TransferTx(body.sender, body.receiver, body.user_id, body.amount,
                       tsig=agg.to_bytes())
        )
    return transfers


# ---------------------------------------------------------------------------
# end-to-end anonymity game
# ---------------------------------------------------------------------------

class WorkflowOracles:
    """Registration and open oracles for the end-to-end anonymity game.

    The adversary also receives the internals of the first k-1 validators.
    Registering a challenge identity or opening the challenge submission
    is an oracle violation.
    """

    def __init__(self, system: SystemKeys, store: ContentStore, rng: SeededRng):
        self._system = system
        self._store = store
        self._rng = rng
        self._registered: set = set()
        self._challenge_users: Tuple[str, ...] = ()
        self._challenge_sig: Optional[bytes] = None

    def freeze(self, user_ids: Tuple[str, ...], sig_bytes: bytes) -> None:
        self._challenge_users = user_ids
        self._challenge_sig = sig_bytes

    def note_registered(self, user_id: str) -> None:
        self._registered.add(user_id)

    def author_registration(self, user_id: str) -> tibgs.UserGroupKey:
        if user_id in self._challenge_users:
            raise OracleViolationError("registration of a challenge identity")
        self._registered.add(user_id)
        return tibgs.extract_full_key(self._system.master, self._system.grp_id, user_id)

    def open(self, gsig_bytes: bytes, message: bytes) -> str:
        if self._challenge_sig is not None and gsig_bytes == self._challenge_sig:
            raise OracleViolationError("opening the challenge submission")
        sig = tibgs.GroupSignature.from_bytes(gsig_bytes)
        k, _ = self._system.params
        shares = [
            tibgs.open_part(self._system.group_shares[i], sig, message,
                            self._system.master)
            for i in range(1, k + 1)
        ]
        return tibgs.open(self._system.params, sig, shares,
                          sorted(self._registered), self._system.grp_id)


def anonymity_game_e2e(
    params: Params, trials: int, adversary, rng: SeededRng
) -> float:
    """Advantage estimate for distinguishing submission authorship.

    Per round the adversary names two authors and a manuscript; the
    harness registers both, submits as a random one of them, and hands
    over the full committed submission bytes (everything a chain scraper
    would see).
    """
    k, n = vss.check_params(params)
    system = system_initialization(params, "venue", rng.fork("init"))
    store = ContentStore()
    leaked = {
        i: (system.validators[i].master_share, system.group_shares[i])
        for i in range(1, k)  # strictly fewer than k validator internals
    }
    wins = 0
    key_cache: Dict[str, tibgs.UserGroupKey] = {}
    for trial in range(trials):
        oracles = WorkflowOracles(system, store, rng.fork(f"oracle/{trial}"))
        uid0, uid1, paper, state = adversary.choose(
            oracles, (system.master.mpk1, system.master.mpk2), leaked
        )
        for uid in (uid0, uid1):
            oracles.note_registered(uid)
            if uid not in key_cache:
                key_cache[uid] = tibgs.extract_full_key(
                    system.master, system.grp_id, uid
                )
        b = rng.fork(f"bit/{trial}").bit()
        tx = submission(
            "crypto", paper, key_cache[(uid0, uid1)[b]], store,
            system.acc_pub, rng.fork(f"submit/{trial}"),
        )
        oracles.freeze((uid0, uid1), tx.gsig)
        guess = adversary.guess(oracles, ledger.canonical_encode(tx), state)
        if guess == b:
            wins += 1
    return abs(wins / trials - 0.5)


class ChainScrapingAdversary:
    """Inspects every committed byte of the challenge submission."""

    def __init__(self):
        self._n = 0

    def choose(self, oracles, mpk, leaked):
        self._n += 1
        return ("author-a", "author-b", b"manuscript %d" % self._n, None)

    def guess(self, oracles, committed_bytes, state):
        score = []
        for uid in ("author-a", "author-b"):
            pattern = (tibgs.identity_point("venue", uid).to_bytes() * 8)[
                : len(committed_bytes)
            ]
            score.append(sum(x == y for x, y in zip(committed_bytes, pattern)))
        return 0 if score[0] >= score[1] else 1


class RandomGuessE2E:
    def __init__(self, seed: int = 0):
        self._rng = SeededRng(seed, b"e2e-random")
        self._n = 0

    def choose(self, oracles, mpk, leaked):
        self._n += 1
        return ("author-a", "author-b", b"paper %d" % self._n, None)

    def guess(self, oracles, committed_bytes, state):
        return self._rng.bit()


class ChallengeOpeningAdversary:
    """Asks the open oracle about the challenge itself; must be refused."""

    def choose(self, oracles, mpk, leaked):
        return ("author-a", "author-b", b"forbidden", None)

    def guess(self, oracles, committed_bytes, state):
        tx = ledger.canonical_decode(committed_bytes)
        return 0 if oracles.open(tx.gsig, tx_preimage(tx)) == "author-a" else 1
