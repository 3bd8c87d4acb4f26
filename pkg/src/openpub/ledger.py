"""Account ledger: the five transaction types, validation, and blocks.

Transactions are tagged unions with a fixed field order (sender first,
receiver second).  The canonical encoding is deterministic and
length-prefixed.  Signatures of every family sign the signature-less
preimage; the transaction id hashes the full encoding, so resubmitting the
same manuscript yields a fresh id (group signatures are randomized) while
deterministic-signature transactions stay replay-deduplicable.

``ver_tx`` is the validators' single validation gate: it checks the
signature family appropriate to the transaction class (ordinary signatures
for real-name traffic, the group signature for anonymous submissions, the
threshold signature for spends from the public account), enforces balance
and protocol-state rules, and returns the post-state.  It never mutates
the input state on rejection.

Monetary policy: review and incentive fees are minted into the public
account when an open transaction commits, and the mint total is tracked so
token conservation is checkable at any time (total balances == genesis
total + minted).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from enum import IntEnum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import suite, tibgs, tsig
from .codec import Decoder, Encoder
from .errors import DecodingError, InvalidBlockError
from .groups import GroupElement

# Reserved sender for anonymous submissions; the 0x01 tag can never be a
# valid account id (real ids are 0x02/0x03-tagged curve points or the
# 65-byte threshold key).
PK_ANONYMITY = b"\x01" + hashlib.sha256(b"openpub/pk-anonymity").digest()


class AccountType(IntEnum):
    READER = 0
    REVIEWER = 1
    AUTHOR = 2
    VALIDATOR = 3
    PUBLIC = 4


class TxKind(IntEnum):
    TRANSFER = 1
    SUBMIT = 2
    DISTRIBUTE = 3
    REVIEW = 4
    OPEN = 5


ACCEPT = 1
REJECT = 0


@dataclass(frozen=True)
class TransferTx:
    sender: bytes
    receiver: bytes
    user_id: str
    amount: int
    sig: Optional[bytes] = None    # ordinary signature (65 bytes)
    tsig: Optional[bytes] = None   # threshold signature (33 bytes)

    kind = TxKind.TRANSFER


@dataclass(frozen=True)
class SubmitTx:
    sender: bytes                  # always PK_ANONYMITY
    receiver: bytes                # the public account
    field_name: str
    paper_hash: bytes              # content-store address of the manuscript
    paper_len: int
    gsig: bytes = b""              # group signature

    kind = TxKind.SUBMIT


@dataclass(frozen=True)
class DistributeTx:
    sender: bytes                  # distributing validator
    receiver: bytes
    submit_hash: bytes
    ciphertexts: Tuple[bytes, ...]       # one per chosen reviewer, shuffled
    assignment_digests: Tuple[bytes, ...]  # H(submit_hash, reviewer, nonce)
    endtime: int                   # review deadline as a block height
    sig: bytes = b""

    kind = TxKind.DISTRIBUTE


@dataclass(frozen=True)
class ReviewTx:
    sender: bytes
    receiver: bytes
    submit_hash: bytes
    reviewer_id: str               # empty for reader comments
    nonce: bytes                   # echoed assignment nonce (32 bytes, or empty)
    comment: str
    score: int
    sig: bytes = b""

    kind = TxKind.REVIEW


@dataclass(frozen=True)
class OpenTx:
    sender: bytes
    receiver: bytes
    submit_hash: bytes
    user_id: str                   # de-anonymized author
    result: int                    # ACCEPT or REJECT
    reviewer_ids: Tuple[str, ...]
    sig: bytes = b""

    kind = TxKind.OPEN


Transaction = Union[TransferTx, SubmitTx, DistributeTx, ReviewTx, OpenTx]


def _encode_body(tx: Transaction, enc: Encoder) -> None:
    enc.u8(tx.kind)
    enc.blob(tx.sender)
    enc.blob(tx.receiver)
    if isinstance(tx, TransferTx):
        enc.text(tx.user_id).u64(tx.amount)
    elif isinstance(tx, SubmitTx):
        enc.text(tx.field_name).raw(tx.paper_hash).u64(tx.paper_len)
    elif isinstance(tx, DistributeTx):
        enc.raw(tx.submit_hash).u16(len(tx.ciphertexts))
        for ct in tx.ciphertexts:
            enc.blob(ct)
        enc.u16(len(tx.assignment_digests))
        for d in tx.assignment_digests:
            enc.raw(d)
        enc.u64(tx.endtime)
    elif isinstance(tx, ReviewTx):
        enc.raw(tx.submit_hash).text(tx.reviewer_id).blob(tx.nonce)
        enc.text(tx.comment).u8(tx.score)
    elif isinstance(tx, OpenTx):
        enc.raw(tx.submit_hash).text(tx.user_id).u8(tx.result)
        enc.u16(len(tx.reviewer_ids))
        for rid in tx.reviewer_ids:
            enc.text(rid)
    else:
        raise DecodingError(f"unknown transaction variant {type(tx).__name__}")


def tx_preimage(tx: Transaction) -> bytes:
    """Canonical bytes excluding the signature slot; this is what is signed."""
    enc = Encoder()
    _encode_body(tx, enc)
    return enc.done()


def tx_hash(tx: Transaction) -> bytes:
    """Transaction id over the full encoding (signature slot included)."""
    return hashlib.sha256(canonical_encode(tx)).digest()


def canonical_encode(tx: Transaction) -> bytes:
    """Full canonical encoding including the signature slot."""
    enc = Encoder()
    _encode_body(tx, enc)
    if isinstance(tx, TransferTx):
        if tx.tsig is not None:
            enc.u8(1).blob(tx.tsig)
        else:
            enc.u8(0).blob(tx.sig or b"")
    elif isinstance(tx, SubmitTx):
        enc.u8(2).blob(tx.gsig)
    else:
        enc.u8(0).blob(tx.sig)
    return enc.done()


def canonical_decode(data: bytes) -> Transaction:
    dec = Decoder(data)
    tx = _decode_body(dec)
    family = dec.u8()
    blob = dec.blob()
    dec.finish()
    if isinstance(tx, TransferTx):
        if family == 1:
            return replace(tx, tsig=blob)
        return replace(tx, sig=blob)
    if isinstance(tx, SubmitTx):
        return replace(tx, gsig=blob)
    return replace(tx, sig=blob)


def _decode_body(dec: Decoder) -> Transaction:
    kind = dec.u8()
    sender = dec.blob()
    receiver = dec.blob()
    if kind == TxKind.TRANSFER:
        return TransferTx(sender, receiver, dec.text(), dec.u64())
    if kind == TxKind.SUBMIT:
        return SubmitTx(sender, receiver, dec.text(), dec.raw(32), dec.u64())
    if kind == TxKind.DISTRIBUTE:
        subh = dec.raw(32)
        cts = tuple(dec.blob() for _ in range(dec.u16()))
        digests = tuple(dec.raw(32) for _ in range(dec.u16()))
        return DistributeTx(sender, receiver, subh, cts, digests, dec.u64())
    if kind == TxKind.REVIEW:
        return ReviewTx(
            sender, receiver, dec.raw(32), dec.text(), dec.blob(), dec.text(), dec.u8()
        )
    if kind == TxKind.OPEN:
        subh = dec.raw(32)
        uid = dec.text()
        result = dec.u8()
        rids = tuple(dec.text() for _ in range(dec.u16()))
        return OpenTx(sender, receiver, subh, uid, result, rids)
    raise DecodingError(f"unknown transaction kind {kind}")


def assignment_digest(submit_hash: bytes, reviewer_id: str, nonce: bytes) -> bytes:
    """Commitment to one reviewer assignment, published in the distribute tx."""
    return hashlib.sha256(
        b"openpub/assignment" + submit_hash + nonce + reviewer_id.encode("utf-8")
    ).digest()


# ---------------------------------------------------------------------------
# chain state
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Account:
    pk: bytes
    balance: int
    type: AccountType
    user_id: str = ""
    deposit_held: bool = False
    research_field: str = ""


class PaperStatus(IntEnum):
    SUBMITTED = 0
    DISTRIBUTED = 1
    DECIDED = 2


@dataclass(frozen=True)
class PaperRecord:
    submit_hash: bytes
    field_name: str
    paper_hash: bytes
    paper_len: int
    status: PaperStatus
    submitted_at: int
    endtime: int = 0
    assignment_digests: Tuple[bytes, ...] = ()
    reviewer_count: int = 0
    distributor: bytes = b""


@dataclass(frozen=True)
class ReviewRecord:
    submit_hash: bytes
    reviewer_id: str
    nonce: bytes
    comment: str
    score: int
    height: int
    assigned: bool                 # carried a valid assignment echo


@dataclass(frozen=True)
class OpenRecord:
    submit_hash: bytes
    user_id: str
    result: int
    reviewer_ids: Tuple[str, ...]
    height: int


@dataclass
class ChainState:
    """Value-semantics ledger state; apply operations return fresh copies."""

    accounts: Dict[bytes, Account] = field(default_factory=dict)
    user_pk: Dict[str, bytes] = field(default_factory=dict)
    papers: Dict[bytes, PaperRecord] = field(default_factory=dict)
    reviews: Dict[Tuple[bytes, str], ReviewRecord] = field(default_factory=dict)
    comments: List[ReviewRecord] = field(default_factory=list)
    published: Dict[bytes, OpenRecord] = field(default_factory=dict)
    minted: int = 0
    height: int = 0

    def copy(self) -> "ChainState":
        return ChainState(
            accounts=dict(self.accounts),
            user_pk=dict(self.user_pk),
            papers=dict(self.papers),
            reviews=dict(self.reviews),
            comments=list(self.comments),
            published=dict(self.published),
            minted=self.minted,
            height=self.height,
        )

    def balance(self, pk: bytes) -> int:
        acct = self.accounts.get(pk)
        return acct.balance if acct else 0

    def credit(self, pk: bytes, amount: int) -> None:
        acct = self.accounts.get(pk)
        if acct is None:
            raise KeyError("credit to unregistered account")
        self.accounts[pk] = replace(acct, balance=acct.balance + amount)

    def debit(self, pk: bytes, amount: int) -> None:
        acct = self.accounts[pk]
        if acct.balance < amount:
            raise ValueError("insufficient balance")
        self.accounts[pk] = replace(acct, balance=acct.balance - amount)

    def total_tokens(self) -> int:
        return sum(a.balance for a in self.accounts.values())


@dataclass(frozen=True)
class FeeSchedule:
    deposit: int = 100
    review: int = 10
    incentive: int = 50


@dataclass(frozen=True)
class LedgerEnv:
    """Public verification context shared by all validators."""

    mpk: Tuple[GroupElement, GroupElement]
    grp_id: str
    acc_pub: bytes
    tsig_pk: GroupElement
    fees: FeeSchedule
    validators: Tuple[bytes, ...] = ()   # validator account ids
    f: int = 0                           # fault bound for certificates


def genesis_state(accounts: Sequence[Account]) -> ChainState:
    state = ChainState()
    for acct in accounts:
        state.accounts[acct.pk] = acct
        if acct.user_id:
            state.user_pk[acct.user_id] = acct.pk
    return state


# ---------------------------------------------------------------------------
# verification + application
# ---------------------------------------------------------------------------

def ver_tx(tx: Transaction, state: ChainState, env: LedgerEnv) -> Tuple[bool, ChainState]:
    """Validate one transaction against the state.

    Returns (True, post_state) on success and (False, state) untouched on
    any failure; the caller decides whether to include or discard.
    """
    try:
        if isinstance(tx, SubmitTx):
            return _ver_submit(tx, state, env)
        if isinstance(tx, DistributeTx):
            return _ver_distribute(tx, state, env)
        if isinstance(tx, ReviewTx):
            return _ver_review(tx, state, env)
        if isinstance(tx, OpenTx):
            return _ver_open(tx, state, env)
        if isinstance(tx, TransferTx):
            return _ver_transfer(tx, state, env)
    except (DecodingError, KeyError, ValueError):
        return (False, state)
    return (False, state)


def _ver_submit(tx: SubmitTx, state: ChainState, env: LedgerEnv):
    if tx.sender != PK_ANONYMITY or tx.receiver != env.acc_pub:
        return (False, state)
    if tx_hash(tx) in state.papers:
        return (False, state)
    try:
        gsig = tibgs.GroupSignature.from_bytes(tx.gsig)
    except Exception:
        return (False, state)
    if not tibgs.verify(tx_preimage(tx), gsig, env.mpk, env.grp_id):
        return (False, state)
    post = state.copy()
    h = tx_hash(tx)
    post.papers[h] = PaperRecord(
        submit_hash=h,
        field_name=tx.field_name,
        paper_hash=tx.paper_hash,
        paper_len=tx.paper_len,
        status=PaperStatus.SUBMITTED,
        submitted_at=state.height,
    )
    return (True, post)


def _ver_distribute(tx: DistributeTx, state: ChainState, env: LedgerEnv):
    paper = state.papers.get(tx.submit_hash)
    if paper is None or paper.status != PaperStatus.SUBMITTED:
        return (False, state)
    if len(tx.ciphertexts) != len(tx.assignment_digests) or not tx.ciphertexts:
        return (False, state)
    if tx.endtime <= state.height:
        return (False, state)
    if env.validators and tx.sender not in env.validators:
        return (False, state)
    if not suite.sig_verify(tx.sender, tx_preimage(tx), tx.sig):
        return (False, state)
    post = state.copy()
    post.papers[tx.submit_hash] = replace(
        paper,
        status=PaperStatus.DISTRIBUTED,
        endtime=tx.endtime,
        assignment_digests=tuple(tx.assignment_digests),
        reviewer_count=len(tx.ciphertexts),
        distributor=tx.sender,
    )
    return (True, post)


def _ver_review(tx: ReviewTx, state: ChainState, env: LedgerEnv):
    paper = state.papers.get(tx.submit_hash)
    if paper is None or paper.status == PaperStatus.SUBMITTED:
        return (False, state)
    if not (1 <= tx.score <= 10):
        return (False, state)
    if not suite.sig_verify(tx.sender, tx_preimage(tx), tx.sig):
        return (False, state)
    assigned = bool(tx.reviewer_id)
    if assigned:
        # the assignment echo must match a sealed commitment
        digest = assignment_digest(tx.submit_hash, tx.reviewer_id, tx.nonce)
        if digest not in paper.assignment_digests:
            return (False, state)
        if (tx.submit_hash, tx.reviewer_id) in state.reviews:
            return (False, state)
        if state.user_pk.get(tx.reviewer_id) != tx.sender:
            return (False, state)
    record = ReviewRecord(
        submit_hash=tx.submit_hash,
        reviewer_id=tx.reviewer_id,
        nonce=tx.nonce,
        comment=tx.comment,
        score=tx.score,
        height=state.height,
        assigned=assigned,
    )
    post = state.copy()
    if assigned:
        post.reviews[(tx.submit_hash, tx.reviewer_id)] = record
    else:
        post.comments.append(record)
    return (True, post)


def _ver_open(tx: OpenTx, state: ChainState, env: LedgerEnv):
    paper = state.papers.get(tx.submit_hash)
    if paper is None or paper.status != PaperStatus.DISTRIBUTED:
        return (False, state)
    if state.height < paper.endtime:
        return (False, state)
    if env.validators and tx.sender not in env.validators:
        return (False, state)
    if tx.result not in (ACCEPT, REJECT):
        return (False, state)
    if not suite.sig_verify(tx.sender, tx_preimage(tx), tx.sig):
        return (False, state)
    for rid in tx.reviewer_ids:
        if (tx.submit_hash, rid) not in state.reviews:
            return (False, state)
    post = state.copy()
    post.papers[tx.submit_hash] = replace(paper, status=PaperStatus.DECIDED)
    post.published[tx.submit_hash] = OpenRecord(
        submit_hash=tx.submit_hash,
        user_id=tx.user_id,
        result=tx.result,
        reviewer_ids=tuple(tx.reviewer_ids),
        height=state.height,
    )
    # review and incentive fees are minted into the public account here
    mint = env.fees.review * len(tx.reviewer_ids)
    if tx.result == ACCEPT:
        mint += env.fees.incentive
    post.credit(env.acc_pub, mint)
    post.minted += mint
    return (True, post)


def _ver_transfer(tx: TransferTx, state: ChainState, env: LedgerEnv):
    if state.balance(tx.sender) < tx.amount or tx.amount < 0:
        return (False, state)
    preimage = tx_preimage(tx)
    if tx.sender == env.acc_pub:
        if tx.tsig is None or tx.sig is not None:
            return (False, state)  # public-account spends demand exactly a threshold sig
        try:
            agg = tsig.ThresholdSignature.from_bytes(tx.tsig)
        except Exception:
            return (False, state)
        if not tsig.ts_verify(env.tsig_pk, preimage, agg):
            return (False, state)
    else:
        if tx.sig is None or tx.tsig is not None:
            return (False, state)
        if not suite.sig_verify(tx.sender, preimage, tx.sig):
            return (False, state)
    if tx.receiver not in state.accounts:
        return (False, state)
    post = state.copy()
    post.debit(tx.sender, tx.amount)
    post.credit(tx.receiver, tx.amount)
    _apply_deposit_rules(tx, post, env)
    return (True, post)


def _apply_deposit_rules(tx: TransferTx, post: ChainState, env: LedgerEnv) -> None:
    fees = env.fees
    if (
        tx.receiver == env.acc_pub
        and tx.amount == fees.deposit
        and tx.user_id
        and post.user_pk.get(tx.user_id) == tx.sender
    ):
        acct = post.accounts[tx.sender]
        if acct.type == AccountType.AUTHOR and not acct.deposit_held:
            post.accounts[tx.sender] = replace(acct, deposit_held=True)
    if (
        tx.sender == env.acc_pub
        and tx.amount == fees.deposit
        and tx.user_id
        and post.user_pk.get(tx.user_id) == tx.receiver
    ):
        acct = post.accounts[tx.receiver]
        if acct.type == AccountType.AUTHOR and acct.deposit_held:
            post.accounts[tx.receiver] = replace(acct, deposit_held=False)


# ---------------------------------------------------------------------------
# blocks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Block:
    height: int
    parent: bytes                    # digest of the previous block
    proposer: int                    # validator index
    txs: Tuple[Transaction, ...]
    certificate: Tuple[Tuple[int, bytes], ...] = ()  # (validator idx, sig)

    def digest(self) -> bytes:
        """Block identity; excludes the certificate (per-replica evidence)."""
        enc = Encoder().u64(self.height).raw(self.parent).u16(self.proposer)
        enc.u32(len(self.txs))
        for tx in self.txs:
            enc.blob(canonical_encode(tx))
        return hashlib.sha256(enc.done()).digest()

    def to_bytes(self) -> bytes:
        enc = Encoder().u64(self.height).raw(self.parent).u16(self.proposer)
        enc.u32(len(self.txs))
        for tx in self.txs:
            enc.blob(canonical_encode(tx))
        enc.u16(len(self.certificate))
        for idx, sig in sorted(self.certificate):
            enc.u16(idx).blob(sig)
        return enc.done()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Block":
        dec = Decoder(data)
        height = dec.u64()
        parent = dec.raw(32)
        proposer = dec.u16()
        txs = tuple(canonical_decode(dec.blob()) for _ in range(dec.u32()))
        cert = tuple((dec.u16(), dec.blob()) for _ in range(dec.u16()))
        dec.finish()
        return cls(height, parent, proposer, txs, cert)


GENESIS_PARENT = b"\x00" * 32


def verify_certificate(block: Block, env: LedgerEnv) -> bool:
    """At least 2f+1 distinct validators signed the block digest."""
    digest = block.digest()
    seen = set()
    for idx, sig in block.certificate:
        if idx in seen or not (1 <= idx <= len(env.validators)):
            return False
        if not suite.sig_verify(env.validators[idx - 1], digest, sig):
            return False
        seen.add(idx)
    return len(seen) >= 2 * env.f + 1


def apply_block(state: ChainState, block: Block, env: LedgerEnv, check_cert: bool = True) -> ChainState:
    """Apply a certified block; any invalid transaction aborts the block."""
    if check_cert and not verify_certificate(block, env):
        raise InvalidBlockError(f"block {block.height} carries a bad certificate")
    post = state.copy()
    post.height = block.height
    for tx in block.txs:
        ok, post = ver_tx(tx, post, env)
        if not ok:
            raise InvalidBlockError(
                f"block {block.height} contains an invalid {type(tx).__name__}"
            )
    return post


# ---------------------------------------------------------------------------
# content-addressed manuscript store
# ---------------------------------------------------------------------------

class ContentStore:
    """Content-addressed blob store; optionally directory-backed."""

    def __init__(self, directory: "Path | str | None" = None):
        self._mem: Dict[bytes, bytes] = {}
        self._dir = Path(directory) if directory else None
        if self._dir:
            self._dir.mkdir(parents=True, exist_ok=True)

    def put(self, data: bytes) -> bytes:
        digest = hashlib.sha256(data).digest()
        self._mem[digest] = data
        if self._dir:
            (self._dir / digest.hex()).write_bytes(data)
        return digest

    def get(self, digest: bytes) -> Optional[bytes]:
        if digest in self._mem:
            return self._mem[digest]
        if self._dir:
            path = self._dir / digest.hex()
            if path.exists():
                data = path.read_bytes()
                self._mem[digest] = data
                return data
        return None
