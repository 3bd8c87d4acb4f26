"""End-to-end publication scenarios on the consensus engine.

A scenario wires client roles (authors, reviewers, readers) and validator
protocol duties (member-key delivery, paper distribution, opening, reward
payment) into the deterministic event loop.  Validators exchange key and
opening shares as application messages riding the simulated network, so a
corrupt-share Byzantine validator poisons exactly those flows and the
share-verification filters are what keep the protocol live.

The runner records a structured event log (JSON lines) and checks the
protocol invariants at the end: token conservation against the explicit
mint ledger, identical honest logs, opened identities matching the hidden
ground truth, payment completeness, and the pre-open secrecy byte scan.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from . import consensus, ledger, suite, tibgs, tsig, workflow
from .consensus import ConsensusEngine, CostModel, FaultPlan, NetworkModel
from .errors import ConfigError, InsufficientSharesError
from .ledger import (
    ACCEPT,
    Account,
    AccountType,
    Block,
    ChainState,
    ContentStore,
    DistributeTx,
    FeeSchedule,
    OpenTx,
    PaperStatus,
    SubmitTx,
    TransferTx,
    tx_hash,
    tx_preimage,
)
from .rng import SeededRng
from .workflow import DecisionRule, SystemKeys


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AuthorSpec:
    user_id: str
    balance: int = 200


@dataclass(frozen=True)
class ReviewerSpec:
    user_id: str
    field_name: str = "crypto"


@dataclass(frozen=True)
class PaperSpec:
    author: str
    field_name: str
    content: bytes
    scores: Tuple[int, ...]


@dataclass(frozen=True)
class ScenarioConfig:
    n: int
    f: int
    seed: int
    authors: Tuple[AuthorSpec, ...]
    reviewers: Tuple[ReviewerSpec, ...]
    papers: Tuple[PaperSpec, ...]
    readers: Tuple[str, ...] = ()
    reviewers_per_paper: int = 3
    review_blocks: int = 4          # endtime = distribute height + review_blocks
    grp_id: str = "openpub"
    fees: FeeSchedule = FeeSchedule()
    fault_plan: FaultPlan = FaultPlan()
    network: NetworkModel = NetworkModel()
    cost: CostModel = CostModel()
    block_interval_us: int = 500_000
    view_timeout_us: int = 3_000_000
    horizon_us: int = 180_000_000

    @property
    def params(self) -> Tuple[int, int]:
        return (2 * self.f + 1, 3 * self.f + 1)

    def validate(self) -> None:
        if self.n != 3 * self.f + 1:
            raise ConfigError(f"n={self.n} is not 3f+1 for f={self.f}")
        if self.seed is None:
            raise ConfigError("scenario seed is mandatory")
        for paper in self.papers:
            if paper.author not in {a.user_id for a in self.authors}:
                raise ConfigError(f"paper author {paper.author!r} not configured")
            if len(paper.scores) != self.reviewers_per_paper:
                raise ConfigError(
                    f"paper by {paper.author!r} configures {len(paper.scores)} scores, "
                    f"needs {self.reviewers_per_paper}"
                )

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "f": self.f,
                "seed": self.seed,
                "grp_id": self.grp_id,
                "fees": {
                    "deposit": self.fees.deposit,
                    "review": self.fees.review,
                    "incentive": self.fees.incentive,
                },
                "authors": [
                    {"user_id": a.user_id, "balance": a.balance} for a in self.authors
                ],
                "reviewers": [
                    {"user_id": r.user_id, "field": r.field_name} for r in self.reviewers
                ],
                "readers": list(self.readers),
                "papers": [
                    {
                        "author": p.author,
                        "field": p.field_name,
                        "content_hex": p.content.hex(),
                        "scores": list(p.scores),
                    }
                    for p in self.papers
                ],
                "reviewers_per_paper": self.reviewers_per_paper,
                "review_blocks": self.review_blocks,
                "byzantine": {str(k): v for k, v in self.fault_plan.byzantine.items()},
                "network": {
                    "base_latency_us": self.network.base_latency_us,
                    "jitter_us": self.network.jitter_us,
                    "drop_rate": self.network.drop_rate,
                },
                "block_interval_us": self.block_interval_us,
                "horizon_us": self.horizon_us,
            },
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        raw = json.loads(text)
        fees = raw.get("fees", {})
        net = raw.get("network", {})
        return cls(
            n=raw["n"],
            f=raw["f"],
            seed=raw["seed"],
            grp_id=raw.get("grp_id", "openpub"),
            fees=FeeSchedule(
                deposit=fees.get("deposit", 100),
                review=fees.get("review", 10),
                incentive=fees.get("incentive", 50),
            ),
            authors=tuple(
                AuthorSpec(a["user_id"], a.get("balance", 200))
                for a in raw.get("authors", [])
            ),
            reviewers=tuple(
                ReviewerSpec(r["user_id"], r.get("field", "crypto"))
                for r in raw.get("reviewers", [])
            ),
            readers=tuple(raw.get("readers", [])),
            papers=tuple(
                PaperSpec(
                    author=p["author"],
                    field_name=p.get("field", "crypto"),
                    content=bytes.fromhex(p["content_hex"]),
                    scores=tuple(p["scores"]),
                )
                for p in raw.get("papers", [])
            ),
            reviewers_per_paper=raw.get("reviewers_per_paper", 3),
            review_blocks=raw.get("review_blocks", 4),
            fault_plan=FaultPlan(
                byzantine={int(k): v for k, v in raw.get("byzantine", {}).items()}
            ),
            network=NetworkModel(
                base_latency_us=net.get("base_latency_us", 2_000),
                jitter_us=net.get("jitter_us", 500),
                drop_rate=net.get("drop_rate", 0.0),
            ),
            block_interval_us=raw.get("block_interval_us", 500_000),
            horizon_us=raw.get("horizon_us", 180_000_000),
        )


def demo_config(seed: int = 7) -> ScenarioConfig:
    """The bundled demo: n=4, two authors, three reviewers, two papers."""
    return ScenarioConfig(
        n=4,
        f=1,
        seed=seed,
        authors=(AuthorSpec("alice", 200), AuthorSpec("andre", 200)),
        reviewers=(
            ReviewerSpec("rita", "crypto"),
            ReviewerSpec("ravi", "crypto"),
            ReviewerSpec("rosa", "crypto"),
        ),
        readers=("rey",),
        papers=(
            PaperSpec("alice", "crypto", b"On threshold anonymity in reviews.", (7, 8, 6)),
            PaperSpec("andre", "crypto", b"A disputed conjecture, loosely argued.", (3, 4, 2)),
        ),
    )


# ---------------------------------------------------------------------------
# runtime roles
# ---------------------------------------------------------------------------

class ValidatorApp:
    """Protocol duties of one validator on top of the consensus core."""

    def __init__(self, runtime: "ScenarioRuntime", node: consensus.ValidatorNode):
        self.runtime = runtime
        self.node = node
        self.system = runtime.system
        self.sent_member_keys: Set[str] = set()
        self.my_distributions: Dict[bytes, SubmitTx] = {}   # submit_hash -> submit tx
        self.opening: Dict[bytes, Dict[int, tibgs.OpenShare]] = {}
        self.opened: Set[bytes] = set()
        self.open_submitted: Set[bytes] = set()
        self.rewarding: Dict[bytes, Dict[bytes, Dict[int, tsig.SigShare]]] = {}
        self.rewarded: Set[bytes] = set()
        self.reward_payments: Dict[bytes, List[TransferTx]] = {}

    @property
    def corrupting(self) -> bool:
        return self.node.behavior == consensus.CORRUPT_SHARE

    def wants_progress(self, node: consensus.ValidatorNode) -> bool:
        """Keep heights advancing while any review deadline is pending."""
        return any(
            p.status == PaperStatus.DISTRIBUTED for p in node.state.papers.values()
        )

    # -- share provisioning -----------------------------------------------------
    def _member_share(self, user_id: str) -> tibgs.UserKeyShare:
        share = tibgs.ext_share(user_id, self.node.identity.group_share)
        if self.corrupting:
            share = tibgs.UserKeyShare(
                share.grp_id, share.user_id, share.manager,
                share.fragment + share.fragment,
            )
        return share

    def _open_share(self, sig: tibgs.GroupSignature, message: bytes) -> tibgs.OpenShare:
        share = tibgs.open_part(
            self.node.identity.group_share, sig, message,
            self.system.master, verify_sigma=False,
        )
        if self.corrupting:
            share = tibgs.OpenShare(share.manager, share.value + share.value)
        return share

    def _tsig_share(self, preimage: bytes) -> tsig.SigShare:
        share = tsig.thres_sign(preimage, self.node.identity.tsig_share, self.node.index)
        if self.corrupting:
            share = tsig.SigShare(share.signer, share.partial + share.partial)
        return share

    # -- commit reactions ------------------------------------------------------------
    def on_commit(self, node: consensus.ValidatorNode, block: Block) -> None:
        for tx in block.txs:
            if isinstance(tx, TransferTx):
                self._maybe_deliver_member_key(tx)
            elif isinstance(tx, SubmitTx) and block.proposer == node.index:
                self._distribute(tx, block)
            elif isinstance(tx, OpenTx) and tx.sender == node.identity.keypair.pk:
                self._begin_reward(tx)
        self._check_deadlines(block.height)

    def _maybe_deliver_member_key(self, tx: TransferTx) -> None:
        # an author's deposit confirmed: every validator sends its fragment
        if tx.receiver != self.system.acc_pub or not tx.user_id:
            return
        acct = self.node.state.accounts.get(tx.sender)
        if acct is None or acct.type != AccountType.AUTHOR or not acct.deposit_held:
            return
        if tx.user_id in self.sent_member_keys or acct.user_id != tx.user_id:
            return
        self.sent_member_keys.add(tx.user_id)
        if self.node.behavior == consensus.SILENT:
            return
        self.runtime.to_client(tx.user_id, ("usk-share", self._member_share(tx.user_id)))

    def _distribute(self, tx: SubmitTx, block: Block) -> None:
        submit_hash = tx_hash(tx)
        if submit_hash in self.my_distributions:
            return
        self.my_distributions[submit_hash] = tx
        if self.node.behavior == consensus.SILENT:
            return
        try:
            result = workflow.distribution(
                submit_hash,
                tx.field_name,
                self.node.state,
                count=self.runtime.config.reviewers_per_paper,
                endtime=block.height + self.runtime.config.review_blocks,
                validator=self.node.identity,
                acc_pub=self.system.acc_pub,
                rng=self.runtime.rng.fork(f"distribute/{submit_hash.hex()[:16]}"),
            )
        except Exception as exc:
            self.runtime.log("distribution-failed", error=type(exc).__name__)
            return
        self.runtime.engine.submit_tx(result.tx)
        self.runtime.log(
            "distribution",
            validator=self.node.index,
            submit_hash=submit_hash.hex(),
            endtime=result.tx.endtime,
        )

    def _check_deadlines(self, height: int) -> None:
        for submit_hash, submit_tx in self.my_distributions.items():
            if submit_hash in self.opened:
                continue
            paper = self.node.state.papers.get(submit_hash)
            if paper is None or paper.status != PaperStatus.DISTRIBUTED:
                continue
            if height < paper.endtime:
                continue
            if paper.distributor != self.node.identity.keypair.pk:
                continue
            self.opened.add(submit_hash)
            sig = tibgs.GroupSignature.from_bytes(submit_tx.gsig)
            message = tx_preimage(submit_tx)
            self.opening[submit_hash] = {
                self.node.index: self._open_share(sig, message)
            }
            for dst in range(1, self.node.n + 1):
                if dst != self.node.index:
                    self.node.send(dst, ("ok-request", submit_hash, submit_tx))
            self._try_open(submit_hash)

    # -- app messages ---------------------------------------------------------------------
    def on_app_message(self, node: consensus.ValidatorNode, src: int, msg: tuple) -> None:
        kind = msg[0]
        if kind == "ok-request":
            _, submit_hash, submit_tx = msg
            sig = tibgs.GroupSignature.from_bytes(submit_tx.gsig)
            share = self._open_share(sig, tx_preimage(submit_tx))
            node.send(src, ("ok-response", submit_hash, share))
        elif kind == "ok-response":
            _, submit_hash, share = msg
            if submit_hash in self.opening:
                self.opening[submit_hash][share.manager] = share
                self._try_open(submit_hash)
        elif kind == "tsig-request":
            _, submit_hash, preimage = msg
            node.send(src, ("tsig-response", submit_hash, preimage,
                            self._tsig_share(preimage)))
        elif kind == "tsig-response":
            _, submit_hash, preimage, share = msg
            slots = self.rewarding.get(submit_hash)
            if slots is not None and preimage in slots:
                slots[preimage][share.signer] = share
                self._try_pay(submit_hash)

    def _try_open(self, submit_hash: bytes) -> None:
        if submit_hash in self.open_submitted:
            return
        paper = self.node.state.papers.get(submit_hash)
        if paper is None or paper.status != PaperStatus.DISTRIBUTED:
            return
        shares = list(self.opening.get(submit_hash, {}).values())
        k, _ = self.system.params
        if len(shares) < k:
            return
        submit_tx = self.my_distributions[submit_hash]
        try:
            open_tx = workflow.open_paper(
                submit_tx,
                self.node.state,
                self.node.identity,
                lambda sig, msg: shares,
                self.system,
                self.runtime.rule,
            )
        except InsufficientSharesError:
            return  # corrupt contributions filtered below threshold; wait for more
        self.open_submitted.add(submit_hash)
        self.runtime.engine.submit_tx(open_tx)
        self.runtime.log(
            "open",
            validator=self.node.index,
            submit_hash=submit_hash.hex(),
            author=open_tx.user_id,
            result="accept" if open_tx.result == ACCEPT else "reject",
            reviewers=list(open_tx.reviewer_ids),
        )

    # -- reward -------------------------------------------------------------------------------
    def _begin_reward(self, open_tx: OpenTx) -> None:
        submit_hash = open_tx.submit_hash
        if submit_hash in self.rewarding or submit_hash in self.rewarded:
            return
        state = self.node.state
        payments = workflow.reward_payments(open_tx, state, self.system)
        if not payments:
            self.rewarded.add(submit_hash)
            return
        slots: Dict[bytes, Dict[int, tsig.SigShare]] = {}
        self.reward_payments[submit_hash] = []
        for body in payments:
            preimage = tx_preimage(body)
            slots[preimage] = {self.node.index: self._tsig_share(preimage)}
            self.reward_payments[submit_hash].append(body)
        self.rewarding[submit_hash] = slots
        for dst in range(1, self.node.n + 1):
            if dst != self.node.index:
                for preimage in slots:
                    self.node.send(dst, ("tsig-request", submit_hash, preimage))
        self._try_pay(submit_hash)

    def _try_pay(self, submit_hash: bytes) -> None:
        slots = self.rewarding.get(submit_hash)
        if slots is None or submit_hash in self.rewarded:
            return
        k, _ = self.system.params
        bodies = self.reward_payments[submit_hash]
        ready: Dict[bytes, tsig.ThresholdSignature] = {}
        for body in bodies:
            preimage = tx_preimage(body)
            valid = [
                s
                for s in slots[preimage].values()
                if tsig.sig_share_ver(
                    self.system.threshold.public_key,
                    self.system.threshold.verify_keys[s.signer],
                    preimage,
                    s,
                )
            ]
            if len(valid) < k:
                return  # keep waiting for more responses
            ready[preimage] = tsig.sig_share_comb(valid, self.system.params)
        self.rewarded.add(submit_hash)
        for body in bodies:
            agg = ready[tx_preimage(body)]
            tx = TransferTx(body.sender, body.receiver, body.user_id, body.amount,
                            tsig=agg.to_bytes())
            self.runtime.engine.submit_tx(tx)
            self.runtime.log(
                "reward-transfer",
                submit_hash=submit_hash.hex(),
                user_id=body.user_id,
                amount=body.amount,
            )


class AuthorClient:
    def __init__(self, runtime: "ScenarioRuntime", spec: AuthorSpec):
        self.runtime = runtime
        self.user_id = spec.user_id
        self.keypair = suite.sig_keygen(runtime.rng.fork(f"author/{spec.user_id}"))
        self.shares: Dict[int, tibgs.UserKeyShare] = {}
        self.user_key: Optional[tibgs.UserGroupKey] = None
        self.pending_papers: List[PaperSpec] = []
        self.deposited = False

    def start(self) -> None:
        body = TransferTx(
            sender=self.keypair.pk,
            receiver=self.runtime.system.acc_pub,
            user_id=self.user_id,
            amount=self.runtime.config.fees.deposit,
        )
        tx = TransferTx(body.sender, body.receiver, body.user_id, body.amount,
                        sig=suite.sig_sign(tx_preimage(body), self.keypair.sk))
        self.runtime.engine.submit_tx(tx)
        self.runtime.log("author-deposit", user_id=self.user_id)

    def on_message(self, msg: tuple) -> None:
        if msg[0] != "usk-share" or self.user_key is not None:
            return
        share: tibgs.UserKeyShare = msg[1]
        self.shares[share.manager] = share
        k, _ = self.runtime.system.params
        if len(self.shares) < k:
            return
        try:
            self.user_key = tibgs.reconst_key(
                self.user_id,
                sorted(self.shares.values(), key=lambda s: s.manager),
                self.runtime.system.gvks,
                self.runtime.system.params,
                self.runtime.system.master,
            )
        except Exception:
            return  # not enough valid fragments yet; wait for more
        self.runtime.log("member-key-ready", user_id=self.user_id,
                         fragments=len(self.shares))
        self._submit_pending()

    def queue_paper(self, paper: PaperSpec) -> None:
        self.pending_papers.append(paper)
        self._submit_pending()

    def _submit_pending(self) -> None:
        if self.user_key is None:
            return
        while self.pending_papers:
            paper = self.pending_papers.pop(0)
            tx = workflow.submission(
                paper.field_name, paper.content, self.user_key,
                self.runtime.store, self.runtime.system.acc_pub,
                self.runtime.rng.fork(f"submit/{self.user_id}/{len(self.runtime.truth)}"),
            )
            self.runtime.truth[tx_hash(tx)] = self.user_id
            self.runtime.score_plans[tx_hash(tx)] = list(paper.scores)
            self.runtime.engine.submit_tx(tx)
            self.runtime.log("submission", submit_hash=tx_hash(tx).hex(),
                             field=paper.field_name)


class ReviewerClient:
    def __init__(self, runtime: "ScenarioRuntime", spec: ReviewerSpec):
        self.runtime = runtime
        self.user_id = spec.user_id
        self.field_name = spec.field_name
        self.keypair = suite.sig_keygen(runtime.rng.fork(f"reviewer/{spec.user_id}"))
        self.reviewed: Set[bytes] = set()

    def on_block(self, block: Block, state: ChainState) -> None:
        for tx in block.txs:
            if not isinstance(tx, DistributeTx) or tx.submit_hash in self.reviewed:
                continue
            review_tx = workflow.review(
                self.keypair, tx, self.runtime.store, state,
                judge=lambda manuscript, h=tx.submit_hash: self.runtime.judge(h, self.user_id),
                acc_pub=self.runtime.system.acc_pub,
            )
            if review_tx is None:
                continue
            self.reviewed.add(tx.submit_hash)
            self.runtime.engine.submit_tx(review_tx)
            self.runtime.log("review", submit_hash=tx.submit_hash.hex(),
                             reviewer=self.user_id, score=review_tx.score)


class ReaderClient:
    def __init__(self, runtime: "ScenarioRuntime", user_id: str):
        self.runtime = runtime
        self.user_id = user_id
        self.keypair = suite.sig_keygen(runtime.rng.fork(f"reader/{user_id}"))
        self.commented: Set[bytes] = set()

    def on_block(self, block: Block, state: ChainState) -> None:
        for tx in block.txs:
            if isinstance(tx, DistributeTx) and tx.submit_hash not in self.commented:
                self.commented.add(tx.submit_hash)
                comment = workflow.reader_comment(
                    self.keypair, tx.submit_hash, "reader note", 10,
                    self.runtime.system.acc_pub,
                )
                self.runtime.engine.submit_tx(comment)
                self.runtime.log("reader-comment", submit_hash=tx.submit_hash.hex(),
                                 reader=self.user_id)


# ---------------------------------------------------------------------------
# runtime
# ---------------------------------------------------------------------------

@dataclass
class ScenarioResult:
    config: ScenarioConfig
    system: SystemKeys
    genesis: ChainState
    chain: List[Block]
    state: ChainState
    metrics: consensus.MetricsReport
    event_log: List[str]
    honest_logs: Dict[int, bytes]
    truth: Dict[bytes, str]
    clients: Dict[str, bytes]          # user id -> account pk
    store: ContentStore

    def event_log_bytes(self) -> bytes:
        return ("\n".join(self.event_log) + "\n").encode("utf-8")

    def chain_export(self) -> bytes:
        header = {
            "curve": "bn254",
            "grp_id": self.config.grp_id,
            "f": self.config.f,
            "mpk1": self.system.master.mpk1.to_bytes().hex(),
            "mpk2": self.system.master.mpk2.to_bytes().hex(),
            "acc_pub": self.system.acc_pub.hex(),
            "tsig_pk": self.system.threshold.public_key.to_bytes().hex(),
            "validators": [
                self.system.validators[i].keypair.pk.hex()
                for i in sorted(self.system.validators)
            ],
            "fees": {
                "deposit": self.config.fees.deposit,
                "review": self.config.fees.review,
                "incentive": self.config.fees.incentive,
            },
            "genesis": [
                {
                    "pk": acct.pk.hex(),
                    "balance": acct.balance,
                    "type": int(acct.type),
                    "user_id": acct.user_id,
                    "field": acct.research_field,
                }
                for _, acct in sorted(self.genesis.accounts.items())
            ],
        }
        lines = [json.dumps(header, sort_keys=True)]
        for block in self.chain:
            lines.append(json.dumps(
                {"height": block.height, "block": block.to_bytes().hex()},
                sort_keys=True,
            ))
        return ("\n".join(lines) + "\n").encode("utf-8")


class ScenarioRuntime:
    def __init__(self, config: ScenarioConfig):
        config.validate()
        consensus.check_pbft_shape(config.params)
        self.config = config
        self.rng = SeededRng(config.seed, b"scenario")
        self.rule = DecisionRule()
        self.store = ContentStore()
        self.truth: Dict[bytes, str] = {}
        self.score_plans: Dict[bytes, List[int]] = {}
        self._score_cursor: Dict[Tuple[bytes, str], int] = {}
        self.events: List[str] = []
        self.engine: Optional[ConsensusEngine] = None

        self.system = workflow.system_initialization(
            config.params, config.grp_id, self.rng.fork("init"), config.fees
        )

        self.authors = {a.user_id: AuthorClient(self, a) for a in config.authors}
        self.reviewers = {r.user_id: ReviewerClient(self, r) for r in config.reviewers}
        self.readers = {u: ReaderClient(self, u) for u in config.readers}

    # -- infrastructure ----------------------------------------------------------
    def log(self, event: str, **fields) -> None:
        entry = {"event": event, "t_us": self.engine.sim.now if self.engine else 0}
        entry.update(fields)
        self.events.append(json.dumps(entry, sort_keys=True))

    def to_client(self, user_id: str, msg: tuple) -> None:
        client = self.authors.get(user_id)
        if client is None:
            return
        latency = self.config.network.base_latency_us
        self.engine.sim.after(latency, lambda: client.on_message(msg))

    def judge(self, submit_hash: bytes, reviewer_id: str) -> Tuple[str, int]:
        plan = self.score_plans.get(submit_hash, [5])
        cursor = self._score_cursor.setdefault((submit_hash, "next"), 0)
        score = plan[min(cursor, len(plan) - 1)]
        self._score_cursor[(submit_hash, "next")] = cursor + 1
        return (f"score {score} by {reviewer_id}", score)

    # -- genesis ----------------------------------------------------------------------
    def build_genesis(self) -> ChainState:
        accounts = [
            Account(pk=self.system.acc_pub, balance=0, type=AccountType.PUBLIC,
                    user_id="treasury"),
        ]
        for i in sorted(self.system.validators):
            accounts.append(Account(
                pk=self.system.validators[i].keypair.pk, balance=0,
                type=AccountType.VALIDATOR, user_id=f"validator-{i}",
            ))
        for spec in self.config.authors:
            accounts.append(Account(
                pk=self.authors[spec.user_id].keypair.pk, balance=spec.balance,
                type=AccountType.AUTHOR, user_id=spec.user_id,
            ))
        for spec in self.config.reviewers:
            accounts.append(Account(
                pk=self.reviewers[spec.user_id].keypair.pk, balance=0,
                type=AccountType.REVIEWER, user_id=spec.user_id,
                research_field=spec.field_name,
            ))
        for uid in self.config.readers:
            accounts.append(Account(
                pk=self.readers[uid].keypair.pk, balance=0,
                type=AccountType.READER, user_id=uid,
            ))
        return ledger.genesis_state(accounts)

    # -- run ------------------------------------------------------------------------------
    def run(self) -> ScenarioResult:
        genesis = self.build_genesis()
        self.engine = ConsensusEngine(
            system=self.system,
            genesis=genesis,
            network=self.config.network,
            faults=self.config.fault_plan,
            rng=self.rng.fork("engine"),
            horizon_us=self.config.horizon_us,
            block_interval_us=self.config.block_interval_us,
            view_timeout_us=self.config.view_timeout_us,
            cost=self.config.cost,
            app_factory=lambda node: ValidatorApp(self, node),
        )
        # clients observe the reference validator's commits
        reference_app = self.engine.nodes[self.engine.reference].app
        original_on_commit = reference_app.on_commit

        def on_commit_with_clients(node, block):
            original_on_commit(node, block)
            for uid in sorted(self.reviewers):
                self.reviewers[uid].on_block(block, node.state)
            for uid in sorted(self.readers):
                self.readers[uid].on_block(block, node.state)
            for tx in block.txs:
                if isinstance(tx, OpenTx):
                    self.log("published", submit_hash=tx.submit_hash.hex(),
                             author=tx.user_id,
                             result="accept" if tx.result == ACCEPT else "reject")

        reference_app.on_commit = on_commit_with_clients

        self.log("genesis", n=self.config.n, f=self.config.f,
                 params=list(self.config.params), seed=self.config.seed)
        for uid in sorted(self.authors):
            self.authors[uid].start()
        for paper in self.config.papers:
            self.authors[paper.author].queue_paper(paper)

        metrics = self.engine.run()
        reference = self.engine.nodes[self.engine.reference]
        clients = {uid: c.keypair.pk for uid, c in self.authors.items()}
        clients.update({uid: c.keypair.pk for uid, c in self.reviewers.items()})
        clients.update({uid: c.keypair.pk for uid, c in self.readers.items()})
        return ScenarioResult(
            config=self.config,
            system=self.system,
            genesis=genesis,
            chain=list(reference.chain),
            state=reference.state,
            metrics=metrics,
            event_log=list(self.events),
            honest_logs=self.engine.honest_logs(),
            truth=dict(self.truth),
            clients=clients,
            store=self.store,
        )


def run_scenario(config: ScenarioConfig) -> ScenarioResult:
    return ScenarioRuntime(config).run()


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

def check_invariants(result: ScenarioResult) -> List[str]:
    """Return the list of violated invariants (empty means all held)."""
    violations: List[str] = []
    cfg = result.config
    state = result.state
    genesis_total = result.genesis.total_tokens()

    if state.total_tokens() != genesis_total + state.minted:
        violations.append(
            f"token-conservation: total {state.total_tokens()} != "
            f"genesis {genesis_total} + minted {state.minted}"
        )

    if len(set(result.honest_logs.values())) != 1:
        violations.append("honest-log-divergence")

    if len(result.state.published) != len(cfg.papers):
        violations.append(
            f"papers-published: {len(result.state.published)} of {len(cfg.papers)}"
        )

    for submit_hash, record in state.published.items():
        expected = result.truth.get(submit_hash)
        if record.user_id != expected:
            violations.append(
                f"opened-identity-mismatch: {record.user_id!r} != {expected!r}"
            )

    # payment completeness
    review_counts: Dict[str, int] = {}
    accepted_authors: Set[str] = set()
    for record in state.published.values():
        for rid in record.reviewer_ids:
            review_counts[rid] = review_counts.get(rid, 0) + 1
        if record.result == ACCEPT:
            accepted_authors.add(record.user_id)
    for spec in cfg.reviewers:
        pk = result.clients[spec.user_id]
        expected = cfg.fees.review * review_counts.get(spec.user_id, 0)
        if state.balance(pk) != expected:
            violations.append(
                f"reviewer-payment: {spec.user_id} holds {state.balance(pk)}, "
                f"expected {expected}"
            )
    for spec in cfg.authors:
        pk = result.clients[spec.user_id]
        expected = spec.balance + (
            cfg.fees.incentive if spec.user_id in accepted_authors else 0
        )
        if state.balance(pk) != expected:
            violations.append(
                f"author-balance: {spec.user_id} holds {state.balance(pk)}, "
                f"expected {expected} (deposit should be refunded)"
            )
        if state.accounts[pk].deposit_held:
            violations.append(f"deposit-not-refunded: {spec.user_id}")

    violations.extend(pre_open_secrecy_scan(result))
    return violations


def pre_open_secrecy_scan(result: ScenarioResult) -> List[str]:
    """Byte-scan the pre-open transaction trail of every paper.

    For each paper, every transaction committed before its open that
    references the submission must contain neither the author's user id
    (as UTF-8) nor the author's account key bytes.
    """
    violations: List[str] = []
    open_heights = {h: rec.height for h, rec in result.state.published.items()}
    for submit_hash, author in result.truth.items():
        author_pk = result.clients[author]
        needles = (author.encode("utf-8"), author_pk)
        deadline = open_heights.get(submit_hash)
        for block in result.chain:
            if deadline is not None and block.height > deadline:
                break
            for tx in block.txs:
                if isinstance(tx, OpenTx):
                    continue  # the open itself publishes the identity
                related = (
                    (isinstance(tx, SubmitTx) and tx_hash(tx) == submit_hash)
                    or (hasattr(tx, "submit_hash") and getattr(tx, "submit_hash") == submit_hash)
                )
                if not related:
                    continue
                blob = ledger.canonical_encode(tx)
                for needle in needles:
                    if needle and needle in blob:
                        violations.append(
                            f"pre-open-leak: {author} bytes inside "
                            f"{type(tx).__name__} for {submit_hash.hex()[:16]}"
                        )
    return violations
