"""Deterministic discrete-event simulation of PBFT-style consensus.

A single-threaded event loop drives n validator state machines through the
three phases (pre-prepare, prepare, commit) over a configurable network
(per-link latency jitter, drops, partitions) with optional Byzantine
behaviors.  Everything is reproducible: randomness comes from labeled forks
of one seed, time is integer microseconds, and ties break on a global event
sequence number.

Consensus-time metrics are simulated: validators charge modeled processing
costs (per message, per transaction verification by signature class)
against a busy-clock, so block consensus time grows with validator count
and with the verification weight of the transaction mix while remaining
bit-reproducible across runs.  Wall-clock benchmarking of the cryptography
itself lives in the CLI bench command, not here.

The committed-log identity of a block is its digest, which excludes the
commit certificate: certificates are per-replica evidence and may
legitimately differ between honest validators that heard different commit
subsets.  Replicas equivocation-lock on the first valid proposal per
(view, height); conflicting proposals stall the round until a view change
rotates the leader.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Set, Tuple

from . import ledger, suite, tibgs, tsig, workflow
from .errors import ConfigError, InvalidBlockError
from .ledger import Block, ChainState, LedgerEnv, Transaction, TxKind, tx_hash
from .rng import SeededRng

SILENT = "silent"
EQUIVOCATE = "equivocate"
CORRUPT_SHARE = "corrupt-share"
DELAY = "delay"
BEHAVIORS = (SILENT, EQUIVOCATE, CORRUPT_SHARE, DELAY)

_CONSENSUS_KINDS = ("pre-prepare", "prepare", "commit")


@dataclass(frozen=True)
class NetworkModel:
    base_latency_us: int = 2_000
    jitter_us: int = 500
    drop_rate: float = 0.0
    # (start_us, end_us, isolated validator indices): traffic between the
    # isolated set and the rest is dropped inside the window
    partitions: Tuple[Tuple[int, int, Tuple[int, ...]], ...] = ()


@dataclass(frozen=True)
class CostModel:
    """Simulated processing costs in microseconds."""

    per_message_us: int = 50
    base_block_us: int = 1_000
    verify_sig_us: int = 200
    verify_tsig_us: int = 700
    verify_gsig_us: int = 20_100

    def tx_cost(self, tx: Transaction) -> int:
        if tx.kind == TxKind.SUBMIT:
            return self.verify_gsig_us
        if tx.kind == TxKind.TRANSFER and getattr(tx, "tsig", None) is not None:
            return self.verify_tsig_us
        return self.verify_sig_us

    def block_cost(self, txs: Sequence[Transaction]) -> int:
        return self.base_block_us + sum(self.tx_cost(tx) for tx in txs)


@dataclass(frozen=True)
class FaultPlan:
    byzantine: Mapping[int, str] = field(default_factory=dict)
    delay_us: int = 150_000

    def check(self, n: int, f: int) -> None:
        if len(self.byzantine) > f:
            raise ConfigError(
                f"fault plan names {len(self.byzantine)} byzantine validators, "
                f"bound is f={f}"
            )
        for idx, behavior in self.byzantine.items():
            if behavior not in BEHAVIORS:
                raise ConfigError(f"unknown byzantine behavior {behavior!r}")
            if not (1 <= idx <= n):
                raise ConfigError(f"byzantine index {idx} out of range")


def check_pbft_shape(params: Tuple[int, int]) -> int:
    """Require n = 3f+1 and k = 2f+1; return f."""
    k, n = params
    if n < 1 or (n - 1) % 3 != 0:
        raise ConfigError(f"validator count {n} is not 3f+1")
    f = (n - 1) // 3
    if k != 2 * f + 1:
        raise ConfigError(f"threshold {k} is not 2f+1 for n={n} (expected {2 * f + 1})")
    return f


def tx_class(tx: Transaction) -> str:
    if tx.kind == TxKind.SUBMIT:
        return "gsig"
    if tx.kind == TxKind.TRANSFER and getattr(tx, "tsig", None) is not None:
        return "tsig"
    return "sig"


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

@dataclass
class BlockMetric:
    height: int
    proposer: int
    size_bytes: int
    tx_count: int
    consensus_time_us: int
    class_counts: Dict[str, int]


@dataclass
class MetricsReport:
    duration_us: int = 0
    blocks: List[BlockMetric] = field(default_factory=list)
    tx_issue_us: Dict[bytes, int] = field(default_factory=dict)
    tx_commit_us: Dict[bytes, int] = field(default_factory=dict)
    tx_classes: Dict[bytes, str] = field(default_factory=dict)

    def latencies_us(self, cls: "str | None" = None) -> List[int]:
        out = []
        for h, commit in self.tx_commit_us.items():
            if h in self.tx_issue_us and (cls is None or self.tx_classes.get(h) == cls):
                out.append(commit - self.tx_issue_us[h])
        return out

    def committed_count(self, cls: "str | None" = None) -> int:
        return sum(
            1 for h in self.tx_commit_us if cls is None or self.tx_classes.get(h) == cls
        )

    def tps(self, cls: "str | None" = None) -> float:
        if self.duration_us <= 0:
            return 0.0
        return self.committed_count(cls) / (self.duration_us / 1_000_000)

    def mean_block_bytes(self) -> float:
        if not self.blocks:
            return 0.0
        return sum(b.size_bytes for b in self.blocks) / len(self.blocks)

    def mean_consensus_time_us(self) -> float:
        if not self.blocks:
            return 0.0
        return sum(b.consensus_time_us for b in self.blocks) / len(self.blocks)

    def to_dict(self) -> dict:
        return {
            "duration_us": self.duration_us,
            "committed_txs": self.committed_count(),
            "tps": self.tps(),
            "tps_by_class": {c: self.tps(c) for c in ("sig", "tsig", "gsig")},
            "mean_block_bytes": self.mean_block_bytes(),
            "mean_consensus_time_us": self.mean_consensus_time_us(),
            "mean_latency_us_by_class": {
                c: (sum(v) / len(v) if (v := self.latencies_us(c)) else 0.0)
                for c in ("sig", "tsig", "gsig")
            },
            "blocks": [
                {
                    "height": b.height,
                    "proposer": b.proposer,
                    "size_bytes": b.size_bytes,
                    "tx_count": b.tx_count,
                    "consensus_time_us": b.consensus_time_us,
                    "class_counts": b.class_counts,
                }
                for b in self.blocks
            ],
        }

    def to_csv(self) -> str:
        lines = ["height,proposer,size_bytes,tx_count,consensus_time_us,sig,tsig,gsig"]
        for b in self.blocks:
            lines.append(
                f"{b.height},{b.proposer},{b.size_bytes},{b.tx_count},"
                f"{b.consensus_time_us},{b.class_counts.get('sig', 0)},"
                f"{b.class_counts.get('tsig', 0)},{b.class_counts.get('gsig', 0)}"
            )
        return "\n".join(lines) + "\n"


@dataclass
class RunTimeline:
    """Raw timing record of one run (reference validator's view)."""

    tx_commit_us: Dict[bytes, int] = field(default_factory=dict)
    block_commit_us: Dict[int, int] = field(default_factory=dict)
    proposal_us: Dict[int, int] = field(default_factory=dict)


def measure(
    chain: Sequence[Block],
    tx_issue_us: Mapping[bytes, int],
    timeline: RunTimeline,
) -> MetricsReport:
    """Derive the metrics report from a committed chain and its timeline.

    Block sizes and class mixes come from the chain itself; consensus times
    span from first proposal to reference commit; latency pairs issue times
    with commit times.
    """
    report = MetricsReport()
    report.tx_issue_us = dict(tx_issue_us)
    for block in chain:
        commit_at = timeline.block_commit_us.get(block.height, 0)
        classes: Dict[str, int] = {}
        for tx in block.txs:
            cls = tx_class(tx)
            classes[cls] = classes.get(cls, 0) + 1
            h = tx_hash(tx)
            report.tx_classes[h] = cls
            report.tx_commit_us[h] = timeline.tx_commit_us.get(h, commit_at)
        started = timeline.proposal_us.get(block.height, commit_at)
        report.blocks.append(
            BlockMetric(
                height=block.height,
                proposer=block.proposer,
                size_bytes=len(block.to_bytes()),
                tx_count=len(block.txs),
                consensus_time_us=commit_at - started,
                class_counts=classes,
            )
        )
    report.duration_us = max(timeline.block_commit_us.values(), default=0)
    return report


# ---------------------------------------------------------------------------
# event loop
# ---------------------------------------------------------------------------

class Simulation:
    """Priority-queue event loop with deterministic tie-breaking."""

    def __init__(self, horizon_us: int):
        self.now = 0
        self.horizon_us = horizon_us
        self._queue: List[Tuple[int, int, Callable[[], None]]] = []
        self._seq = 0

    def at(self, time_us: int, fn: Callable[[], None]) -> None:
        heapq.heappush(self._queue, (max(time_us, self.now), self._seq, fn))
        self._seq += 1

    def after(self, delay_us: int, fn: Callable[[], None]) -> None:
        self.at(self.now + delay_us, fn)

    def run(self) -> None:
        while self._queue:
            time_us, _, fn = heapq.heappop(self._queue)
            if time_us > self.horizon_us:
                break
            self.now = time_us
            fn()


# ---------------------------------------------------------------------------
# validator node
# ---------------------------------------------------------------------------

class ValidatorNode:
    """One PBFT replica; Byzantine behavior wraps its sending side."""

    def __init__(
        self,
        sim: Simulation,
        index: int,
        identity: workflow.ValidatorIdentity,
        env: LedgerEnv,
        genesis: ChainState,
        n: int,
        f: int,
        cost: CostModel,
        behavior: Optional[str] = None,
        delay_us: int = 0,
        app=None,
    ):
        self.sim = sim
        self.index = index
        self.identity = identity
        self.env = env
        self.n = n
        self.f = f
        self.cost = cost
        self.behavior = behavior
        self.delay_us = delay_us
        self.app = app
        self.engine: "ConsensusEngine | None" = None

        self.view = 0
        self.chain: List[Block] = []
        self.state = genesis.copy()
        self.state.height = 0
        self.mempool: Dict[bytes, Transaction] = {}
        self.busy_until = 0

        # round state for the in-progress height
        self.candidates: Dict[bytes, Block] = {}
        self.prepared_lock: Dict[int, bytes] = {}      # view -> digest
        self.prepares: Dict[Tuple[int, bytes], Set[int]] = {}
        self.commits: Dict[Tuple[int, bytes], Dict[int, bytes]] = {}
        self.sent_commit: Set[Tuple[int, bytes]] = set()
        self.proposed: Set[Tuple[int, int]] = set()    # (view, height)
        self.fetching: Set[bytes] = set()
        self.future: List[Tuple[int, int, tuple]] = []  # (height, src, msg)
        self.view_votes: Dict[int, Set[int]] = {}
        self._timer_key: Optional[Tuple[int, int]] = None  # (view, height)
        self._sync_cursor = 0

    # -- helpers ------------------------------------------------------------
    @property
    def next_height(self) -> int:
        return len(self.chain) + 1

    def leader_of(self, view: int) -> int:
        return (view % self.n) + 1

    def quorum(self) -> int:
        return 2 * self.f + 1

    def log_bytes(self) -> bytes:
        """Committed-log identity: the digest chain (certificates excluded)."""
        return b"".join(b.digest() for b in self.chain)

    # -- sending (byzantine wrap) ---------------------------------------------
    def send(self, dst: int, msg: tuple) -> None:
        if self.behavior == SILENT:
            return
        delay = self.delay_us if self.behavior == DELAY else 0
        self.engine.transmit(self.index, dst, msg, extra_delay_us=delay)

    def broadcast(self, msg: tuple) -> None:
        for dst in range(1, self.n + 1):
            if dst != self.index:
                self.send(dst, msg)
        self.sim.after(0, lambda: self.on_message(self.index, msg))

    # -- receiving ---------------------------------------------------------------
    def receive(self, src: int, msg: tuple) -> None:
        kind = msg[0]
        if kind == "pre-prepare":
            cost = self.cost.block_cost(msg[2].txs)
        else:
            cost = self.cost.per_message_us
        start = max(self.sim.now, self.busy_until)
        self.busy_until = start + cost
        self.sim.at(self.busy_until, lambda: self.on_message(src, msg))

    def _msg_height(self, msg: tuple) -> Optional[int]:
        if msg[0] == "pre-prepare":
            return msg[2].height
        if msg[0] in ("prepare", "commit"):
            return msg[2]
        return None

    def on_message(self, src: int, msg: tuple) -> None:
        height = self._msg_height(msg)
        if height is not None:
            if height < self.next_height:
                return  # stale
            if height > self.next_height:
                self.future.append((height, src, msg))
                return
        kind = msg[0]
        if kind == "client-tx":
            self._on_client_tx(msg[1])
        elif kind == "pre-prepare":
            self._on_pre_prepare(src, msg[1], msg[2])
        elif kind == "prepare":
            self._on_prepare(src, msg[1], msg[3])
        elif kind == "commit":
            self._on_commit(src, msg[1], msg[3], msg[4])
        elif kind == "view-change":
            self._on_view_change(src, msg[1])
        elif kind == "block-fetch":
            self._on_block_fetch(src, msg[1])
        elif kind == "block-response":
            self._on_block_response(msg[1])
        elif kind == "chain-fetch":
            self._on_chain_fetch(src, msg[1])
        elif kind == "chain-block":
            self._on_chain_block(msg[1])
        elif self.app is not None:
            self.app.on_app_message(self, src, msg)

    # -- mempool / proposal ---------------------------------------------------------
    def _on_client_tx(self, tx: Transaction) -> None:
        h = tx_hash(tx)
        if h not in self.mempool and h not in self.engine.committed_hashes[self.index]:
            self.mempool[h] = tx

    def wants_progress(self) -> bool:
        """True while the application needs empty blocks to reach a deadline."""
        return self.app is not None and self.app.wants_progress(self)

    def maybe_propose(self, max_txs: int) -> None:
        if self.behavior == SILENT:
            return
        if self.leader_of(self.view) != self.index:
            return
        if not self.mempool and not self.wants_progress():
            return
        height = self.next_height
        if (self.view, height) in self.proposed:
            return
        txs = self._select_valid(max_txs)
        if not txs and not self.wants_progress():
            return
        self.proposed.add((self.view, height))
        self.engine.note_proposal(height)
        parent = self.chain[-1].digest() if self.chain else ledger.GENESIS_PARENT
        block = Block(height=height, parent=parent, proposer=self.index, txs=tuple(txs))
        if self.behavior == EQUIVOCATE:
            other = Block(
                height=height, parent=parent, proposer=self.index,
                txs=tuple(reversed(txs)) if len(txs) > 1 else (),
            )
            for dst in range(1, self.n + 1):
                if dst == self.index:
                    continue
                pick = block if dst % 2 == 0 else other
                self.engine.transmit(self.index, dst, ("pre-prepare", self.view, pick))
            return
        self.broadcast(("pre-prepare", self.view, block))

    def _select_valid(self, max_txs: int) -> List[Transaction]:
        txs: List[Transaction] = []
        trial = self.state.copy()
        trial.height = self.next_height
        for h, tx in list(self.mempool.items()):
            if len(txs) >= max_txs:
                break
            ok, trial_next = ledger.ver_tx(tx, trial, self.env)
            if ok:
                txs.append(tx)
                trial = trial_next
            # txs invalid against the current state stay pooled; protocol
            # messages often become valid later (deposits, deadlines)
        return txs

    # -- three phases ------------------------------------------------------------------
    def _on_pre_prepare(self, src: int, view: int, block: Block) -> None:
        if view != self.view or src != self.leader_of(view) or block.proposer != src:
            return
        digest = block.digest()
        if digest in self.candidates:
            return
        if not self._validate_block(block):
            return
        self.candidates[digest] = block
        self.ensure_timer()
        if view not in self.prepared_lock:
            # equivocation lock: first valid proposal per view wins our vote
            self.prepared_lock[view] = digest
            self.broadcast(("prepare", view, block.height, digest))
        self._try_finalize(view, digest)

    def _validate_block(self, block: Block) -> bool:
        parent = self.chain[-1].digest() if self.chain else ledger.GENESIS_PARENT
        if block.parent != parent:
            return False
        trial = self.state.copy()
        trial.height = block.height
        for tx in block.txs:
            ok, trial = ledger.ver_tx(tx, trial, self.env)
            if not ok:
                return False
        return True

    def _on_prepare(self, src: int, view: int, digest: bytes) -> None:
        self.prepares.setdefault((view, digest), set()).add(src)
        key = (view, digest)
        if key in self.sent_commit:
            return
        if self.prepared_lock.get(view) != digest:
            return
        if len(self.prepares[key]) >= self.quorum():
            self.sent_commit.add(key)
            sig = suite.sig_sign(digest, self.identity.keypair.sk)
            self.broadcast(("commit", view, self.next_height, digest, sig))

    def _on_commit(self, src: int, view: int, digest: bytes, sig: bytes) -> None:
        self.commits.setdefault((view, digest), {})[src] = sig
        self._try_finalize(view, digest)

    def _try_finalize(self, view: int, digest: bytes) -> None:
        sigs = self.commits.get((view, digest), {})
        if len(sigs) < self.quorum():
            return
        block = self.candidates.get(digest)
        if block is None:
            # committed digest we never saw (equivocation victim): fetch it
            if digest not in self.fetching:
                self.fetching.add(digest)
                self.send(sorted(sigs)[0], ("block-fetch", digest))
            return
        cert = tuple(sorted(sigs.items())[: self.quorum()])
        certified = Block(block.height, block.parent, block.proposer, block.txs, cert)
        try:
            post = ledger.apply_block(self.state, certified, self.env, check_cert=True)
        except InvalidBlockError:
            return
        self.chain.append(certified)
        self.state = post
        for tx in certified.txs:
            self.mempool.pop(tx_hash(tx), None)
        self._round_cleanup()
        self.engine.note_commit(self.index, certified)
        if self.app is not None:
            self.app.on_commit(self, certified)
        self._drain_future()

    def _round_cleanup(self) -> None:
        self.candidates.clear()
        self.prepares.clear()
        self.commits.clear()
        self.sent_commit.clear()
        self.prepared_lock.clear()
        self.fetching.clear()
        self._timer_key = None

    def _drain_future(self) -> None:
        ready = [(src, msg) for h, src, msg in self.future if h == self.next_height]
        self.future = [e for e in self.future if e[0] > self.next_height]
        for src, msg in ready:
            self.sim.after(0, lambda s=src, m=msg: self.on_message(s, m))

    # -- block fetch (equivocation recovery) ------------------------------------------
    def _on_block_fetch(self, src: int, digest: bytes) -> None:
        block = self.candidates.get(digest)
        if block is None:
            block = next((b for b in self.chain if b.digest() == digest), None)
        if block is not None:
            self.send(src, ("block-response",
                            Block(block.height, block.parent, block.proposer, block.txs)))

    def _on_block_response(self, block: Block) -> None:
        if block.height != self.next_height:
            return
        digest = block.digest()
        self.fetching.discard(digest)
        if digest not in self.candidates and self._validate_block(block):
            self.candidates[digest] = block
            for view, d in list(self.commits):
                if d == digest:
                    self._try_finalize(view, digest)

    # -- certificate-based catch-up (partition healing) -----------------------------
    def maybe_sync(self) -> None:
        """Ask a rotating peer for our next height; certificates prove it."""
        if self.behavior == SILENT:
            return
        peer = (self.index + self._sync_cursor) % self.n + 1
        self._sync_cursor += 1
        if peer != self.index:
            self.send(peer, ("chain-fetch", self.next_height))

    def _on_chain_fetch(self, src: int, height: int) -> None:
        if 1 <= height <= len(self.chain):
            self.send(src, ("chain-block", self.chain[height - 1]))

    def _on_chain_block(self, block: Block) -> None:
        if block.height != self.next_height or not block.certificate:
            return
        parent = self.chain[-1].digest() if self.chain else ledger.GENESIS_PARENT
        if block.parent != parent:
            return
        try:
            post = ledger.apply_block(self.state, block, self.env, check_cert=True)
        except InvalidBlockError:
            return
        self.chain.append(block)
        self.state = post
        for tx in block.txs:
            self.mempool.pop(tx_hash(tx), None)
        self._round_cleanup()
        self.engine.note_commit(self.index, block)
        if self.app is not None:
            self.app.on_commit(self, block)
        self._drain_future()

    # -- view changes --------------------------------------------------------------------
    def ensure_timer(self) -> None:
        if self.behavior == SILENT:
            return
        key = (self.view, self.next_height)
        if self._timer_key == key:
            return
        self._timer_key = key
        self.sim.after(self.engine.view_timeout_us, lambda: self._timer_fired(key))

    def _timer_fired(self, key: Tuple[int, int]) -> None:
        if self._timer_key != key:
            return
        new_view = self.view + 1
        self.view_votes.setdefault(new_view, set()).add(self.index)
        self._timer_key = None
        self.broadcast(("view-change", new_view))

    def _on_view_change(self, src: int, new_view: int) -> None:
        if new_view <= self.view:
            return
        votes = self.view_votes.setdefault(new_view, set())
        votes.add(src)
        if len(votes) >= self.quorum():
            self.view = new_view
            self.candidates.clear()
            self.prepares.clear()
            self.commits.clear()
            self.sent_commit.clear()
            self.prepared_lock.pop(new_view, None)
            self._timer_key = None
            self.ensure_timer()


# ---------------------------------------------------------------------------
# engine
# ---------------------------------------------------------------------------

class ConsensusEngine:
    """Wires validators, network, fault plan and metrics together."""

    def __init__(
        self,
        system: workflow.SystemKeys,
        genesis: ChainState,
        network: NetworkModel,
        faults: FaultPlan,
        rng: SeededRng,
        horizon_us: int = 120_000_000,
        block_interval_us: int = 1_000_000,
        view_timeout_us: int = 3_000_000,
        max_txs_per_block: int = 100,
        cost: "CostModel | None" = None,
        app_factory=None,
    ):
        k, n = system.params
        f = check_pbft_shape((k, n))
        faults.check(n, f)
        self.system = system
        self.n = n
        self.f = f
        self.network = network
        self.faults = faults
        self.rng = rng
        self.sim = Simulation(horizon_us)
        self.block_interval_us = block_interval_us
        self.view_timeout_us = view_timeout_us
        self.max_txs_per_block = max_txs_per_block
        self.cost = cost or CostModel()
        self.env = system.env(f=f)

        self.committed_hashes: Dict[int, Set[bytes]] = {i: set() for i in range(1, n + 1)}
        self.timeline = RunTimeline()
        self.tx_issue_us: Dict[bytes, int] = {}
        self.metrics = MetricsReport()
        self._link_rng: Dict[Tuple[int, int], SeededRng] = {}
        self._outstanding: Set[bytes] = set()
        self._tick_scheduled = False

        self.nodes: Dict[int, ValidatorNode] = {}
        for i in range(1, n + 1):
            node = ValidatorNode(
                sim=self.sim,
                index=i,
                identity=system.validators[i],
                env=self.env,
                genesis=genesis,
                n=n,
                f=f,
                cost=self.cost,
                behavior=faults.byzantine.get(i),
                delay_us=faults.delay_us,
                app=None,
            )
            node.engine = self
            if app_factory is not None:
                node.app = app_factory(node)
            self.nodes[i] = node

        self.honest = [i for i in range(1, n + 1) if i not in faults.byzantine]
        self.reference = min(self.honest)

    # -- network -----------------------------------------------------------------
    def _link(self, src: int, dst: int) -> SeededRng:
        key = (src, dst)
        if key not in self._link_rng:
            self._link_rng[key] = self.rng.fork(f"link/{src}/{dst}")
        return self._link_rng[key]

    def _partitioned(self, src: int, dst: int) -> bool:
        for start, end, isolated in self.network.partitions:
            if start <= self.sim.now < end:
                iso = set(isolated)
                if (src in iso) != (dst in iso):
                    return True
        return False

    def transmit(self, src: int, dst: int, msg: tuple, extra_delay_us: int = 0) -> None:
        if self._partitioned(src, dst):
            return
        link = self._link(src, dst)
        if self.network.drop_rate > 0:
            if link.randbelow(1_000_000) < int(self.network.drop_rate * 1_000_000):
                return
        jitter = link.randbelow(self.network.jitter_us + 1) if self.network.jitter_us else 0
        self.sim.after(
            self.network.base_latency_us + jitter + extra_delay_us,
            lambda: self.nodes[dst].receive(src, msg),
        )

    # -- client traffic ---------------------------------------------------------------
    def inject(self, time_us: int, tx: Transaction) -> None:
        h = tx_hash(tx)
        self.tx_issue_us.setdefault(h, time_us)
        self._outstanding.add(h)

        def _deliver():
            for node in self.nodes.values():
                node.receive(0, ("client-tx", tx))
            self._schedule_tick()

        self.sim.at(time_us, _deliver)

    def submit_tx(self, tx: Transaction) -> None:
        """Inject at the current simulation time (used by protocol roles)."""
        self.inject(self.sim.now, tx)

    # -- bookkeeping ---------------------------------------------------------------------
    def note_proposal(self, height: int) -> None:
        self.timeline.proposal_us.setdefault(height, self.sim.now)

    def note_commit(self, index: int, block: Block) -> None:
        for tx in block.txs:
            self.committed_hashes[index].add(tx_hash(tx))
        if index == self.reference:
            self.timeline.block_commit_us.setdefault(block.height, self.sim.now)
            for tx in block.txs:
                h = tx_hash(tx)
                self.timeline.tx_commit_us.setdefault(h, self.sim.now)
                self._outstanding.discard(h)

    # -- run ---------------------------------------------------------------------------------
    def _work_pending(self) -> bool:
        return bool(self._outstanding) or any(
            self.nodes[i].mempool or self.nodes[i].wants_progress() for i in self.honest
        )

    def _tick(self) -> None:
        self._tick_scheduled = False
        max_committed = max(len(self.nodes[i].chain) for i in self.honest)
        for node in self.nodes.values():
            node.maybe_propose(self.max_txs_per_block)
        for i in self.honest:
            node = self.nodes[i]
            if node.mempool or node.wants_progress():
                node.ensure_timer()
            if len(node.chain) < max_committed:
                node.maybe_sync()  # partitioned or lagging replica catches up
        if self._work_pending():
            self._schedule_tick()

    def _schedule_tick(self) -> None:
        if self._tick_scheduled:
            return
        if self.sim.now + self.block_interval_us > self.sim.horizon_us:
            return
        self._tick_scheduled = True
        self.sim.after(self.block_interval_us, self._tick)

    def run(self) -> MetricsReport:
        self.sim.after(0, self._tick)
        self.sim.run()
        self.metrics = measure(self.reference_chain(), self.tx_issue_us, self.timeline)
        return self.metrics

    # -- outputs ------------------------------------------------------------------------------
    def reference_chain(self) -> List[Block]:
        return self.nodes[self.reference].chain

    def honest_logs(self) -> Dict[int, bytes]:
        return {i: self.nodes[i].log_bytes() for i in self.honest}


# ---------------------------------------------------------------------------
# spec-level entry points
# ---------------------------------------------------------------------------

def run_consensus(
    system: workflow.SystemKeys,
    genesis: ChainState,
    network: NetworkModel,
    faults: FaultPlan,
    tx_stream: Sequence[Tuple[int, Transaction]],
    horizon_us: int = 120_000_000,
    rng: "SeededRng | None" = None,
    **engine_kwargs,
) -> Tuple[List[Block], MetricsReport]:
    """Run the validator set over an injected transaction stream."""
    engine = ConsensusEngine(
        system=system,
        genesis=genesis,
        network=network,
        faults=faults,
        rng=rng or SeededRng(0),
        horizon_us=horizon_us,
        **engine_kwargs,
    )
    for time_us, tx in tx_stream:
        engine.inject(time_us, tx)
    metrics = engine.run()
    return engine.reference_chain(), metrics


@dataclass(frozen=True)
class StreamSpec:
    """Synthetic load: how many transactions of each class, at what spacing."""

    sig: int = 0
    tsig: int = 0
    gsig: int = 0
    interval_us: int = 50_000
    start_us: int = 10_000


def build_stream(
    system: workflow.SystemKeys,
    spec: StreamSpec,
    rng: SeededRng,
) -> Tuple[List[ledger.Account], List[Tuple[int, Transaction]]]:
    """Generate funded accounts plus a valid transaction stream.

    The generator holds all key material (it is a load harness), so
    threshold-signed spends from the public account are produced directly.
    """
    accounts: List[ledger.Account] = []
    txs: List[Tuple[int, Transaction]] = []
    k, _ = system.params

    sender = suite.sig_keygen(rng.fork("stream/sender"))
    sink = suite.sig_keygen(rng.fork("stream/sink"))
    accounts.append(ledger.Account(pk=sender.pk, balance=10 * (spec.sig + 1),
                                   type=ledger.AccountType.READER, user_id="load-sender"))
    accounts.append(ledger.Account(pk=sink.pk, balance=0,
                                   type=ledger.AccountType.READER, user_id="load-sink"))
    accounts.append(ledger.Account(pk=system.acc_pub, balance=10 * (spec.tsig + 1),
                                   type=ledger.AccountType.PUBLIC, user_id="treasury"))

    user_key = None
    store = ledger.ContentStore()
    if spec.gsig:
        user_key = tibgs.extract_full_key(system.master, system.grp_id, "load-author")

    t = spec.start_us
    for i in range(spec.sig):
        body = ledger.TransferTx(sender.pk, sink.pk, f"load-{i}", 1)
        txs.append((t, ledger.TransferTx(
            body.sender, body.receiver, body.user_id, body.amount,
            sig=suite.sig_sign(ledger.tx_preimage(body), sender.sk),
        )))
        t += spec.interval_us
    for i in range(spec.tsig):
        body = ledger.TransferTx(system.acc_pub, sink.pk, f"pay-{i}", 1)
        preimage = ledger.tx_preimage(body)
        shares = [
            tsig.thres_sign(preimage, system.validators[j].tsig_share, j)
            for j in range(1, k + 1)
        ]
        agg = tsig.sig_share_comb(shares, system.params)
        txs.append((t, ledger.TransferTx(body.sender, body.receiver, body.user_id,
                                         body.amount, tsig=agg.to_bytes())))
        t += spec.interval_us
    for i in range(spec.gsig):
        paper = b"synthetic manuscript %06d" % i
        txs.append((t, workflow.submission(
            "load", paper, user_key, store, system.acc_pub, rng.fork(f"gsig/{i}")
        )))
        t += spec.interval_us
    return accounts, txs
