"""Command-line front end: key ceremonies, scenario runs, benchmarks, inspection.

Exit codes: 0 success, 1 invariant violation or lookup failure, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional

from . import keyfiles, ledger, scenario, tibgs, workflow
from .consensus import check_pbft_shape
from .errors import ConfigError, NotFoundError, OpenPubError
from .groups import get_context
from .ledger import (
    ACCEPT,
    Block,
    DistributeTx,
    LedgerEnv,
    FeeSchedule,
    OpenTx,
    ReviewTx,
    SubmitTx,
    TransferTx,
    tx_hash,
)
from .rng import SeededRng

USAGE_EXIT = 2
VIOLATION_EXIT = 1


def _load_config(args) -> scenario.ScenarioConfig:
    if args.demo:
        cfg = scenario.demo_config(seed=args.seed if args.seed is not None else 7)
        return cfg
    if not args.config:
        raise ConfigError("either --config PATH or --demo is required")
    cfg = scenario.ScenarioConfig.from_json(Path(args.config).read_text())
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    cfg.validate()
    return cfg


def cmd_keygen(args) -> int:
    cfg = _load_config(args)
    check_pbft_shape(cfg.params)
    system = workflow.system_initialization(
        cfg.params, cfg.grp_id, SeededRng(cfg.seed, b"scenario").fork("init"), cfg.fees
    )
    out = Path(args.out)
    written = keyfiles.write_key_files(system, out)
    for path in written:
        print(path)
    return 0


def cmd_run(args) -> int:
    cfg = _load_config(args)
    result = scenario.run_scenario(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "chain.jsonl").write_bytes(result.chain_export())
    (out / "events.jsonl").write_bytes(result.event_log_bytes())
    (out / "scenario.json").write_text(cfg.to_json() + "\n")
    if args.format == "csv":
        (out / "metrics.csv").write_text(result.metrics.to_csv())
    else:
        (out / "metrics.json").write_text(
            json.dumps(result.metrics.to_dict(), indent=2, sort_keys=True) + "\n"
        )
    papers_dir = out / "papers"
    papers_dir.mkdir(exist_ok=True)
    for record in result.state.papers.values():
        content = result.store.get(record.paper_hash)
        if content is not None:
            (papers_dir / record.paper_hash.hex()).write_bytes(content)

    violations = scenario.check_invariants(result)
    if violations:
        print(f"invariant violated: {violations[0]}", file=sys.stderr)
        for extra in violations[1:]:
            print(f"  also: {extra}", file=sys.stderr)
        return VIOLATION_EXIT
    print(
        f"ok: {len(result.chain)} blocks, {result.metrics.committed_count()} txs, "
        f"{len(result.state.published)} papers published -> {out}"
    )
    return 0


def _parse_thresholds(text: str) -> List[tuple]:
    out = []
    for part in text.replace(";", " ").split():
        k_str, n_str = part.split(",")
        out.append((int(k_str), int(n_str)))
    return out


def cmd_bench(args) -> int:
    thresholds = _parse_thresholds(args.thresholds)
    for params in thresholds:
        check_pbft_shape(params)  # rejects inconsistent thresholds
    rows = []
    for k, n in thresholds:
        rows.extend(bench_threshold((k, n), seed=args.seed or 1))
    lines = ["k,n,op,ms"]
    for k, n, op, ms in rows:
        lines.append(f"{k},{n},{op},{ms:.3f}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "bench.csv").write_text(text)
    print(text, end="")
    return 0


def bench_threshold(params, seed: int = 1) -> List[tuple]:
    """Wall-clock timings of the eight group-signature operations."""
    k, n = params
    rng = SeededRng(seed, b"bench")

    t0 = time.perf_counter()
    master = tibgs.setup(params, rng.fork("setup"))
    t_setup = time.perf_counter() - t0

    t0 = time.perf_counter()
    shares = {i: tibgs.grp_setup("bench", i, master.shares[i], params)
              for i in range(1, n + 1)}
    t_grp = (time.perf_counter() - t0) / n

    gvks = {i: s.gvk for i, s in shares.items()}
    t0 = time.perf_counter()
    frags = [tibgs.ext_share("bench-user", shares[i]) for i in range(1, k + 1)]
    t_ext = (time.perf_counter() - t0) / k

    t0 = time.perf_counter()
    key = tibgs.reconst_key("bench-user", frags, gvks, params, master)
    t_reconst = time.perf_counter() - t0

    reps = 5
    t0 = time.perf_counter()
    sigs = [tibgs.sign(b"bench %d" % i, key, rng.fork(f"sig/{i}")) for i in range(reps)]
    t_sign = (time.perf_counter() - t0) / reps

    t0 = time.perf_counter()
    for i, sig in enumerate(sigs):
        assert tibgs.verify(b"bench %d" % i, sig, master, "bench")
    t_verify = (time.perf_counter() - t0) / reps

    sig = sigs[0]
    t0 = time.perf_counter()
    parts = [
        tibgs.open_part(shares[i], sig, b"bench 0", master, verify_sigma=False)
        for i in range(1, k + 1)
    ]
    t_part = (time.perf_counter() - t0) / k

    t0 = time.perf_counter()
    opened = tibgs.open(params, sig, parts, ["bench-user"], "bench")
    t_open = time.perf_counter() - t0
    assert opened == "bench-user"

    ms = 1000.0
    return [
        (k, n, "setup", t_setup * ms),
        (k, n, "grp_setup", t_grp * ms),
        (k, n, "ext_share", t_ext * ms),
        (k, n, "reconst_key", t_reconst * ms),
        (k, n, "sign", t_sign * ms),
        (k, n, "verify", t_verify * ms),
        (k, n, "open_part", t_part * ms),
        (k, n, "open", t_open * ms),
    ]


# ---------------------------------------------------------------------------
# inspect
# ---------------------------------------------------------------------------

def load_chain_export(path: "Path | str"):
    """Parse a chain export, replay it, and re-verify every transaction."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise NotFoundError("empty chain export")
    header = json.loads(lines[0])
    from .groups import G1, G2, GroupElement

    env = LedgerEnv(
        mpk=(
            GroupElement.from_bytes(G1, bytes.fromhex(header["mpk1"])),
            GroupElement.from_bytes(G2, bytes.fromhex(header["mpk2"])),
        ),
        grp_id=header["grp_id"],
        acc_pub=bytes.fromhex(header["acc_pub"]),
        tsig_pk=GroupElement.from_bytes(G2, bytes.fromhex(header["tsig_pk"])),
        fees=FeeSchedule(**header["fees"]),
        validators=tuple(bytes.fromhex(v) for v in header["validators"]),
        f=header["f"],
    )
    accounts = [
        ledger.Account(
            pk=bytes.fromhex(a["pk"]),
            balance=a["balance"],
            type=ledger.AccountType(a["type"]),
            user_id=a["user_id"],
            research_field=a.get("field", ""),
        )
        for a in header["genesis"]
    ]
    state = ledger.genesis_state(accounts)
    blocks = []
    for line in lines[1:]:
        record = json.loads(line)
        block = Block.from_bytes(bytes.fromhex(record["block"]))
        state = ledger.apply_block(state, block, env, check_cert=True)
        blocks.append(block)
    return header, env, blocks, state


def tx_to_json(tx) -> dict:
    base = {"hash": tx_hash(tx).hex(), "kind": type(tx).__name__}
    if isinstance(tx, TransferTx):
        base.update(sender=tx.sender.hex(), receiver=tx.receiver.hex(),
                    user_id=tx.user_id, amount=tx.amount,
                    family="tsig" if tx.tsig is not None else "sig")
    elif isinstance(tx, SubmitTx):
        base.update(field=tx.field_name, paper_hash=tx.paper_hash.hex(),
                    paper_len=tx.paper_len, family="gsig")
    elif isinstance(tx, DistributeTx):
        base.update(submit_hash=tx.submit_hash.hex(),
                    reviewers=len(tx.ciphertexts), endtime=tx.endtime)
    elif isinstance(tx, ReviewTx):
        base.update(submit_hash=tx.submit_hash.hex(), reviewer=tx.reviewer_id,
                    score=tx.score, comment=tx.comment,
                    assigned=bool(tx.reviewer_id))
    elif isinstance(tx, OpenTx):
        base.update(submit_hash=tx.submit_hash.hex(), author=tx.user_id,
                    result="accept" if tx.result == ACCEPT else "reject",
                    reviewers=list(tx.reviewer_ids))
    return base


def paper_trail(blocks, submit_hash: bytes) -> dict:
    """Lifecycle trail of one submission across the chain."""
    trail: Dict[str, object] = {
        "submit": None, "distribute": None, "reviews": [], "open": None,
        "rewards": [],
    }
    opened = False
    for block in blocks:
        for tx in block.txs:
            entry = tx_to_json(tx)
            entry["height"] = block.height
            if isinstance(tx, SubmitTx) and tx_hash(tx) == submit_hash:
                trail["submit"] = entry
            elif getattr(tx, "submit_hash", None) == submit_hash:
                if isinstance(tx, DistributeTx):
                    trail["distribute"] = entry
                elif isinstance(tx, ReviewTx):
                    trail["reviews"].append(entry)
                elif isinstance(tx, OpenTx):
                    trail["open"] = entry
                    opened = True
            elif (
                opened
                and isinstance(tx, TransferTx)
                and tx.tsig is not None
                and tx.user_id.endswith(submit_hash.hex()[:8])
            ):
                trail["rewards"].append(entry)
            elif (
                opened
                and isinstance(tx, TransferTx)
                and tx.tsig is not None
                and trail["open"] is not None
                and tx.user_id == trail["open"]["author"]
            ):
                trail["rewards"].append(entry)
    if trail["submit"] is None:
        raise NotFoundError(f"no submission {submit_hash.hex()} in this chain")
    # authorship is only known once the open transaction exists
    trail["author"] = trail["open"]["author"] if trail["open"] else None
    return trail


def cmd_inspect(args) -> int:
    try:
        header, env, blocks, state = load_chain_export(args.chain)
    except FileNotFoundError:
        print("chain export not found", file=sys.stderr)
        return VIOLATION_EXIT

    try:
        if args.height is not None:
            block = next((b for b in blocks if b.height == args.height), None)
            if block is None:
                raise NotFoundError(f"no block at height {args.height}")
            print(json.dumps(
                {
                    "height": block.height,
                    "proposer": block.proposer,
                    "digest": block.digest().hex(),
                    "txs": [tx_to_json(tx) for tx in block.txs],
                },
                indent=2, sort_keys=True,
            ))
        elif args.tx:
            needle = bytes.fromhex(args.tx)
            for block in blocks:
                for tx in block.txs:
                    if tx_hash(tx) == needle:
                        entry = tx_to_json(tx)
                        entry["height"] = block.height
                        print(json.dumps(entry, indent=2, sort_keys=True))
                        return 0
            raise NotFoundError(f"transaction {args.tx} not found")
        elif args.trail:
            trail = paper_trail(blocks, bytes.fromhex(args.trail))
            print(json.dumps(trail, indent=2, sort_keys=True))
        elif args.user:
            pk = state.user_pk.get(args.user)
            if pk is None:
                raise NotFoundError(f"user {args.user!r} not registered")
            papers = [
                rec.submit_hash.hex()
                for rec in state.published.values()
                if rec.user_id == args.user
            ]
            print(json.dumps(
                {
                    "user_id": args.user,
                    "account": pk.hex(),
                    "balance": state.balance(pk),
                    "published": sorted(papers),
                },
                indent=2, sort_keys=True,
            ))
        else:
            print(json.dumps(
                {
                    "blocks": len(blocks),
                    "height": state.height,
                    "papers": len(state.papers),
                    "published": len(state.published),
                    "minted": state.minted,
                },
                indent=2, sort_keys=True,
            ))
    except NotFoundError as exc:
        print(str(exc), file=sys.stderr)
        return VIOLATION_EXIT
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="openpub",
        description="Anonymous publication protocol simulator and tooling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    keygen = sub.add_parser("keygen", help="run the key ceremonies, write key files")
    keygen.add_argument("--config", help="scenario JSON path")
    keygen.add_argument("--demo", action="store_true", help="use the bundled demo scenario")
    keygen.add_argument("--seed", type=int, help="override the scenario seed")
    keygen.add_argument("--out", required=True, help="output directory")
    keygen.set_defaults(func=cmd_keygen)

    run = sub.add_parser("run", help="execute a full publication scenario")
    run.add_argument("--config", help="scenario JSON path")
    run.add_argument("--demo", action="store_true", help="use the bundled demo scenario")
    run.add_argument("--seed", type=int, help="override the scenario seed")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--format", choices=("json", "csv"), default="json")
    run.set_defaults(func=cmd_run)

    bench = sub.add_parser("bench", help="wall-clock times of the signature operations")
    bench.add_argument("--thresholds", required=True,
                       help="semicolon-separated k,n pairs, e.g. '11,16;15,22'")
    bench.add_argument("--seed", type=int, default=1)
    bench.add_argument("--out", help="directory for bench.csv")
    bench.set_defaults(func=cmd_bench)

    inspect = sub.add_parser("inspect", help="query an exported chain")
    inspect.add_argument("--chain", required=True, help="chain.jsonl path")
    inspect.add_argument("--height", type=int)
    inspect.add_argument("--tx", help="transaction hash (hex)")
    inspect.add_argument("--trail", help="submission hash (hex): full lifecycle")
    inspect.add_argument("--user", help="user id (post-open information only)")
    inspect.set_defaults(func=cmd_inspect)

    return parser


def main(argv: "Optional[List[str]]" = None) -> int:
    get_context()  # honors OPENPUB_CURVE before any work happens
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, KeyError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except OpenPubError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return VIOLATION_EXIT


if __name__ == "__main__":
    sys.exit(main())
