"""Command-line interface: keygen, run, bench, inspect, exit codes."""

import json

import pytest

from openpub import cli, keyfiles, scenario, workflow
from openpub.rng import SeededRng


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo-run")
    code = cli.main(["run", "--demo", "--out", str(out)])
    assert code == 0
    return out


def test_run_outputs_exist(run_dir):
    for name in ("chain.jsonl", "events.jsonl", "metrics.json", "scenario.json"):
        assert (run_dir / name).exists()
    assert any((run_dir / "papers").iterdir())


def test_run_replay_byte_identical(run_dir, tmp_path):
    out2 = tmp_path / "again"
    assert cli.main(["run", "--demo", "--out", str(out2)]) == 0
    assert (out2 / "chain.jsonl").read_bytes() == (run_dir / "chain.jsonl").read_bytes()
    assert (out2 / "events.jsonl").read_bytes() == (run_dir / "events.jsonl").read_bytes()


def test_run_from_config_file(run_dir, tmp_path):
    cfg_path = tmp_path / "scenario.json"
    cfg_path.write_text(scenario.demo_config(seed=7).to_json())
    out = tmp_path / "from-file"
    assert cli.main(["run", "--config", str(cfg_path), "--out", str(out)]) == 0
    assert (out / "chain.jsonl").read_bytes() == (run_dir / "chain.jsonl").read_bytes()


def test_run_requires_config():
    assert cli.main(["run", "--out", "/tmp/nowhere"]) == 2


def test_keygen_writes_files(tmp_path):
    out = tmp_path / "keys"
    assert cli.main(["keygen", "--demo", "--out", str(out)]) == 0
    files = sorted(p.name for p in out.iterdir())
    assert files == [
        "public.keys", "validator-1.keys", "validator-2.keys",
        "validator-3.keys", "validator-4.keys",
    ]


def test_keygen_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    cli.main(["keygen", "--demo", "--out", str(a)])
    cli.main(["keygen", "--demo", "--out", str(b)])
    assert (a / "validator-2.keys").read_text() == (b / "validator-2.keys").read_text()
    assert (a / "public.keys").read_text() == (b / "public.keys").read_text()


def test_key_files_parse_back(tmp_path):
    system = workflow.system_initialization((1, 1), "venue", SeededRng(5))
    text = keyfiles.validator_file(system, 1)
    entries = keyfiles.parse_key_file(text)
    roles = [h["role"] for h, _ in entries]
    assert roles == ["msk", "gsk", "gvk", "tsk", "account-sk", "account-pk"]
    assert all(h["curve"] == "bn254" and h["params"] == "1,1" for h, _ in entries)
    header, blob = entries[0]
    assert blob == system.validators[1].master_share.to_bytes()


def test_bench_row_count(capsys):
    assert cli.main(["bench", "--thresholds", "1,1"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 1 + 8  # header + one row per operation


def test_bench_rejects_inconsistent_threshold(capsys):
    assert cli.main(["bench", "--thresholds", "5,4"]) == 2


def test_inspect_summary(run_dir, capsys):
    assert cli.main(["inspect", "--chain", str(run_dir / "chain.jsonl")]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["published"] == 2


def test_inspect_trail_shows_five_stages(run_dir, capsys):
    events = [json.loads(l) for l in (run_dir / "events.jsonl").read_text().splitlines()]
    submit_hash = next(e["submit_hash"] for e in events if e["event"] == "submission")
    assert cli.main(["inspect", "--chain", str(run_dir / "chain.jsonl"),
                     "--trail", submit_hash]) == 0
    trail = json.loads(capsys.readouterr().out)
    assert trail["submit"] and trail["distribute"] and trail["open"]
    assert len([r for r in trail["reviews"] if r["assigned"]]) == 3
    assert trail["rewards"]
    assert trail["author"] in ("alice", "andre")


def test_inspect_unopened_submission_hides_author(run_dir):
    # truncate the chain right after the submission commits and inspect
    lines = (run_dir / "chain.jsonl").read_text().splitlines()
    header, env, blocks, state = cli.load_chain_export(run_dir / "chain.jsonl")
    submit_hash = next(iter(state.published))
    submit_height = next(
        b.height
        for b in blocks
        for tx in b.txs
        if hasattr(tx, "gsig") and cli.tx_hash(tx) == submit_hash
    )
    truncated = [b for b in blocks if b.height <= submit_height]
    trail = cli.paper_trail(truncated, submit_hash)
    assert trail["author"] is None


def test_inspect_bogus_hash_not_found(run_dir, capsys):
    assert cli.main(["inspect", "--chain", str(run_dir / "chain.jsonl"),
                     "--tx", "00" * 32]) == 1


def test_inspect_replay_verifies_chain(run_dir):
    # load_chain_export re-applies every block with full verification
    header, env, blocks, state = cli.load_chain_export(run_dir / "chain.jsonl")
    assert state.height == len(blocks)
    assert state.total_tokens() == sum(
        a["balance"] for a in header["genesis"]
    ) + state.minted


def test_curve_pin_respected(monkeypatch, capsys):
    monkeypatch.setenv("OPENPUB_CURVE", "secp256k1")
    with pytest.raises(Exception):
        cli.main(["bench", "--thresholds", "1,1"])


def test_run_zero_reviewers_fails_distribution(tmp_path, capsys):
    import dataclasses

    cfg = dataclasses.replace(scenario.demo_config(seed=5), reviewers=())
    cfg_path = tmp_path / "empty-pool.json"
    cfg_path.write_text(cfg.to_json())
    out = tmp_path / "out"
    code = cli.main(["run", "--config", str(cfg_path), "--out", str(out)])
    assert code == 1
    assert "papers-published" in capsys.readouterr().err
