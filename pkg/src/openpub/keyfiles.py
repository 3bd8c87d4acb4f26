"""Key-file serialization.

Each entry is one line of header followed by one line of hex:

    # openpub-key curve=bn254 role=msk params=3,4 id=validator-2
    0a1b2c...

A validator file carries that validator's secret material (master share,
group share, threshold share, account key); the public bundle carries
everything verifiers need (master public key halves, group verify keys,
threshold verify keys, the public account id, validator account ids).
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Tuple

from .errors import DecodingError
from .workflow import SystemKeys


def _entry(curve: str, role: str, params: Tuple[int, int], ident: str, data: bytes) -> str:
    k, n = params
    return (
        f"# openpub-key curve={curve} role={role} params={k},{n} id={ident}\n"
        f"{data.hex()}\n"
    )


def validator_file(system: SystemKeys, index: int, curve: str = "bn254") -> str:
    v = system.validators[index]
    ident = f"validator-{index}"
    parts = [
        _entry(curve, "msk", system.params, ident, v.master_share.to_bytes()),
        _entry(curve, "gsk", system.params, f"{ident}/{system.grp_id}",
               v.group_share.gsk.to_bytes()),
        _entry(curve, "gvk", system.params, f"{ident}/{system.grp_id}",
               v.group_share.gvk.to_bytes()),
        _entry(curve, "tsk", system.params, ident, v.tsig_share.to_bytes()),
        _entry(curve, "account-sk", system.params, ident,
               v.keypair.sk.to_bytes(32, "big")),
        _entry(curve, "account-pk", system.params, ident, v.keypair.pk),
    ]
    return "".join(parts)


def public_bundle(system: SystemKeys, curve: str = "bn254") -> str:
    parts = [
        _entry(curve, "mpk1", system.params, "master", system.master.mpk1.to_bytes()),
        _entry(curve, "mpk2", system.params, "master", system.master.mpk2.to_bytes()),
        _entry(curve, "acc-pub", system.params, "treasury", system.acc_pub),
        _entry(curve, "tsig-pk", system.params, "treasury",
               system.threshold.public_key.to_bytes()),
    ]
    for i in sorted(system.gvks):
        parts.append(_entry(curve, "gvk", system.params,
                            f"validator-{i}/{system.grp_id}",
                            system.gvks[i].to_bytes()))
    for i in sorted(system.validators):
        parts.append(_entry(curve, "tvk", system.params, f"validator-{i}",
                            system.threshold.verify_keys[i].to_bytes()))
        parts.append(_entry(curve, "account-pk", system.params, f"validator-{i}",
                            system.validators[i].keypair.pk))
    return "".join(parts)


def write_key_files(system: SystemKeys, out_dir: "Path | str") -> List[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for i in sorted(system.validators):
        path = out / f"validator-{i}.keys"
        path.write_text(validator_file(system, i))
        written.append(path)
    bundle = out / "public.keys"
    bundle.write_text(public_bundle(system))
    written.append(bundle)
    return written


def parse_key_file(text: str) -> List[Tuple[Dict[str, str], bytes]]:
    """Parse entries back into (header fields, raw bytes) pairs."""
    entries = []
    header: "Dict[str, str] | None" = None
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = {}
            for token in line.lstrip("# ").split():
                if "=" in token:
                    key, val = token.split("=", 1)
                    fields[key] = val
            header = fields
        else:
            if header is None:
                raise DecodingError("key data without a header line")
            entries.append((header, bytes.fromhex(line)))
            header = None
    return entries
