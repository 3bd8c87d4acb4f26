"""(k, n) threshold signature guarding the shared public account.

Deterministic hash-and-exponent family: a signing share is the message
point raised to the holder's secret share, shares combine by Lagrange
interpolation in the exponent, and the aggregate verifies against the
single public key alone -- the verifier never learns which k of the n
holders signed.  Key generation is backed by the dealerless VSS ceremony
with commitments in G2, so every participant can derive all verify keys
and the aggregate public key from the public transcript.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Tuple

from . import vss
from .errors import DuplicateIndexError, InsufficientSharesError
from .groups import G1, G2, GroupElement, Scalar, get_context
from .rng import SeededRng

MSG_TAG = b"openpub/tsig/msg"

Params = Tuple[int, int]


@dataclass(frozen=True)
class ThresholdKeySet:
    """Aggregate public key plus per-holder shares and verify keys."""

    params: Params
    public_key: GroupElement                 # doubles as the account id
    secret_shares: Mapping[int, Scalar]
    verify_keys: Mapping[int, GroupElement]
    transcript: vss.VssTranscript

    @property
    def account_id(self) -> bytes:
        return self.public_key.to_bytes()


@dataclass(frozen=True)
class SigShare:
    signer: int
    partial: GroupElement  # G1

    def to_bytes(self) -> bytes:
        return self.signer.to_bytes(2, "big") + self.partial.to_bytes()


@dataclass(frozen=True)
class ThresholdSignature:
    sig: GroupElement  # G1, constant size

    def to_bytes(self) -> bytes:
        return self.sig.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "ThresholdSignature":
        return cls(GroupElement.from_bytes(G1, data))


def message_point(message: bytes) -> GroupElement:
    return get_context().hash_to_group(MSG_TAG, message, G1)


def thres_keygen(params: Params, rng: SeededRng) -> ThresholdKeySet:
    """Run the VSS ceremony and derive the key set every holder agrees on."""
    k, n = vss.check_params(params)
    transcript = vss.run_ceremony((k, n), rng, group=G2)
    verify_keys = {i: transcript.joint_commitment(i) for i in range(1, n + 1)}
    return ThresholdKeySet(
        params=(k, n),
        public_key=transcript.joint_public(),
        secret_shares=dict(transcript.final_shares),
        verify_keys=verify_keys,
        transcript=transcript,
    )


def thres_sign(message: bytes, secret_share: Scalar, signer: int) -> SigShare:
    """Deterministic signing share: message point raised to the share."""
    return SigShare(signer=int(signer), partial=message_point(message) * secret_share)


def sig_share_ver(
    public_key: GroupElement,
    verify_key: GroupElement,
    message: bytes,
    share: SigShare,
) -> bool:
    """Check e(partial, g2) == e(H(m), vk_signer)."""
    ctx = get_context()
    return ctx.pairing_check(
        [(share.partial, ctx.g2), (-message_point(message), verify_key)]
    )


def sig_share_comb(shares: Sequence[SigShare], params: Params) -> ThresholdSignature:
    """Lagrange-combine at least k shares into the aggregate signature.

    The result is byte-identical for every qualifying subset, so the
    combiner may use any k of the supplied shares; it holds no secrets.
    """
    k, _ = vss.check_params(params)
    indices = [s.signer for s in shares]
    if len(set(indices)) != len(indices):
        raise DuplicateIndexError("signature shares with repeated signer index")
    if len(shares) < k:
        raise InsufficientSharesError(f"need {k} signature shares, got {len(shares)}")
    ctx = get_context()
    chosen = sorted(shares, key=lambda s: s.signer)[:k]
    basis = vss.lagrange_basis([s.signer for s in chosen])
    sig = ctx.multiexp([s.partial for s in chosen], [basis[s.signer] for s in chosen])
    return ThresholdSignature(sig=sig)


def ts_verify(public_key: GroupElement, message: bytes, sig: ThresholdSignature) -> bool:
    """Single-key verification; needs no knowledge of the contributing signers."""
    ctx = get_context()
    return ctx.pairing_check(
        [(sig.sig, ctx.g2), (-message_point(message), public_key)]
    )
