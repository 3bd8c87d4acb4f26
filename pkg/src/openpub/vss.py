"""Dealerless (k, n) verifiable secret sharing.

Every participant acts as a dealer: it picks a random contribution, shares
it with a degree-(k-1) polynomial, and publishes exponent commitments to the
polynomial coefficients so each recipient can check its sub-share.  Summing
the sub-shares received from all valid dealers gives each participant a
Shamir share of the joint secret (the sum of the contributions), which no
group smaller than k can recover.

Commitments are single-generator exponent commitments.  The shared values
here are always published in the exponent later (master keys, aggregate
verify keys), so hiding the coefficients behind a second generator would buy
nothing; binding is what the share check needs.

Sub-share transport is modeled as authenticated point-to-point delivery by
the simulator, so dealings carry plain scalars.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from .codec import Encoder
from .errors import (
    DuplicateIndexError,
    IndexNotInSubsetError,
    InsufficientSharesError,
    InvalidParamsError,
    UnverifiedDealingError,
    VssFailureError,
)
from .groups import G1, GroupElement, PairingContext, Scalar, get_context
from .rng import SeededRng

Params = Tuple[int, int]  # (k, n)


def check_params(params: Params) -> Params:
    k, n = params
    if not (1 <= k <= n):
        raise InvalidParamsError(f"invalid threshold parameters (k={k}, n={n})")
    return (int(k), int(n))


def poly_eval(coeffs: Sequence[Scalar], x: int) -> Scalar:
    """Evaluate sum(coeffs[j] * x^j) by Horner's rule."""
    acc = Scalar.zero()
    for c in reversed(coeffs):
        acc = acc * Scalar(x) + c
    return acc


@dataclass(frozen=True)
class Dealing:
    """One dealer's verifiable sharing of its secret contribution."""

    dealer: int
    params: Params
    group: str
    commitments: Tuple[GroupElement, ...]        # generator ** coefficient, length k
    sub_shares: Mapping[int, Scalar]             # recipient index -> polynomial at index

    def to_bytes(self) -> bytes:
        enc = Encoder().u16(self.dealer).u16(self.params[0]).u16(self.params[1])
        enc.text(self.group)
        for c in self.commitments:
            enc.raw(c.to_bytes())
        for j in sorted(self.sub_shares):
            enc.u16(j).raw(self.sub_shares[j].to_bytes())
        return enc.done()


@dataclass(frozen=True)
class VssTranscript:
    """Full ceremony record: all dealings plus the derived final shares."""

    params: Params
    group: str
    dealings: Tuple[Dealing, ...]
    valid_dealers: Tuple[int, ...]
    final_shares: Mapping[int, Scalar]

    def joint_commitment(self, x: int) -> GroupElement:
        """generator ** F(x) for the joint polynomial F, from public data."""
        ctx = get_context()
        acc = ctx.identity(self.group)
        for d in self.dealings:
            if d.dealer in self.valid_dealers:
                acc = acc + commitment_eval(d.commitments, x, ctx)
        return acc

    def joint_public(self) -> GroupElement:
        """generator ** (joint secret)."""
        return self.joint_commitment(0)

    def to_bytes(self) -> bytes:
        enc = Encoder().u16(self.params[0]).u16(self.params[1]).text(self.group)
        enc.u16(len(self.dealings))
        for d in self.dealings:
            enc.blob(d.to_bytes())
        enc.u16(len(self.valid_dealers))
        for i in self.valid_dealers:
            enc.u16(i)
        for i in sorted(self.final_shares):
            enc.u16(i).raw(self.final_shares[i].to_bytes())
        return enc.done()


def deal(
    params: Params,
    dealer: int,
    secret: Scalar,
    rng: SeededRng,
    group: str = G1,
    ctx: "PairingContext | None" = None,
) -> Dealing:
    """Share ``secret`` among n recipients with threshold k."""
    k, n = check_params(params)
    ctx = ctx or get_context()
    coeffs = [secret] + [ctx.scalar_random(rng) for _ in range(k - 1)]
    gen = ctx.g1 if group == G1 else ctx.g2
    commitments = tuple(gen * c for c in coeffs)
    sub_shares = {j: poly_eval(coeffs, j) for j in range(1, n + 1)}
    return Dealing(
        dealer=int(dealer),
        params=(k, n),
        group=group,
        commitments=commitments,
        sub_shares=sub_shares,
    )


def commitment_eval(
    commitments: Sequence[GroupElement], x: int, ctx: "PairingContext | None" = None
) -> GroupElement:
    """Evaluate committed polynomial in the exponent: prod C_j ** (x^j)."""
    ctx = ctx or get_context()
    if x == 0:
        return commitments[0]
    powers = []
    acc = 1
    for _ in commitments:
        powers.append(Scalar(acc))
        acc = acc * x
    return ctx.multiexp(list(commitments), powers)


def verify_share(dealing: Dealing, recipient: int, sub_share: Scalar) -> bool:
    """True iff the sub-share matches the committed polynomial at recipient."""
    k, n = dealing.params
    if not (1 <= recipient <= n):
        return False
    ctx = get_context()
    gen = ctx.g1 if dealing.group == G1 else ctx.g2
    return gen * sub_share == commitment_eval(dealing.commitments, recipient, ctx)


def aggregate_shares(dealings: Iterable[Dealing], me: int) -> Scalar:
    """Sum of all sub-shares addressed to ``me``; all-or-nothing on bad dealings."""
    dealings = list(dealings)
    for d in dealings:
        share = d.sub_shares.get(me)
        if share is None or not verify_share(d, me, share):
            raise UnverifiedDealingError(
                f"dealing from {d.dealer} fails verification for recipient {me}"
            )
    total = Scalar.zero()
    for d in dealings:
        total = total + d.sub_shares[me]
    return total


def lagrange_coefficient(
    subset: Sequence[int], i: int, eval_point: "Scalar | int" = 0
) -> Scalar:
    """Coefficient of share i when interpolating the subset at eval_point."""
    if len(set(subset)) != len(subset):
        raise DuplicateIndexError("subset contains repeated indices")
    if i not in subset:
        raise IndexNotInSubsetError(f"index {i} not in subset")
    x = eval_point if isinstance(eval_point, Scalar) else Scalar(eval_point)
    num = Scalar.one()
    den = Scalar.one()
    si = Scalar(i)
    for j in subset:
        if j == i:
            continue
        sj = Scalar(j)
        num = num * (x - sj)
        den = den * (si - sj)
    return num * den.inverse()


def lagrange_basis(subset: Sequence[int], eval_point: "Scalar | int" = 0) -> Dict[int, Scalar]:
    """All coefficients for a subset at once (combiners' hot path)."""
    return {i: lagrange_coefficient(subset, i, eval_point) for i in subset}


def reconstruct(params: Params, shares: Sequence[Tuple[int, Scalar]]) -> Scalar:
    """Interpolate the joint secret from at least k distinct shares."""
    k, _ = check_params(params)
    indices = [i for i, _ in shares]
    if len(set(indices)) != len(indices):
        raise DuplicateIndexError("shares with repeated indices")
    if len(shares) < k:
        raise InsufficientSharesError(
            f"need at least {k} shares, got {len(shares)}"
        )
    chosen = list(shares)[:k]
    basis = lagrange_basis([i for i, _ in chosen])
    total = Scalar.zero()
    for i, s in chosen:
        total = total + basis[i] * s
    return total


def run_ceremony(
    params: Params,
    rng: SeededRng,
    group: str = G1,
    tamper: "Mapping[int, Dealing] | None" = None,
) -> VssTranscript:
    """Simulate the full n-dealer ceremony.

    ``tamper`` substitutes specific dealers' dealings (fault injection);
    dealings that fail verification for any recipient are excluded, and the
    ceremony aborts only when fewer than k valid dealers remain.
    """
    k, n = check_params(params)
    ctx = get_context()
    dealings = []
    for i in range(1, n + 1):
        if tamper and i in tamper:
            dealings.append(tamper[i])
            continue
        contribution = ctx.scalar_random(rng.fork(f"dealer/{i}"))
        dealings.append(deal(params, i, contribution, rng.fork(f"poly/{i}"), group, ctx))

    valid = []
    for d in dealings:
        ok = all(
            j in d.sub_shares and verify_share(d, j, d.sub_shares[j])
            for j in range(1, n + 1)
        )
        if ok:
            valid.append(d.dealer)
    if len(valid) < k:
        raise VssFailureError(
            f"only {len(valid)} of {n} dealings verified; threshold {k} unreachable"
        )

    good = [d for d in dealings if d.dealer in valid]
    final = {j: aggregate_shares(good, j) for j in range(1, n + 1)}
    return VssTranscript(
        params=(k, n),
        group=group,
        dealings=tuple(dealings),
        valid_dealers=tuple(valid),
        final_shares=final,
    )
