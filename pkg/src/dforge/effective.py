"""Second-order effective generator for N driven channels at common detuning.

For channels (lam_k, A_k) driven as lam_k (A_k e^{i d t} + A_k^dag e^{-i d t}),
the secular second-order generator is

    H_eff = sum_j (lam_j^2 / d) [A_j, A_j^dag]
          + sum_{k != j} (lam_j lam_k / d) [A_j, A_k^dag],

which is Hermitian for real couplings.  Only the common-detuning case is
supported; distinct per-channel detunings are rejected up front.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .algebra import (
    Coefficient,
    OperatorExpr,
    add,
    adjoint,
    commutator,
    scale,
)
from .errors import UnboundParameter
from .spaces import SpaceSpec, opnorm, realize

__all__ = [
    "Channel",
    "ChannelSpec",
    "effective_hamiltonian",
    "decompose",
    "first_order_remainder_bound",
]


@dataclass(frozen=True)
class Channel:
    """One driven coupling: a real strength symbol and its operator."""

    lam: Coefficient
    op: OperatorExpr

    def __post_init__(self):
        if not self.lam.is_real():
            raise ValueError("channel coupling must be real")
        if self.op.is_zero():
            raise ValueError("channel operator must be nonzero")

    @staticmethod
    def from_symbol(symbol: str, op: OperatorExpr) -> "Channel":
        return Channel(Coefficient.symbol(symbol), op)


@dataclass(frozen=True)
class ChannelSpec:
    channels: tuple[Channel, ...]
    delta: str  # common detuning symbol

    def __post_init__(self):
        if not self.channels:
            raise ValueError("need at least one channel")
        for ch in self.channels:
            if self.delta in ch.lam.num or self.delta in ch.lam.den:
                raise ValueError(
                    f"detuning symbol {self.delta!r} collides with a coupling symbol"
                )

    def coupling_symbols(self) -> list[str]:
        out = []
        for ch in self.channels:
            out.extend(ch.lam.num)
        return out


def effective_hamiltonian(spec: ChannelSpec) -> OperatorExpr:
    """Canonical second-order generator; every coefficient carries 1/delta."""
    inv_delta = Coefficient.make(den=(spec.delta,))
    result = OperatorExpr.zero()
    for ch_j in spec.channels:
        for ch_k in spec.channels:
            coeff = ch_j.lam.mul(ch_k.lam).mul(inv_delta)
            result = add(result, scale(commutator(ch_j.op, adjoint(ch_k.op)), coeff))
    return result


def decompose(
    h_eff: OperatorExpr, ground: str, excited: str
) -> dict[str, OperatorExpr]:
    """Partition monomials by shape relative to a (ground, excited) pair.

    stark: atom-diagonal with boson part 1 or ad*a; one_photon: sig(e,g)*a or
    sig(g,e)*ad; two_photon: the same with two quanta; displacement:
    atom-diagonal times a single ladder operator.  Parts sum to the input
    exactly.
    """
    buckets: dict[str, list] = {
        "stark": [],
        "one_photon": [],
        "two_photon": [],
        "displacement": [],
        "other": [],
    }
    lower = (excited, ground)  # sig(e,g), pairs with a^q
    raise_ = (ground, excited)  # sig(g,e), pairs with ad^q
    for m in h_eff.terms:
        pair = m.atom.pair
        mc, ma = m.boson.creators, m.boson.annihilators
        diagonal = pair is None or pair[0] == pair[1]
        if diagonal and (mc, ma) in ((0, 0), (1, 1)):
            buckets["stark"].append(m)
        elif pair == lower and (mc, ma) == (0, 1):
            buckets["one_photon"].append(m)
        elif pair == raise_ and (mc, ma) == (1, 0):
            buckets["one_photon"].append(m)
        elif pair == lower and (mc, ma) == (0, 2):
            buckets["two_photon"].append(m)
        elif pair == raise_ and (mc, ma) == (2, 0):
            buckets["two_photon"].append(m)
        elif diagonal and (mc, ma) in ((1, 0), (0, 1)):
            buckets["displacement"].append(m)
        else:
            buckets["other"].append(m)
    return {
        name: OperatorExpr.from_monomials(monos) for name, monos in buckets.items()
    }


def first_order_remainder_bound(
    spec: ChannelSpec, params: Mapping[str, float], space: SpaceSpec
) -> float:
    """Upper bound on the neglected oscillatory first-order term, valid for all t.

    Each channel contributes at most 2*lam/delta times the norm of its
    operator on the truncated space.
    """
    try:
        delta = params[spec.delta]
    except KeyError:
        raise UnboundParameter(spec.delta) from None
    total = 0.0
    for ch in spec.channels:
        lam = abs(ch.lam.evaluate(params).real)
        if lam == 0.0:
            continue
        total += 2.0 * lam / abs(delta) * opnorm(realize(ch.op, space, params))
    return total
