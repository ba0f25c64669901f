"""Self-locating credence over (world, token) pairs under SSA or SIA."""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .core import (ConditioningError, Dilemma, DilemmaError, WorldDist, as_predicate,
                   disposition_joint, rational, rule_var)


class AnthropicRule(str, Enum):
    SSA = "ssa"
    SIA = "sia"


class UnreachableInfosetError(DilemmaError):
    pass


def as_rule(rule) -> AnthropicRule:
    try:
        return AnthropicRule(str(getattr(rule, "value", rule)).lower())
    except ValueError:
        raise ValueError(f"unknown anthropic rule {rule!r}; use 'ssa' or 'sia'") from None


@dataclass(frozen=True)
class CredenceTable:
    """Normalised credence over (world, token) entries."""

    infoset: str
    rule: AnthropicRule
    entries: tuple  # ((world dict, token name, probability), ...)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def total(self) -> Fraction:
        return sum((p for _, _, p in self.entries), Fraction(0))

    def prob(self, event) -> Fraction:
        pred = as_predicate(event)
        return sum((p for w, _, p in self.entries if pred(w)), Fraction(0))

    def token_prob(self, token: str) -> Fraction:
        return sum((p for _, t, p in self.entries if t == token), Fraction(0))

    def marginal(self, *names: str) -> dict:
        out: dict = {}
        for w, _, p in self.entries:
            key = w[names[0]] if len(names) == 1 else tuple(w[n] for n in names)
            out[key] = out.get(key, Fraction(0)) + p
        return out

    def condition(self, event) -> CredenceTable:
        pred = as_predicate(event)
        kept = [(w, t, p) for w, t, p in self.entries if pred(w)]
        z = sum((p for _, _, p in kept), Fraction(0))
        if z == 0:
            raise ConditioningError("conditioning event has zero credence")
        return CredenceTable(self.infoset, self.rule, tuple((w, t, p / z) for w, t, p in kept))

    def expect(self, fn: Callable[[dict], Fraction]) -> Fraction:
        return sum((p * fn(w) for w, _, p in self.entries), Fraction(0))


def _moment_count(d: Dilemma, w: Mapping) -> int:
    return sum(1 for m in d.moments if all(w.get(k) == v for k, v in m.guard.items()))


def credence_from(worlds: WorldDist, d: Dilemma, infoset: str, rule) -> CredenceTable:
    """Spread ``worlds`` over the active tokens of ``infoset``.

    SSA gives each world its probability times (matching moments / all
    moments); SIA gives every matching token the full world probability.
    """
    rule = as_rule(rule)
    dp = d.decision(infoset)
    with_moments = any(t.moment for t in dp.tokens) and d.moments
    raw = []
    for w, p in worlds:
        active = [t.name for t in dp.tokens if w.get(t.name) is not None]
        if not active:
            continue
        if rule is AnthropicRule.SIA:
            share = p
        else:
            total = _moment_count(d, w) if with_moments else len(active)
            share = p / max(total, len(active))
        for t in active:
            raw.append((w, t, share))
    z = sum((p for _, _, p in raw), Fraction(0))
    if z == 0:
        raise UnreachableInfosetError(f"infoset {infoset!r} has zero probability of being reached")
    return CredenceTable(infoset, rule, tuple((w, t, p / z) for w, t, p in raw))


def anthropic_credence(d: Dilemma, infoset: str, rule="ssa") -> CredenceTable:
    """Credence at ``infoset`` with every rule drawn from the disposition."""
    return credence_from(disposition_joint(d), d, infoset, rule)


def posterior_after_actions(prior: CredenceTable, d: Dilemma, taken: Mapping) -> CredenceTable:
    """Condition on the agent's own earlier choices (infoset -> action)."""
    for infoset, a in taken.items():
        if a not in d.decision(infoset).actions:
            raise ValueError(f"{a!r} is not an action of {infoset!r}")
    return prior.condition({rule_var(i): a for i, a in taken.items()})


class _NegInf:
    """Marker below every rational: defection's payoff has no bound."""

    def __lt__(self, other):
        return other is not self

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return other is self

    def __repr__(self):
        return "-inf"

    __str__ = __repr__


NEG_INFINITY = _NegInf()
UNBOUNDED = None


def simulation_cooperation_margin(s, u_coop, u_defect_real, u_defect_sim, cap=None):
    """EV(cooperate) - EV(defect) when the agent is a simulation with credence ``s``.

    Defecting pays ``u_defect_sim`` inside a simulation and ``u_defect_real``
    outside; ``cap`` bounds the real payoff (``None`` means no bound).  Passing
    ``UNBOUNDED`` as the real payoff with no cap yields ``NEG_INFINITY``.
    """
    s = rational(s)
    if not 0 <= s <= 1:
        raise ValueError("s must lie in [0, 1]")
    u_coop, u_defect_sim = rational(u_coop), rational(u_defect_sim)
    if u_defect_real is UNBOUNDED:
        if cap is None:
            return u_coop - u_defect_sim if s == 1 else NEG_INFINITY
        real = rational(cap)
    else:
        real = rational(u_defect_real)
        if cap is not None:
            real = min(real, rational(cap))
    return u_coop - (s * u_defect_sim + (1 - s) * real)
