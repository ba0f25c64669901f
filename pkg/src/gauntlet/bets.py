"""Bets offered to an agent and their binding into a dilemma as decisions."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .core import DecisionPoint, Dilemma, Term, Token, rational

PRE = "pre"
ACCEPT = "accept"
DECLINE = "decline"


@dataclass(frozen=True)
class Bet:
    """A bet on the value of ``var``; paid once per accepting token.

    ``offer`` is ``"pre"`` (before anything happens) or the infoset at whose
    tokens the bet is offered.
    """

    name: str
    offer: str
    var: str
    payoffs: Mapping = field(default_factory=dict)


@dataclass(frozen=True)
class BetMenu:
    bets: tuple = ()

    def __iter__(self):
        return iter(self.bets)

    def __len__(self):
        return len(self.bets)

    def names(self) -> tuple:
        return tuple(b.name for b in self.bets)


def bind_bets(d: Dilemma, menu: BetMenu) -> Dilemma:
    """Add one accept/decline infoset per bet, plus its payoff terms.

    Bets offered at an infoset get tokens mirroring that infoset's tokens
    (same guards, same observer moments).
    """
    domains = d.domains()
    stages = [dp.stage for dp in d.decisions] or [1]
    decisions = list(d.decisions)
    terms = list(d.utility)
    known = set(d.infosets)
    for bet in menu:
        if bet.name in known or bet.name in domains:
            raise ValueError(f"bet name {bet.name!r} clashes with an existing name")
        if bet.var not in domains:
            raise ValueError(f"bet {bet.name!r} references undefined variable {bet.var!r}")
        dom = [v for v in domains[bet.var] if v is not None]
        payoffs = {v: rational(p) for v, p in bet.payoffs.items()}
        if set(payoffs) != set(dom):
            raise ValueError(f"bet {bet.name!r} events {sorted(map(str, payoffs))} do not "
                             f"partition the values of {bet.var!r}")
        if bet.offer == PRE:
            tokens = (Token(bet.name),)
            stage, observes = min(stages) - 1, ()
        else:
            host = d.decision(bet.offer)
            tokens = tuple(Token(f"{bet.name}@{t.name}", dict(t.guard), t.moment) for t in host.tokens)
            stage, observes = host.stage, host.observes
        decisions.append(DecisionPoint(bet.name, (DECLINE, ACCEPT), tokens, observes, stage))
        known.add(bet.name)
        for tok in tokens:
            for v in dom:
                if payoffs[v]:
                    terms.append(Term({tok.name: ACCEPT, bet.var: v}, payoffs[v], tag=bet.name))
    prior = tuple(d.bets) if d.bets else ()
    return replace(d, decisions=tuple(decisions), utility=tuple(terms),
                   bets=BetMenu(prior + tuple(menu)))


def bet_net(d: Dilemma, w: Mapping) -> Fraction:
    """Net payoff of every bound bet in world ``w``."""
    return sum((d.tagged_utility(w, b.name) for b in (d.bets or ())), Fraction(0))
