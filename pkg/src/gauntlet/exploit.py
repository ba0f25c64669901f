"""Bet evaluation, Dutch-book verdicts, money pumps and the envelope pump."""

from __future__ import annotations

import itertools
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import lcm

import numpy as np

from .bets import ACCEPT, DECLINE, PRE, Bet, BetMenu, bind_bets
from .core import Dilemma, DilemmaError, joint, rational
from .credence import UnreachableInfosetError
from .theories import (UPDATELESS, check_theory, induced_policy, optimal_policy, policy_value,
                       recommend)

__all__ = [
    "Bet", "BetMenu", "bind_bets", "PRE", "ExploitReport", "BetDecision", "WorldNet",
    "evaluate_bets", "run_money_pump", "PumpTrace", "EnvelopeModel", "envelope_model_of",
    "bayes_conditional_other", "prior_averse_appraisal", "run_envelope_pump",
    "unconditional_switch_gain", "search_dutch_book", "search_space_size", "strip_bets",
    "SearchSpaceError", "DUTCH_BOOK", "EXPLOITABLE", "SAFE",
]

DUTCH_BOOK = "dutch-book"
EXPLOITABLE = "exploitable-in-expectation"
SAFE = "safe"


class SearchSpaceError(DilemmaError):
    pass


@dataclass(frozen=True)
class BetDecision:
    name: str
    offer: str
    ev: Fraction  # EV(accept) - EV(decline) as the agent sees it
    accepted: bool


@dataclass(frozen=True)
class WorldNet:
    outcome: Mapping
    prob: Fraction
    net: Fraction


@dataclass(frozen=True)
class ExploitReport:
    theory: str
    rule: str
    decisions: tuple
    nets: tuple
    worst: Fraction
    best: Fraction
    expected: Fraction
    verdict: str
    policy: Mapping = field(default_factory=dict, repr=False)

    def accepted(self) -> tuple:
        return tuple(b.name for b in self.decisions if b.accepted)

    def net_by(self, var: str) -> dict:
        """Net payoff keyed by the value of ``var`` (must be constant per value)."""
        out: dict = {}
        for wn in self.nets:
            v = wn.outcome[var]
            if v in out and out[v] != wn.net:
                raise ValueError(f"net is not determined by {var!r}")
            out[v] = wn.net
        return out


def _outcome_vars(d: Dilemma) -> tuple:
    return tuple(cv.name for cv in d.chance) + tuple(p.name for p in d.predictors)


def strip_bets(d: Dilemma) -> Dilemma:
    """The dilemma without any bound bets."""
    if not d.bets:
        return d
    names = set(d.bets.names())
    return replace(d, decisions=tuple(dp for dp in d.decisions if dp.infoset not in names),
                   utility=tuple(t for t in d.utility if t.tag not in names), bets=None)


def _base_infosets(d: Dilemma) -> tuple:
    names = set(d.bets.names()) if d.bets else set()
    return tuple(i for i in d.infosets if i not in names)


def _gaps_and_policy(d: Dilemma, theory: str, rule) -> tuple[dict, dict]:
    """Perceived EV(accept) - EV(decline) per bet and the base policy played."""
    names = d.bets.names() if d.bets else ()
    gaps: dict = {}
    if theory in UPDATELESS:
        declined = {b: DECLINE for b in names}
        base = dict(optimal_policy(d, theory, infosets=_base_infosets(d), fixed=declined).policy)
        ref = policy_value(d, {**base, **declined}, theory)
        for b in names:
            gaps[b] = policy_value(d, {**base, **declined, b: ACCEPT}, theory) - ref
        return gaps, base
    base = {i: a for i, a in induced_policy(d, theory, rule).items() if i not in names}
    for b in names:
        try:
            rec = recommend(d, b, theory, rule)
            gaps[b] = rec.advantage(ACCEPT, DECLINE)
        except UnreachableInfosetError:
            gaps[b] = Fraction(0)
    return gaps, base


def _verdict(worst: Fraction, best: Fraction, expected: Fraction) -> str:
    if best < 0:
        return DUTCH_BOOK
    if expected < 0:
        return EXPLOITABLE
    return SAFE


def world_nets(d: Dilemma, policy: Mapping) -> tuple:
    """Bet net per outcome (chance and predictor values) under a pure policy."""
    names = d.bets.names() if d.bets else ()
    keys = _outcome_vars(d)
    acc: dict = {}
    for w, p in joint(d, policy):
        key = tuple(w[k] for k in keys)
        net = sum((d.tagged_utility(w, b) for b in names), Fraction(0))
        if key in acc:
            q, n = acc[key]
            if n != net:  # tokens not determined by the outcome; keep worlds apart
                key = key + (len(acc),)
                acc[key] = (p, net)
                continue
            acc[key] = (q + p, n)
        else:
            acc[key] = (p, net)
    return tuple(WorldNet(dict(zip(keys, k)), p, n) for k, (p, n) in acc.items())


def evaluate_bets(d: Dilemma, theory: str, rule="ssa") -> ExploitReport:
    """Which bound bets the agent accepts, and what they net in every world.

    A bet is accepted iff its perceived EV gain is strictly positive.
    Updateless agents keep the base policy that is optimal with every bet
    declined and then price each bet against it.
    """
    check_theory(theory)
    if not d.bets:
        raise DilemmaError("dilemma has no bound bets")
    gaps, base = _gaps_and_policy(d, theory, rule)
    decisions = tuple(BetDecision(b.name, b.offer, gaps[b.name], gaps[b.name] > 0) for b in d.bets)
    policy = {**base, **{b.name: (ACCEPT if b.accepted else DECLINE) for b in decisions}}
    nets = world_nets(d, policy)
    worst = min(n.net for n in nets)
    best = max(n.net for n in nets)
    expected = sum((n.prob * n.net for n in nets), Fraction(0))
    return ExploitReport(theory, str(getattr(rule, "value", rule)), decisions, nets, worst, best,
                         expected, _verdict(worst, best, expected), policy)


# ------------------------------------------------------------ money pump


@dataclass(frozen=True)
class PumpRound:
    round: int
    perceived: Fraction
    action: str
    box: str | None
    realized: Fraction


@dataclass(frozen=True)
class PumpTrace:
    rows: tuple
    total: Fraction


def run_money_pump(d: Dilemma, theory: str, rounds: int | None = None, rule="ssa") -> PumpTrace:
    """Per-round perceived gain from playing, the box chosen and the realized payoff."""
    check_theory(theory)
    n = int(d.meta.get("rounds", 0))
    rounds = n if rounds is None else rounds
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if rounds > n:
        raise ValueError(f"dilemma only has {n} rounds")
    pi = induced_policy(d, theory, rule)
    world = joint(d, pi)
    rows, total = [], Fraction(0)
    for k in range(1, rounds + 1):
        play = f"play{k}"
        if theory in UPDATELESS:
            perceived = (policy_value(d, {**pi, play: "play"}, theory)
                         - policy_value(d, {**pi, play: "decline"}, theory))
        else:
            perceived = recommend(d, play, theory, rule).advantage("play", "decline")
        realized = world.expect(lambda w, k=k: d.tagged_utility(w, f"round{k}"))
        box = pi[f"box{k}"] if pi[play] == "play" else None
        rows.append(PumpRound(k, perceived, pi[play], box, realized))
        total += realized
    return PumpTrace(tuple(rows), total)


# ------------------------------------------------------------ two envelopes


@dataclass(frozen=True)
class EnvelopeModel:
    """Prior over pairs (n, 2n): ``pairs`` maps the smaller amount n to its probability."""

    pairs: Mapping
    floor: Fraction = Fraction(8)
    fee: Fraction = Fraction(1)

    def __post_init__(self):
        pairs = {rational(n): rational(p) for n, p in self.pairs.items()}
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "floor", rational(self.floor))
        object.__setattr__(self, "fee", rational(self.fee))
        if not pairs or sum(pairs.values()) != 1 or any(p < 0 for p in pairs.values()):
            raise ValueError("pair prior must be a probability distribution")
        if any(n < self.floor for n in pairs):
            raise ValueError("every amount must be at least the floor")

    def mean(self) -> Fraction:
        return sum((p * Fraction(3, 2) * n for n, p in self.pairs.items()), Fraction(0))

    def support(self) -> list:
        return sorted({n for n in self.pairs} | {2 * n for n in self.pairs})


def envelope_model_of(d: Dilemma) -> EnvelopeModel:
    smalls = d.meta["pairs"]
    return EnvelopeModel({n: Fraction(1, len(smalls)) for n in smalls}, d.meta["floor"], d.meta["fee"])


def bayes_conditional_other(m: EnvelopeModel, x) -> Fraction:
    """E[Y | X = x], with the held envelope equally likely smaller or larger."""
    x = rational(x)
    lo = m.pairs.get(x / 2, Fraction(0))  # x is the larger of (x/2, x)
    hi = m.pairs.get(x, Fraction(0))  # x is the smaller of (x, 2x)
    if lo + hi == 0:
        raise ValueError(f"amount {x} is never held under this prior")
    return (lo * (x / 2) + hi * (2 * x)) / (lo + hi)


def prior_averse_appraisal(x) -> Fraction:
    """Half the time the other envelope holds 2x, half the time x/2."""
    x = rational(x)
    if x <= 0:
        raise ValueError("x must be positive")
    return Fraction(5, 4) * x


def unconditional_switch_gain(m: EnvelopeModel) -> Fraction:
    """E[Y] - E[X] before looking; zero by symmetry."""
    return sum((p * (Fraction(1, 2) * (2 * n - n) + Fraction(1, 2) * (n - 2 * n))
                for n, p in m.pairs.items()), Fraction(0))


@dataclass(frozen=True)
class EnvelopeOffer:
    offer: int
    held: str  # "first" or "second"; envelopes stay unopened
    appraisal_held: Fraction
    appraisal_other: Fraction
    switched: bool
    fee_paid: Fraction


def run_envelope_pump(m: EnvelopeModel, agent: str, offers: int, x=None) -> PumpTrace:
    """Repeatedly offer a paid swap of unopened envelopes.

    The agent peeks once at the first envelope (amount ``x``, default the
    floor).  The prior-averse agent reapplies the 5/4 argument to whatever it
    holds, using the floor when the amount is unknown.  The Bayes agent keeps
    its posterior values of both envelopes and swaps only on strict gain.
    """
    if offers < 1:
        raise ValueError("offers must be >= 1")
    if agent not in ("prior-averse", "bayes"):
        raise ValueError(f"unknown agent {agent!r}")
    x = m.floor if x is None else rational(x)
    value = {"first": x, "second": bayes_conditional_other(m, x) if agent == "bayes" else None}
    held, other = "first", "second"
    rows, total = [], Fraction(0)
    for k in range(1, offers + 1):
        if agent == "prior-averse":
            basis = value[held] if value[held] is not None else m.floor
            mine, theirs = basis, prior_averse_appraisal(basis)
        else:
            mine, theirs = value[held], value[other]
        switch = theirs > mine + m.fee
        paid = m.fee if switch else Fraction(0)
        total += paid
        rows.append(EnvelopeOffer(k, held, mine, theirs, switch, paid))
        if switch:
            held, other = other, held
    return PumpTrace(tuple(rows), total)


# ------------------------------------------------------------ book search


def _bettable(d: Dilemma) -> list[tuple[str, tuple]]:
    doms = d.domains()
    out = [(n, tuple(v for v in doms[n] if v is not None)) for n in _outcome_vars(d)]
    return [(n, dom) for n, dom in out if len(dom) >= 2]


def _offers(d: Dilemma) -> list[str]:
    return [PRE] + list(d.infosets)


def search_space_size(d: Dilemma, bound: int) -> int:
    """Number of menus (one or two bets) the exhaustive search covers."""
    d = strip_bets(d)
    n = sum((2 * bound + 1) ** len(dom) for _ in _offers(d) for _, dom in _bettable(d))
    return n + n * (n - 1) // 2


def search_dutch_book(d: Dilemma, theory: str, rule="ssa", bound: int = 10, *,
                      max_candidates: int = 200_000) -> BetMenu | None:
    """First one- or two-bet menu with integer payoffs in [-bound, bound] that is a Dutch book.

    Order: offer points (pre-experiment, then infosets in declaration order),
    then variables (chance, then predictors), then payoff vectors in
    lexicographic order; single bets come before pairs (i < j).  The agent's
    valuation of a bet is linear in its payoffs, so acceptance and per-world
    nets are screened with integer arithmetic; every hit is confirmed with a
    full evaluate_bets run before it is returned.
    """
    check_theory(theory)
    if bound < 1:
        raise ValueError("bound must be >= 1")
    base = strip_bets(d)
    slots = [(o, v, dom) for o in _offers(base) for v, dom in _bettable(base)]
    total = sum((2 * bound + 1) ** len(dom) for _, _, dom in slots)
    if total > max_candidates:
        raise SearchSpaceError(f"{total} candidate bets exceed the limit of {max_candidates}")

    keys = None
    cand_bets, cand_nets = [], []
    for offer, var, dom in slots:
        weights, counts = [], []
        for v in dom:
            probe = bind_bets(base, BetMenu((Bet("probe", offer, var, {u: int(u == v) for u in dom}),)))
            gaps, policy = _gaps_and_policy(probe, theory, rule)
            weights.append(gaps["probe"])
            nets = world_nets(probe, {**policy, "probe": ACCEPT})
            if keys is None:
                keys = [tuple(sorted(n.outcome.items(), key=str)) for n in nets]
            row = {tuple(sorted(n.outcome.items(), key=str)): n.net for n in nets}
            counts.append([int(row.get(k, 0)) for k in keys])
        scale = lcm(*(w.denominator for w in weights))
        w_int = np.array([int(w * scale) for w in weights], dtype=np.int64)
        grid = np.array(list(itertools.product(range(-bound, bound + 1), repeat=len(dom))),
                        dtype=np.int64)
        accepted = grid @ w_int > 0
        nets = grid @ np.array(counts, dtype=np.int64)
        for row in np.nonzero(accepted)[0]:
            cand_bets.append((offer, var, dom, tuple(int(x) for x in grid[row])))
        cand_nets.append(nets[accepted])
    if not cand_bets:
        return None
    nets = np.concatenate(cand_nets)

    def confirm(idx: tuple) -> BetMenu | None:
        menu = BetMenu(tuple(
            Bet(f"book{j + 1}", cand_bets[i][0], cand_bets[i][1], dict(zip(cand_bets[i][2], cand_bets[i][3])))
            for j, i in enumerate(idx)))
        report = evaluate_bets(bind_bets(base, menu), theory, rule)
        return menu if report.verdict == DUTCH_BOOK else None

    for i in np.nonzero((nets < 0).all(axis=1))[0]:
        hit = confirm((int(i),))
        if hit:
            return hit
    for i in range(len(nets) - 1):
        rows = np.nonzero(((nets[i] + nets[i + 1:]) < 0).all(axis=1))[0]
        for r in rows:
            hit = confirm((i, i + 1 + int(r)))
            if hit:
                return hit
    return None
