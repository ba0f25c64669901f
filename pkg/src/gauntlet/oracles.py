"""Independent reference computations and random dilemma generators.

The brute-force evaluator walks the raw cartesian product of variable values
and multiplies factors directly.  It shares no code with the engine's
topological enumeration, which is the point: property checks compare the two.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Mapping
from fractions import Fraction

from .core import ChanceVar, DecisionPoint, Dilemma, PredictorVar, Term, Token


def _factors(d: Dilemma, pi: Mapping) -> list[tuple[str, tuple, object]]:
    """(variable, dependencies, probability function of the assignment)."""
    out = []
    for cv in d.chance:
        out.append((cv.name, tuple(cv.parents),
                    lambda a, cv=cv: cv.cpt[tuple(a[p] for p in cv.parents)].get(a[cv.name], Fraction(0))))
    for pv in d.predictors:
        actions = d.decision(pv.reads_infoset).actions
        target = pi[pv.reads_infoset]

        def f(a, pv=pv, actions=actions, target=target):
            if len(actions) == 1:
                return Fraction(1)
            if a[pv.name] == target:
                return pv.accuracy
            return (1 - pv.accuracy) / (len(actions) - 1)
        out.append((pv.name, (), f))
    for dp in d.decisions:
        for tok in dp.tokens:
            def g(a, tok=tok, act=pi[dp.infoset]):
                on = all(a[k] == v for k, v in tok.guard.items())
                return Fraction(int(a[tok.name] == (act if on else None)))
            out.append((tok.name, tuple(tok.guard), g))
    return out


def brute_force_worlds(d: Dilemma, pi: Mapping) -> list[tuple[dict, Fraction]]:
    """Every positive-probability full assignment under pure policy ``pi``."""
    doms = d.domains()
    order = [p.name for p in d.predictors] + [cv.name for cv in d.chance] + \
            [t.name for dp in d.decisions for t in dp.tokens]
    pos = {v: i for i, v in enumerate(order)}
    due: list[list] = [[] for _ in order]
    for var, deps, fn in _factors(d, pi):
        due[max(pos[x] for x in (var,) + deps)].append(fn)
    out = []

    def walk(i: int, a: dict, p: Fraction):
        if i == len(order):
            out.append((dict(a), p))
            return
        for v in doms[order[i]]:
            a[order[i]] = v
            q = p
            for fn in due[i]:
                q *= fn(a)
                if q == 0:
                    break
            if q:
                walk(i + 1, a, q)
        a.pop(order[i], None)

    walk(0, {}, Fraction(1))
    return out


def brute_force_value(d: Dilemma, pi: Mapping) -> Fraction:
    total = Fraction(0)
    for a, p in brute_force_worlds(d, pi):
        total += p * sum((t.value for t in d.utility if all(a.get(k) == v for k, v in t.when.items())),
                         Fraction(0))
    return total


def brute_force_optimum(d: Dilemma) -> tuple[Fraction, list[dict]]:
    """Best value and all optimal pure policies, by exhaustive enumeration."""
    names = [dp.infoset for dp in d.decisions]
    best, winners = None, []
    for combo in itertools.product(*(dp.actions for dp in d.decisions)):
        pi = dict(zip(names, combo))
        v = brute_force_value(d, pi)
        if best is None or v > best:
            best, winners = v, [pi]
        elif v == best:
            winners.append(pi)
    return best, winners


def independent_nets(d: Dilemma, pi: Mapping) -> list[Fraction]:
    """Bet net in every positive-probability world, computed from raw terms."""
    tags = set(d.bets.names()) if d.bets else set()
    nets = []
    for a, _ in brute_force_worlds(d, pi):
        nets.append(sum((t.value for t in d.utility
                         if t.tag in tags and all(a.get(k) == v for k, v in t.when.items())),
                        Fraction(0)))
    return nets


# ------------------------------------------------------------ generators


def _dist(rng: random.Random, values) -> dict:
    w = [rng.randint(1, 6) for _ in values]
    z = sum(w)
    return {v: Fraction(x, z) for v, x in zip(values, w)}


def random_dilemma(rng: random.Random, *, predictor: bool = False, span: int = 5) -> Dilemma:
    """Single-stage dilemma: an optional observation, a hidden variable, random payoffs.

    With ``predictor=False`` there is no predictor and no type-dependent
    disposition, so every theory should agree.
    """
    k = rng.choice((2, 3))
    svals = tuple(f"s{i}" for i in range(k))
    s = ChanceVar("s", svals, (), {(): _dist(rng, svals)})
    h = ChanceVar("h", ("h0", "h1"), ("s",), {(v,): _dist(rng, ("h0", "h1")) for v in svals})
    actions = tuple(f"a{i}" for i in range(rng.choice((2, 3))))
    if rng.random() < 0.5:
        decisions = tuple(DecisionPoint(f"d@{v}", actions, (Token(f"d@{v}", {"s": v}),), ("s",))
                          for v in svals)
    else:
        decisions = (DecisionPoint("d", actions, (Token("d"),)),)
    terms = []
    for dp in decisions:
        tok = dp.tokens[0].name
        for v in svals:
            for hv in ("h0", "h1"):
                for a in actions:
                    val = rng.randint(-span, span)
                    if val:
                        terms.append(Term({tok: a, "s": v, "h": hv}, Fraction(val)))
    predictors = ()
    if predictor:
        target = decisions[0].infoset
        acc = rng.choice((Fraction(1), Fraction(9, 10), Fraction(3, 4)))
        predictors = (PredictorVar("p", target, acc),)
        for a in actions:
            val = rng.randint(-span, span)
            if val:
                terms.append(Term({"p": a}, Fraction(val)))
    return Dilemma("random", chance=(s, h), decisions=decisions, predictors=predictors,
                   utility=tuple(terms))


def affine(d: Dilemma, scale: Fraction, shift: Fraction) -> Dilemma:
    """Same dilemma with utility scale * U + shift."""
    from dataclasses import replace
    terms = tuple(Term(t.when, scale * t.value, t.tag) for t in d.utility) + (Term({}, shift),)
    return replace(d, utility=terms)
