"""Decision theories: updateful (per infoset) and updateless (whole-policy).

Updateful theories evaluate an infoset inside the reference-class joint, where
every infoset's rule is drawn from the disposition.  The agent conditions on
its own earlier choices (``history``) and fixes later infosets to a plan:
myopic theories assume the status-quo action there, ``cdt-sophisticated``
uses backward induction.  Infosets at the same stage stay free.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (ConditioningError, Dilemma, DilemmaError, WorldDist, condition, dependencies,
                   descendants, disposition_joint, enumerate_worlds, expected_utility, observed_reads,
                   pure_policies, resample, resample_plan, rule_var)
from .credence import CredenceTable, UnreachableInfosetError, as_rule, credence_from

UPDATEFUL = ("edt", "edt-tickle", "edt-ratify", "cdt-myopic", "cdt-sophisticated")
UPDATELESS = ("uedt", "ucdt", "fdt")
THEORIES = UPDATEFUL + UPDATELESS

DEFAULT_POLICY_BOUND = 1 << 16


class TheoryError(DilemmaError):
    pass


class NoRatifiableActionError(TheoryError):
    pass


class PolicySpaceError(TheoryError):
    pass


class FixedPointError(TheoryError):
    def __init__(self, msg, oscillating=()):
        super().__init__(msg)
        self.oscillating = tuple(oscillating)


def check_theory(theory: str) -> str:
    if theory not in THEORIES:
        raise TheoryError(f"unknown theory {theory!r}; choose from {', '.join(THEORIES)}")
    return theory


@dataclass(frozen=True)
class Recommendation:
    infoset: str
    theory: str
    rule: str
    ev: Mapping
    best: tuple
    ratifiable: tuple | None = None

    @property
    def action(self):
        return self.best[0]

    def advantage(self, a, b) -> Fraction:
        return self.ev[a] - self.ev[b]


@dataclass(frozen=True)
class PolicyRecommendation:
    theory: str
    best: tuple  # optimal pure policies in canonical order
    value: Fraction
    values: tuple = field(default=(), repr=False)  # ((policy, value), ...)

    @property
    def policy(self) -> dict:
        return self.best[0]


def _argmax(ev: Mapping, order) -> tuple:
    top = max(ev[a] for a in order)
    return tuple(a for a in order if ev[a] == top)


# ------------------------------------------------------------ updateful


def _later(d: Dilemma, infoset: str) -> list[str]:
    s = d.decision(infoset).stage
    return [dp.infoset for dp in d.decisions if dp.stage > s]


def _credence(d: Dilemma, infoset: str, theory: str, rule, history: Mapping,
              future: Mapping) -> tuple[CredenceTable, dict, frozenset]:
    copies = observed_reads(d)
    clamps: dict = {}
    event = {rule_var(i): a for i, a in history.items()}
    if theory.startswith("cdt"):
        for f, a in future.items():
            for t in d.decision(f).tokens:
                clamps[t.name] = a
    else:
        event.update({rule_var(f): a for f, a in future.items()})
    worlds = enumerate_worlds(d, free=frozenset(d.infosets), clamps=clamps, copies=copies)
    if event:
        try:
            worlds = condition(worlds, event)
        except ConditioningError:
            raise UnreachableInfosetError(
                f"history {dict(history)} is impossible before {infoset!r}") from None
    return credence_from(worlds, d, infoset, rule), clamps, copies


def _edt_values(d, cred: CredenceTable, infoset, actions) -> dict:
    rv = rule_var(infoset)
    return {a: cred.condition({rv: a}).expect(d.utility_of) for a in actions}


def _types(d: Dilemma, infoset: str) -> tuple:
    return tuple(d.disposition_for(infoset).parents)


def _type_values(d, cred, infoset, actions):
    """E[U | type, rule = a] and P(type | rule = a) for every type with credence."""
    rv, types = rule_var(infoset), _types(d, infoset)
    by_type = cred.marginal(*types) if len(types) > 1 else {(k,): p for k, p in cred.marginal(*types).items()}
    cond_u, post = {}, {}
    for tau, p in by_type.items():
        if p == 0:
            continue
        ev = dict(zip(types, tau))
        for a in actions:
            try:
                cond_u[tau, a] = cred.condition({**ev, rv: a}).expect(d.utility_of)
            except ConditioningError:
                cond_u[tau, a] = None
    for a in actions:
        given = cred.condition({rv: a})
        m = given.marginal(*types)
        post[a] = {(k if len(types) > 1 else (k,)): p for k, p in m.items()}
    return by_type, cond_u, post


def _tickle_values(d, cred, infoset, actions) -> dict:
    if not _types(d, infoset):
        return _edt_values(d, cred, infoset, actions)
    by_type, cond_u, _ = _type_values(d, cred, infoset, actions)
    out = {}
    for a in actions:
        total = Fraction(0)
        for tau, p in by_type.items():
            u = cond_u.get((tau, a))
            if u is None:
                raise TheoryError(f"type {tau} never takes {a!r} at {infoset!r}; tickle undefined")
            total += p * u
        out[a] = total
    return out


def _ratify(d, cred, infoset, actions) -> tuple[dict, tuple]:
    ev = _edt_values(d, cred, infoset, actions)
    if not _types(d, infoset):
        top = _argmax(ev, actions)
        return ev, top
    _, cond_u, post = _type_values(d, cred, infoset, actions)
    ratifiable = []
    for a in actions:
        # value of switching to b once you know you decided a
        val = {}
        for b in actions:
            total = Fraction(0)
            for tau, p in post[a].items():
                u = cond_u.get((tau, b))
                if p and u is None:
                    raise TheoryError(f"type {tau} never takes {b!r} at {infoset!r}")
                total += p * (u or 0)
            val[b] = total
        if a in _argmax(val, actions):
            ratifiable.append(a)
    return ev, tuple(ratifiable)


def _cdt_values(d, cred, infoset, actions, clamps, copies) -> dict:
    free = frozenset(d.infosets)
    parents = dependencies(d, free=free, clamps=clamps, copies=copies)
    out = {a: Fraction(0) for a in actions}
    plans: dict = {}
    for w, tok, p in cred:
        if tok not in plans:
            # only terms touching redrawn variables change; the rest is fixed per world
            down = descendants(d, [tok], free=free, copies=copies) | {tok}
            moving = tuple(t for t in d.utility if any(k in down for k in t.when))
            fixed = tuple(t for t in d.utility if not any(k in down for k in t.when))
            need = {x for v in down for x in parents.get(v, ())} | {k for t in moving for k in t.when}
            rp = resample_plan(d, [tok], free=free, clamps=clamps, copies=copies)
            plans[tok] = (tuple(sorted(need - down)), moving, fixed, {}, rp)
        keys, moving, fixed, cache, rp = plans[tok]
        base = sum((t.value for t in fixed if t.holds(w)), Fraction(0))
        key = tuple(w[k] for k in keys)
        for a in actions:
            if (key, a) not in cache:
                cache[key, a] = sum((q * sum((t.value for t in moving if t.holds(w2)), Fraction(0))
                                     for w2, q in resample(d, w, {tok: a}, free=free, clamps=clamps,
                                                           copies=copies, plan=rp)), Fraction(0))
            out[a] += p * (base + cache[key, a])
    return out


def _evaluate(d, infoset, theory, rule, history, future, *, _ctx=None) -> Recommendation:
    dp = d.decision(infoset)
    actions = tuple(dp.actions)
    cred, clamps, copies = _ctx or _credence(d, infoset, theory, rule, history, future)
    ratifiable = None
    if theory == "edt":
        ev = _edt_values(d, cred, infoset, actions)
        best = _argmax(ev, actions)
    elif theory == "edt-tickle":
        ev = _tickle_values(d, cred, infoset, actions)
        best = _argmax(ev, actions)
    elif theory == "edt-ratify":
        ev, ratifiable = _ratify(d, cred, infoset, actions)
        if not ratifiable:
            raise NoRatifiableActionError(f"no action is ratifiable at {infoset!r}")
        best = _argmax(ev, ratifiable)
    else:
        ev = _cdt_values(d, cred, infoset, actions, clamps, copies)
        best = _argmax(ev, actions)
    return Recommendation(infoset, theory, as_rule(rule).value, ev, best, ratifiable)


def _status_quo_future(d, infoset) -> dict:
    return {f: d.decision(f).status_quo for f in _later(d, infoset)}


def sophisticated_plan(d: Dilemma, rule="ssa", history: Mapping | None = None,
                       after_stage: int | None = None) -> dict:
    """Backward induction for ``cdt-sophisticated``: later stages first.

    Only stages after ``after_stage`` are planned when it is given.
    Infosets the history makes unreachable are planned at their status quo.
    """
    history = dict(history or {})
    plan: dict = {}
    stages = sorted({dp.stage for dp in d.decisions}, reverse=True)
    if after_stage is not None:
        stages = [st for st in stages if st > after_stage]
    for stage in stages:
        for dp in d.decisions:
            if dp.stage != stage:
                continue
            if dp.infoset in history:
                plan[dp.infoset] = history[dp.infoset]
                continue
            future = {f: plan[f] for f in _later(d, dp.infoset)}
            try:
                rec = _evaluate(d, dp.infoset, "cdt-sophisticated", rule, history, future)
                plan[dp.infoset] = rec.action
            except UnreachableInfosetError:
                plan[dp.infoset] = dp.status_quo
    return plan


def recommend(d: Dilemma, infoset: str, theory: str, rule="ssa", history: Mapping | None = None,
              future: Mapping | None = None) -> Recommendation:
    """Per-action expected values at ``infoset`` under an updateful theory.

    ``history`` maps earlier infosets to the actions taken there; ``future``
    overrides the plan assumed for later infosets.
    """
    check_theory(theory)
    if theory in UPDATELESS:
        raise TheoryError(f"{theory} is updateless; use optimal_policy")
    d.decision(infoset)
    history = dict(history or {})
    if future is None:
        if theory == "cdt-sophisticated":
            plan = sophisticated_plan(d, rule, history, after_stage=d.decision(infoset).stage)
            future = {f: plan[f] for f in _later(d, infoset)}
        else:
            future = _status_quo_future(d, infoset)
    return _evaluate(d, infoset, theory, rule, history, dict(future))


def recommend_many(d: Dilemma, infoset: str, theories, rule="ssa",
                   history: Mapping | None = None) -> dict:
    """``recommend`` for several updateful theories, sharing credence tables."""
    history = dict(history or {})
    out, contexts = {}, {}
    for theory in theories:
        check_theory(theory)
        if theory in UPDATELESS:
            raise TheoryError(f"{theory} is updateless; use optimal_policy")
        if theory == "cdt-sophisticated":
            plan = sophisticated_plan(d, rule, history, after_stage=d.decision(infoset).stage)
            future = {f: plan[f] for f in _later(d, infoset)}
        else:
            future = _status_quo_future(d, infoset)
        key = (theory.startswith("cdt"), tuple(sorted(future.items())))
        if key not in contexts:
            contexts[key] = _credence(d, infoset, theory, rule, history, future)
        out[theory] = _evaluate(d, infoset, theory, rule, history, future, _ctx=contexts[key])
    return out


# ------------------------------------------------------------ updateless


def policy_count(d: Dilemma, infosets=None) -> int:
    n = 1
    for i in (infosets if infosets is not None else d.infosets):
        n *= len(d.decision(i).actions)
    return n


def policy_value(d: Dilemma, pi: Mapping, theory: str, *, _ref: WorldDist | None = None) -> Fraction:
    """Value of a whole pure policy under an updateless theory."""
    if theory == "uedt":
        ref = _ref if _ref is not None else disposition_joint(d, copies=False)
        return condition(ref, {rule_var(i): a for i, a in pi.items()}).expect(d.utility_of)
    return expected_utility(d, pi)


def optimal_policy(d: Dilemma, theory: str, *, bound: int = DEFAULT_POLICY_BOUND,
                   infosets=None, fixed: Mapping | None = None) -> PolicyRecommendation:
    """Enumerate pure policies; ties go to the first in canonical order.

    ``fixed`` pins some infosets; the rest (or ``infosets``) are searched.
    """
    check_theory(theory)
    if theory not in UPDATELESS:
        raise TheoryError(f"{theory} is updateful; use recommend or induced_policy")
    fixed = dict(fixed or {})
    search = tuple(i for i in (infosets if infosets is not None else d.infosets) if i not in fixed)
    n = policy_count(d, search)
    if n > bound:
        raise PolicySpaceError(f"{n} pure policies exceed the bound of {bound}")
    ref = disposition_joint(d, copies=False) if theory == "uedt" else None
    values = []
    for part in pure_policies(d, search):
        pi = {**fixed, **part}
        values.append((pi, policy_value(d, pi, theory, _ref=ref)))
    top = max(v for _, v in values)
    return PolicyRecommendation(theory, tuple(p for p, v in values if v == top), top, tuple(values))


# ------------------------------------------------------------ induced policies


def induced_policy(d: Dilemma, theory: str, rule="ssa", *, max_iter: int = 16,
                   bound: int = DEFAULT_POLICY_BOUND) -> dict:
    """The pure policy a theory ends up playing.

    Updateful theories are evaluated per infoset and iterated to a fixed
    point; infosets that never settle are reported via FixedPointError.
    """
    check_theory(theory)
    if theory in UPDATELESS:
        return dict(optimal_policy(d, theory, bound=bound).policy)
    guess = {dp.infoset: dp.status_quo for dp in d.decisions}
    seen = []
    for _ in range(max_iter):
        nxt = {}
        for dp in d.decisions:
            if theory == "cdt-sophisticated":
                future = {f: guess[f] for f in _later(d, dp.infoset)}
            else:
                future = _status_quo_future(d, dp.infoset)
            try:
                nxt[dp.infoset] = _evaluate(d, dp.infoset, theory, rule, {}, future).action
            except UnreachableInfosetError:
                nxt[dp.infoset] = dp.status_quo
        if nxt == guess or theory != "cdt-sophisticated":
            return nxt
        seen.append(guess)
        guess = nxt
    moving = sorted({i for g in seen[-2:] for i in g if g[i] != guess[i]})
    raise FixedPointError(f"{theory} did not settle after {max_iter} rounds; oscillating at {moving}",
                          moving)
