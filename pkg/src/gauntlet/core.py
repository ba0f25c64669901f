"""Exact-arithmetic influence diagrams with predictors and imperfect recall.

A :class:`Dilemma` holds chance variables, decision infosets (each with one or
more tokens), predictor nodes that read an infoset's decision rule, additive
utility terms and a reference disposition.  Everything numeric is a
:class:`fractions.Fraction`; there is no floating point in this module.

World assignments are plain dicts mapping variable name to value.  Besides the
declared chance, predictor and token variables, a world may carry rule
variables ``rule:<infoset>`` (the decision rule an infoset follows when it is
drawn from the disposition rather than fixed by a policy) and their copies
``rule*:<infoset>`` (an independent draw read by predictors whose output the
infoset itself observes).
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Iterator, Mapping
from dataclasses import dataclass, field, replace
from functools import cached_property
from fractions import Fraction
from typing import Any, Union

Rational = Fraction
Value = Any
Assignment = dict

POLICY_MODE = "reads-candidate-policy"
DISPOSITION_MODE = "reads-disposition"
PREDICTOR_MODES = (POLICY_MODE, DISPOSITION_MODE)


class DilemmaError(Exception):
    """Base class for errors raised while evaluating a dilemma."""


class PolicyCoverageError(DilemmaError):
    pass


class ConditioningError(DilemmaError):
    """Raised when conditioning on an event of probability zero."""


class InterventionError(DilemmaError):
    pass


def rational(x) -> Fraction:
    """Coerce ints, Fractions and ``"a/b"`` strings to a Fraction.

    Floats are rejected so that rounding never leaks into the engine.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}: {x!r}")


def rule_var(infoset: str) -> str:
    return f"rule:{infoset}"


def copy_var(infoset: str) -> str:
    return f"rule*:{infoset}"


@dataclass(frozen=True)
class ChanceVar:
    name: str
    domain: tuple
    parents: tuple = ()
    # parent-value tuple -> {value: probability}
    cpt: Mapping = field(default_factory=dict)

    def row(self, assignment: Mapping) -> Mapping:
        return self.cpt[tuple(assignment[p] for p in self.parents)]


@dataclass(frozen=True)
class Token:
    """One occurrence of an infoset.

    ``guard`` lists the variable values under which the token is active; an
    inactive token takes the value ``None``.  ``moment`` names the observer
    moment the token belongs to, if any.
    """

    name: str
    guard: Mapping = field(default_factory=dict)
    moment: str | None = None


@dataclass(frozen=True)
class DecisionPoint:
    infoset: str
    actions: tuple
    tokens: tuple
    observes: tuple = ()
    stage: int = 1

    @property
    def status_quo(self):
        return self.actions[0]


@dataclass(frozen=True)
class PredictorVar:
    name: str
    reads_infoset: str
    accuracy: Fraction = Fraction(1)
    mode: str = POLICY_MODE


@dataclass(frozen=True)
class Moment:
    label: str
    guard: Mapping = field(default_factory=dict)


@dataclass(frozen=True)
class DispositionRule:
    """Reference-class distribution over an infoset's actions.

    ``parents`` are hidden type variables (e.g. a lesion) the disposition is
    conditioned on; ``table`` maps their value tuple to a distribution.
    """

    parents: tuple = ()
    table: Mapping = field(default_factory=dict)

    def row(self, assignment: Mapping) -> Mapping:
        return self.table[tuple(assignment[p] for p in self.parents)]


@dataclass(frozen=True)
class Term:
    """Additive utility term: ``value`` is earned when every ``when`` entry holds."""

    when: Mapping
    value: Fraction
    tag: str | None = None

    def holds(self, w: Mapping) -> bool:
        return all(w.get(k) == v for k, v in self.when.items())


@dataclass(frozen=True)
class Dilemma:
    name: str
    chance: tuple = ()
    decisions: tuple = ()
    predictors: tuple = ()
    utility: tuple = ()
    disposition: Mapping = field(default_factory=dict)
    moments: tuple = ()
    bets: Any = None
    # infosets whose rule is drawn from the disposition instead of a policy
    free: frozenset = frozenset()
    # token name -> clamped action
    clamps: Mapping = field(default_factory=dict)
    meta: Mapping = field(default_factory=dict)

    def decision(self, infoset: str) -> DecisionPoint:
        for dp in self.decisions:
            if dp.infoset == infoset:
                return dp
        raise KeyError(f"unknown infoset {infoset!r}")

    @property
    def infosets(self) -> tuple:
        return tuple(dp.infoset for dp in self.decisions)

    def token_owner(self, token: str) -> DecisionPoint:
        for dp in self.decisions:
            if any(t.name == token for t in dp.tokens):
                return dp
        raise KeyError(f"unknown token {token!r}")

    def disposition_for(self, infoset: str) -> DispositionRule:
        rule = self.disposition.get(infoset)
        if rule is None:
            actions = self.decision(infoset).actions
            p = Fraction(1, len(actions))
            return DispositionRule((), {(): {a: p for a in actions}})
        return rule

    @cached_property
    def _compiled_terms(self) -> tuple:
        return tuple((tuple(t.when.items()), t.value) for t in self.utility)

    def utility_of(self, w: Mapping) -> Fraction:
        total = Fraction(0)
        get = w.get
        for items, value in self._compiled_terms:
            for k, v in items:
                if get(k) != v:
                    break
            else:
                total += value
        return total

    def tagged_utility(self, w: Mapping, tag: str | None) -> Fraction:
        return sum((t.value for t in self.utility if t.tag == tag and t.holds(w)), Fraction(0))

    def domains(self) -> dict:
        """Finite domain of every declared (non-rule) variable."""
        out = {cv.name: tuple(cv.domain) for cv in self.chance}
        for dp in self.decisions:
            for t in dp.tokens:
                out[t.name] = tuple(dp.actions) + (None,)
        for p in self.predictors:
            try:
                out[p.name] = tuple(self.decision(p.reads_infoset).actions)
            except KeyError:
                out[p.name] = ()
        return out


Policy = Mapping[str, Union[str, Mapping]]


# ---------------------------------------------------------------- worlds


@dataclass(frozen=True)
class WorldDist:
    variables: tuple
    entries: tuple  # ((values...), Fraction)

    def __iter__(self) -> Iterator[tuple[dict, Fraction]]:
        for values, p in self.entries:
            yield dict(zip(self.variables, values)), p

    def __len__(self) -> int:
        return len(self.entries)

    def total(self) -> Fraction:
        return sum((p for _, p in self.entries), Fraction(0))

    def prob(self, event) -> Fraction:
        pred = as_predicate(event)
        return sum((p for w, p in self if pred(w)), Fraction(0))

    def expect(self, fn: Callable[[dict], Fraction]) -> Fraction:
        return sum((p * fn(w) for w, p in self), Fraction(0))

    def marginal(self, *names: str) -> dict:
        out: dict = {}
        for w, p in self:
            key = w[names[0]] if len(names) == 1 else tuple(w[n] for n in names)
            out[key] = out.get(key, Fraction(0)) + p
        return out

    @classmethod
    def from_items(cls, variables: tuple, items: Iterable[tuple[dict, Fraction]]) -> WorldDist:
        acc: dict = {}
        for w, p in items:
            if p == 0:
                continue
            key = tuple(w[v] for v in variables)
            acc[key] = acc.get(key, Fraction(0)) + p
        return cls(tuple(variables), tuple(acc.items()))


def as_predicate(event) -> Callable[[Mapping], bool]:
    if callable(event):
        return event
    items = dict(event).items()
    return lambda w: all(w.get(k) == v for k, v in items)


def condition(w: WorldDist, event) -> WorldDist:
    """Exact Bayes conditioning; zero-probability events raise."""
    pred = as_predicate(event)
    kept = [(vals, p) for vals, p in w.entries if pred(dict(zip(w.variables, vals)))]
    z = sum((p for _, p in kept), Fraction(0))
    if z == 0:
        raise ConditioningError("conditioning event has probability zero")
    return WorldDist(w.variables, tuple((vals, p / z) for vals, p in kept))


# ------------------------------------------------------------ enumeration


def _predict(source: Mapping, actions: tuple, accuracy: Fraction) -> dict:
    """Prediction distribution given a distribution over the read action."""
    out: dict = {}
    n_other = len(actions) - 1
    for b, pb in source.items():
        if n_other == 0:
            out[b] = out.get(b, Fraction(0)) + pb
            continue
        out[b] = out.get(b, Fraction(0)) + pb * accuracy
        miss = pb * (1 - accuracy) / n_other
        for c in actions:
            if c != b:
                out[c] = out.get(c, Fraction(0)) + miss
    return out


def _guard_ok(guard: Mapping, w: Mapping) -> bool:
    return all(w.get(k) == v for k, v in guard.items())


def _policy_row(policy: Policy, infoset: str) -> Mapping:
    rule = policy[infoset]
    if isinstance(rule, Mapping):
        return {a: rational(p) for a, p in rule.items()}
    return {rule: Fraction(1)}


@dataclass
class _Node:
    name: str
    deps: tuple
    kernel: Callable[[Mapping], Mapping]


def _nodes(d: Dilemma, policy: Policy | None, free: frozenset, clamps: Mapping,
           copies: frozenset) -> list[_Node]:
    policy = policy or {}
    nodes: list[_Node] = []
    for cv in d.chance:
        nodes.append(_Node(cv.name, tuple(cv.parents), cv.row))
    for infoset in sorted(free):
        disp = d.disposition_for(infoset)
        nodes.append(_Node(rule_var(infoset), tuple(disp.parents), disp.row))
        if infoset in copies:
            nodes.append(_Node(copy_var(infoset), tuple(disp.parents), disp.row))
    for pv in d.predictors:
        nodes.append(_predictor_node(d, pv, policy, free, copies))
    for dp in d.decisions:
        for tok in dp.tokens:
            nodes.append(_token_node(dp, tok, policy, free, clamps))
    return _toposort(nodes)


def _predictor_node(d, pv, policy, free, copies) -> _Node:
    dp = d.decision(pv.reads_infoset)
    actions = tuple(dp.actions)
    infoset = pv.reads_infoset
    if pv.mode == DISPOSITION_MODE:
        disp = d.disposition_for(infoset)
        return _Node(pv.name, tuple(disp.parents),
                     lambda w: _predict(disp.row(w), actions, pv.accuracy))
    if infoset in free:
        src = copy_var(infoset) if infoset in copies else rule_var(infoset)
        return _Node(pv.name, (src,),
                     lambda w: _predict({w[src]: Fraction(1)}, actions, pv.accuracy))
    if infoset not in policy:
        raise PolicyCoverageError(f"policy does not cover infoset {infoset!r} read by {pv.name!r}")
    row = _policy_row(policy, infoset)
    return _Node(pv.name, (), lambda w: _predict(row, actions, pv.accuracy))


def _token_node(dp, tok, policy, free, clamps) -> _Node:
    guard = dict(tok.guard)
    deps = tuple(guard)
    if tok.name in clamps:
        a = clamps[tok.name]
        if a not in dp.actions:
            raise InterventionError(f"{a!r} is not an action of {dp.infoset!r}")
        row = {a: Fraction(1)}
        kernel = lambda w: row if _guard_ok(guard, w) else {None: Fraction(1)}
    elif dp.infoset in free:
        src = rule_var(dp.infoset)
        deps = deps + (src,)
        kernel = lambda w: {w[src]: Fraction(1)} if _guard_ok(guard, w) else {None: Fraction(1)}
    else:
        if dp.infoset not in policy:
            raise PolicyCoverageError(f"policy does not cover infoset {dp.infoset!r}")
        row = _policy_row(policy, dp.infoset)
        kernel = lambda w: row if _guard_ok(guard, w) else {None: Fraction(1)}
    return _Node(tok.name, deps, kernel)


def _toposort(nodes: list[_Node]) -> list[_Node]:
    by_name = {n.name: n for n in nodes}
    order: list[_Node] = []
    state: dict = {}

    def visit(n: _Node, stack: tuple):
        s = state.get(n.name)
        if s == 2:
            return
        if s == 1:
            raise DilemmaError(f"cycle through {' -> '.join(stack + (n.name,))}")
        state[n.name] = 1
        for dep in n.deps:
            if dep in by_name:
                visit(by_name[dep], stack + (n.name,))
        state[n.name] = 2
        order.append(n)

    for n in nodes:
        visit(n, ())
    return order


def enumerate_worlds(d: Dilemma, policy: Policy | None = None, *, free=None, clamps=None,
                     copies=frozenset()) -> WorldDist:
    """Exact joint over every variable, by branching in topological order."""
    free = frozenset(d.free if free is None else free)
    clamps = dict(d.clamps if clamps is None else clamps)
    nodes = _nodes(d, policy, free, clamps, frozenset(copies))
    partial: list[tuple[dict, Fraction]] = [({}, Fraction(1))]
    for node in nodes:
        nxt = []
        rows: dict = {}  # kernels are pure in their dependencies
        for w, p in partial:
            key = tuple(w.get(x) for x in node.deps)
            row = rows.get(key)
            if row is None:
                row = rows[key] = [(v, q) for v, q in node.kernel(w).items() if q != 0]
            for v, q in row:
                w2 = dict(w)
                w2[node.name] = v
                nxt.append((w2, p if q == 1 else p * q))
        partial = nxt
    return WorldDist.from_items(tuple(n.name for n in nodes), partial)


def descendants(d: Dilemma, names: Iterable[str], *, free=None, copies=frozenset()) -> set:
    """Variables downstream of ``names`` in the dependency graph used for ``free``."""
    free = frozenset(d.infosets if free is None else free)
    stub = {dp.infoset: dp.actions[0] for dp in d.decisions}
    nodes = _nodes(d, stub, free, {}, frozenset(copies))
    out = set(names)
    changed = True
    while changed:
        changed = False
        for n in nodes:
            if n.name not in out and any(dep in out for dep in n.deps):
                out.add(n.name)
                changed = True
    return out - set(names)


def dependencies(d: Dilemma, *, free, clamps=None, copies=frozenset()) -> dict:
    """Variable -> the variables its kernel reads."""
    stub = {dp.infoset: dp.actions[0] for dp in d.decisions}
    return {n.name: tuple(n.deps) for n in _nodes(d, stub, frozenset(free), dict(clamps or {}),
                                                   frozenset(copies))}


@dataclass(frozen=True)
class ResamplePlan:
    """Precomputed node order and descendant set for repeated resampling."""

    nodes: tuple
    down: frozenset


def resample_plan(d: Dilemma, targets: Iterable[str], *, free, clamps=None,
                  copies=frozenset()) -> ResamplePlan:
    stub = {dp.infoset: dp.actions[0] for dp in d.decisions}
    nodes = _nodes(d, stub, frozenset(free), dict(clamps or {}), frozenset(copies))
    return ResamplePlan(tuple(nodes), frozenset(descendants(d, targets, free=free, copies=copies)))


def resample(d: Dilemma, w: Mapping, overrides: Mapping, *, free, clamps=None,
             copies=frozenset(), plan: ResamplePlan | None = None) -> list[tuple[dict, Fraction]]:
    """Distribution over worlds after forcing ``overrides`` in world ``w``.

    Non-descendants of the overridden variables keep their values in ``w``;
    descendants are redrawn from their kernels.
    """
    plan = plan or resample_plan(d, overrides, free=free, clamps=clamps, copies=copies)
    down = plan.down
    partial: list[tuple[dict, Fraction]] = [({}, Fraction(1))]
    for node in plan.nodes:
        nxt = []
        for cur, p in partial:
            if node.name in overrides:
                cur[node.name] = overrides[node.name]
                nxt.append((cur, p))
            elif node.name in down:
                for v, q in node.kernel(cur).items():
                    if q:
                        c2 = dict(cur)
                        c2[node.name] = v
                        nxt.append((c2, p * q))
            else:
                cur[node.name] = w[node.name]
                nxt.append((cur, p))
        partial = nxt
    return partial


def _check_coverage(d: Dilemma, policy: Policy):
    for dp in d.decisions:
        if dp.infoset in d.free:
            continue
        if all(t.name in d.clamps for t in dp.tokens):
            continue
        if dp.infoset not in policy:
            raise PolicyCoverageError(f"policy does not cover infoset {dp.infoset!r}")
        for a in _policy_row(policy, dp.infoset):
            if a not in dp.actions:
                raise PolicyCoverageError(f"{a!r} is not an action of {dp.infoset!r}")


def joint(d: Dilemma, pi: Policy) -> WorldDist:
    """Exact joint distribution over all variables when the agent plays ``pi``."""
    _check_coverage(d, pi)
    return enumerate_worlds(d, pi)


def expected_utility(d: Dilemma, pi: Policy) -> Fraction:
    return joint(d, pi).expect(d.utility_of)


def intervene(d: Dilemma, infoset: str, token: str, a) -> Dilemma:
    """Clamp a single token; the rest of the infoset follows the disposition.

    Predictors keep reading the infoset's disposition-drawn rule, so the
    dependence they carry on the agent's rule survives the surgery.
    """
    dp = d.decision(infoset)
    if token not in {t.name for t in dp.tokens}:
        raise InterventionError(f"token {token!r} does not belong to {infoset!r}")
    if a not in dp.actions:
        raise InterventionError(f"{a!r} is not an action of {infoset!r}")
    return replace(d, free=d.free | {infoset}, clamps={**d.clamps, token: a})


def disposition_joint(d: Dilemma, *, copies=True, clamps=None) -> WorldDist:
    """Reference-class joint: every infoset's rule drawn from the disposition."""
    return enumerate_worlds(d, free=frozenset(d.infosets), clamps=clamps or {},
                            copies=observed_reads(d) if copies else frozenset())


def observed_reads(d: Dilemma) -> frozenset:
    """Infosets read by a predictor whose output that same infoset observes."""
    out = set()
    for pv in d.predictors:
        try:
            dp = d.decision(pv.reads_infoset)
        except KeyError:
            continue
        if pv.name in dp.observes:
            out.add(dp.infoset)
    return frozenset(out)


def pure_policies(d: Dilemma, infosets: Iterable[str] | None = None) -> Iterator[dict]:
    """All pure policies in canonical order (declaration order, action order)."""
    infosets = tuple(infosets if infosets is not None else d.infosets)
    choices = [d.decision(i).actions for i in infosets]
    for combo in itertools.product(*choices):
        yield dict(zip(infosets, combo))


# ------------------------------------------------------------- validation


@dataclass(frozen=True)
class Issue:
    kind: str
    where: str
    message: str
    severity: str = "error"

    def __str__(self):
        return f"[{self.severity}] {self.kind} at {self.where}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.issues

    def __bool__(self):
        return bool(self.issues)

    def kinds(self) -> set:
        return {i.kind for i in self.issues}


def validate(d: Dilemma) -> ValidationReport:
    """Report every violated structural invariant; never raises."""
    issues: list[Issue] = []
    add = lambda kind, where, msg, sev="error": issues.append(Issue(kind, where, msg, sev))

    names: list[str] = [cv.name for cv in d.chance] + [p.name for p in d.predictors]
    names += [t.name for dp in d.decisions for t in dp.tokens]
    seen = set()
    for n in names:
        if n in seen:
            add("duplicate-name", n, "variable name used twice")
        seen.add(n)
    infosets = [dp.infoset for dp in d.decisions]
    if len(set(infosets)) != len(infosets):
        add("duplicate-name", "decisions", "infoset declared twice")
    domains = d.domains()

    def check_refs(mapping: Mapping, where: str):
        for k, v in mapping.items():
            if k not in domains:
                add("unknown-variable", where, f"references unknown variable {k!r}")
            elif v not in domains[k]:
                add("unknown-value", where, f"{v!r} is not a value of {k!r}")

    for cv in d.chance:
        if not cv.domain:
            add("empty-domain", cv.name, "chance variable has an empty domain")
        bad_parent = False
        for p in cv.parents:
            if p not in domains:
                add("unknown-variable", cv.name, f"unknown parent {p!r}")
                bad_parent = True
        if bad_parent:
            continue
        for key in itertools.product(*(domains[p] for p in cv.parents)):
            row = cv.cpt.get(tuple(key))
            if row is None:
                add("missing-cpt-row", f"{cv.name}{list(key)}", "no distribution for this parent assignment")
                continue
            _check_row(add, "cpt-row-sum", f"{cv.name}{list(key)}", row, cv.domain, full_support=False)

    for dp in d.decisions:
        if not dp.actions:
            add("no-actions", dp.infoset, "infoset offers no actions")
        if len(set(dp.actions)) != len(dp.actions):
            add("duplicate-action", dp.infoset, "repeated action")
        if not dp.tokens:
            add("no-tokens", dp.infoset, "infoset has no tokens")
        for t in dp.tokens:
            check_refs(t.guard, f"{dp.infoset}/{t.name}")
        for o in dp.observes:
            if o not in domains:
                add("unknown-variable", dp.infoset, f"observes unknown variable {o!r}")

    for pv in d.predictors:
        if pv.reads_infoset not in infosets:
            add("predictor-target", pv.name,
                f"reads infoset {pv.reads_infoset!r} which does not exist; no fixed point")
        if not (Fraction(1, 2) <= pv.accuracy <= 1):
            add("accuracy-range", pv.name, f"accuracy {pv.accuracy} outside [1/2, 1]")
        if pv.mode not in PREDICTOR_MODES:
            add("predictor-mode", pv.name, f"unknown mode {pv.mode!r}")

    for infoset, rule in d.disposition.items():
        if infoset not in infosets:
            add("disposition-target", infoset, "disposition for unknown infoset")
            continue
        actions = d.decision(infoset).actions
        if any(p not in domains for p in rule.parents):
            add("unknown-variable", f"disposition[{infoset}]", "unknown type variable")
            continue
        for key in itertools.product(*(domains[p] for p in rule.parents)):
            row = rule.table.get(tuple(key))
            if row is None:
                add("missing-disposition-row", f"disposition[{infoset}]{list(key)}", "missing row")
                continue
            _check_row(add, "disposition-row-sum", f"disposition[{infoset}]{list(key)}", row,
                       actions, full_support=True)

    for i, term in enumerate(d.utility):
        check_refs(term.when, f"utility[{i}]")
    for m in d.moments:
        check_refs(m.guard, f"moment[{m.label}]")
    for tok, a in d.clamps.items():
        try:
            if a not in d.token_owner(tok).actions:
                add("bad-clamp", tok, f"{a!r} is not an action")
        except KeyError:
            add("bad-clamp", tok, "clamp on unknown token")

    if not issues:
        try:
            w = disposition_joint(d, copies=False)
        except DilemmaError as exc:
            add("cycle", d.name, str(exc))
        else:
            for dp in d.decisions:
                reach = w.prob(lambda a, dp=dp: any(a[t.name] is not None for t in dp.tokens))
                if reach == 0:
                    readers = [p.name for p in d.predictors if p.reads_infoset == dp.infoset]
                    msg = "infoset unreachable under every policy"
                    if readers:
                        msg += f"; predictors {readers} read it, so their fixed point is undetermined"
                    add("unreachable", dp.infoset, msg)
    return ValidationReport(tuple(issues))


def _check_row(add, kind, where, row: Mapping, domain, full_support: bool):
    for v, p in row.items():
        if v not in domain:
            add("unknown-value", where, f"{v!r} not in domain")
        if p < 0:
            add("negative-probability", where, f"P({v!r}) = {p}")
    if sum(row.values(), Fraction(0)) != 1:
        add(kind, where, f"row sums to {sum(row.values(), Fraction(0))}, not 1")
    if full_support:
        for v in domain:
            if row.get(v, 0) <= 0:
                add("zero-support", where, f"action {v!r} has no support")
