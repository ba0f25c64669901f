"""JSON dilemma documents.  Rationals travel as "a/b" strings (or integers)."""

from __future__ import annotations

import json
import re
from math import gcd
from fractions import Fraction
from pathlib import Path

from .bets import Bet, BetMenu, bind_bets
from .core import (ChanceVar, DecisionPoint, Dilemma, DispositionRule, Moment, PredictorVar,
                   Term, Token, validate)
from .exploit import strip_bets

FORMAT_VERSION = 1
_RATIONAL = re.compile(r"^\s*(-?\d+)(?:/(-?\d+))?\s*$")


class DilemmaFileError(ValueError):
    """Carries every problem found, each prefixed with its location."""

    def __init__(self, problems, kind="schema"):
        self.problems = list(problems)
        self.kind = kind
        super().__init__("\n".join(self.problems))


def parse_rational(x, where: str = "value") -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise DilemmaFileError([f"{where}: expected an integer or \"a/b\" string, got {x!r}"], "rational")
    if isinstance(x, int):
        return Fraction(x)
    m = _RATIONAL.match(x)
    if not m:
        raise DilemmaFileError([f"{where}: malformed rational {x!r}"], "rational")
    num, den = int(m.group(1)), int(m.group(2) or 1)
    if den == 0:
        raise DilemmaFileError([f"{where}: zero denominator in {x!r}"], "rational")
    if den < 0 or gcd(num, den) != 1:
        raise DilemmaFileError([f"{where}: rational {x!r} is not in reduced form"], "rational")
    return Fraction(num, den)


def format_rational(q) -> str:
    return str(Fraction(q))


# ------------------------------------------------------------ export


def _scalar(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else format_rational(v)
    if isinstance(v, (list, tuple)):
        return [_scalar(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _scalar(x) for k, x in v.items()}
    return v


def _rows(table) -> list:
    return [{"given": list(k), "probs": {str(v): format_rational(p) for v, p in row.items()}}
            for k, row in table.items()]


def to_document(d: Dilemma) -> dict:
    base = strip_bets(d)
    doc = {
        "format": FORMAT_VERSION,
        "name": d.name,
        "chance": [{"name": cv.name, "domain": list(cv.domain), "parents": list(cv.parents),
                    "cpt": _rows(cv.cpt)} for cv in base.chance],
        "decisions": [{"infoset": dp.infoset, "actions": list(dp.actions), "observes": list(dp.observes),
                       "stage": dp.stage,
                       "tokens": [{"name": t.name, "guard": dict(t.guard), "moment": t.moment}
                                  for t in dp.tokens]} for dp in base.decisions],
        "predictors": [{"name": p.name, "reads_infoset": p.reads_infoset,
                        "accuracy": format_rational(p.accuracy), "mode": p.mode} for p in base.predictors],
        "utility": {"terms": [{"when": dict(t.when), "value": format_rational(t.value), "tag": t.tag}
                              for t in base.utility]},
        "disposition": {i: {"parents": list(r.parents), "table": _rows(r.table)}
                        for i, r in base.disposition.items()},
        "moments": [{"label": m.label, "guard": dict(m.guard)} for m in base.moments],
        "bets": [{"name": b.name, "offer": b.offer, "var": b.var,
                  "payoffs": {str(v): format_rational(p) for v, p in b.payoffs.items()}}
                 for b in (d.bets or ())],
        "meta": _scalar(dict(d.meta)),
    }
    return doc


def dumps(d: Dilemma) -> str:
    return json.dumps(to_document(d), indent=2, sort_keys=False, ensure_ascii=False) + "\n"


def export_dilemma(d: Dilemma, path) -> None:
    Path(path).write_text(dumps(d), encoding="utf-8")


# ------------------------------------------------------------ import


class _Reader:
    def __init__(self):
        self.problems: list[str] = []

    def need(self, obj, key, where, kind=None, default=...):
        if not isinstance(obj, dict) or key not in obj:
            if default is not ...:
                return default
            self.problems.append(f"{where}: missing key {key!r}")
            return None
        v = obj[key]
        if kind is not None and not isinstance(v, kind):
            self.problems.append(f"{where}.{key}: expected {getattr(kind, '__name__', kind)}")
            return None
        return v

    def rat(self, x, where):
        try:
            return parse_rational(x, where)
        except DilemmaFileError as exc:
            self.problems.extend(exc.problems)
            return None

    def dist(self, probs, domain, where):
        if not isinstance(probs, dict):
            self.problems.append(f"{where}: expected an object of probabilities")
            return {}
        lookup = {str(v): v for v in domain}
        out = {}
        for k, p in probs.items():
            if k not in lookup:
                self.problems.append(f"{where}: {k!r} is not in the domain")
                continue
            q = self.rat(p, f"{where}[{k}]")
            if q is not None:
                out[lookup[k]] = q
        return out

    def table(self, rows, domain, where):
        out = {}
        for i, row in enumerate(rows or []):
            given = self.need(row, "given", f"{where}[{i}]", list)
            probs = self.need(row, "probs", f"{where}[{i}]", dict)
            if given is None or probs is None:
                continue
            out[tuple(given)] = self.dist(probs, domain, f"{where}[given={given}]")
        return out


def _tuplify(v):
    if isinstance(v, list):
        return tuple(_tuplify(x) for x in v)
    if isinstance(v, dict):
        return {k: _tuplify(x) for k, x in v.items()}
    return v


def from_document(doc) -> Dilemma:
    """Build and validate a dilemma; raises DilemmaFileError listing every problem."""
    r = _Reader()
    if not isinstance(doc, dict):
        raise DilemmaFileError(["document: expected a JSON object"])
    name = r.need(doc, "name", "document", str) or "unnamed"
    chance = []
    for i, c in enumerate(r.need(doc, "chance", "document", list, []) or []):
        where = f"chance[{i}]"
        cname = r.need(c, "name", where, str)
        domain = tuple(r.need(c, "domain", where, list) or ())
        parents = tuple(r.need(c, "parents", where, list, []) or ())
        cpt = r.table(r.need(c, "cpt", where, list), domain, f"{where}.cpt")
        if cname:
            chance.append(ChanceVar(cname, domain, parents, cpt))
    decisions = []
    for i, dd in enumerate(r.need(doc, "decisions", "document", list, []) or []):
        where = f"decisions[{i}]"
        tokens = []
        for j, t in enumerate(r.need(dd, "tokens", where, list) or []):
            tname = r.need(t, "name", f"{where}.tokens[{j}]", str)
            if tname:
                tokens.append(Token(tname, dict(r.need(t, "guard", f"{where}.tokens[{j}]", dict, {})),
                                    r.need(t, "moment", where, None, None)))
        infoset = r.need(dd, "infoset", where, str)
        if infoset:
            decisions.append(DecisionPoint(infoset, tuple(r.need(dd, "actions", where, list) or ()),
                                           tuple(tokens), tuple(r.need(dd, "observes", where, list, [])),
                                           int(r.need(dd, "stage", where, int, 1))))
    predictors = []
    for i, p in enumerate(r.need(doc, "predictors", "document", list, []) or []):
        where = f"predictors[{i}]"
        pname, reads = r.need(p, "name", where, str), r.need(p, "reads_infoset", where, str)
        acc = r.rat(r.need(p, "accuracy", where, None, 1), f"{where}.accuracy")
        if pname and reads and acc is not None:
            predictors.append(PredictorVar(pname, reads, acc,
                                           r.need(p, "mode", where, str, "reads-candidate-policy")))
    terms = []
    util = r.need(doc, "utility", "document", dict, {"terms": []}) or {}
    for i, t in enumerate(r.need(util, "terms", "utility", list, []) or []):
        where = f"utility.terms[{i}]"
        when = r.need(t, "when", where, dict)
        val = r.rat(r.need(t, "value", where), f"{where}.value")
        if when is not None and val is not None:
            terms.append(Term(dict(when), val, r.need(t, "tag", where, None, None)))
    by_infoset = {dp.infoset: dp for dp in decisions}
    disposition = {}
    for infoset, rule in (r.need(doc, "disposition", "document", dict, {}) or {}).items():
        where = f"disposition[{infoset}]"
        actions = by_infoset[infoset].actions if infoset in by_infoset else ()
        if infoset not in by_infoset:
            r.problems.append(f"{where}: unknown infoset")
        disposition[infoset] = DispositionRule(tuple(r.need(rule, "parents", where, list, [])),
                                               r.table(r.need(rule, "table", where, list), actions,
                                                       f"{where}.table"))
    moments = tuple(Moment(r.need(m, "label", f"moments[{i}]", str) or "", dict(r.need(m, "guard", "", dict, {})))
                    for i, m in enumerate(r.need(doc, "moments", "document", list, []) or []))
    meta = _tuplify(r.need(doc, "meta", "document", dict, {}) or {})
    d = Dilemma(name, tuple(chance), tuple(decisions), tuple(predictors), tuple(terms),
                disposition, moments, meta=meta)
    bets = []
    domains = d.domains()
    for i, b in enumerate(r.need(doc, "bets", "document", list, []) or []):
        where = f"bets[{i}]"
        var = r.need(b, "var", where, str)
        dom = [v for v in domains.get(var, ()) if v is not None]
        if var is not None and var not in domains:
            r.problems.append(f"{where}: bet on undefined variable {var!r}")
        payoffs = r.dist(r.need(b, "payoffs", where, dict) or {}, dom, f"{where}.payoffs")
        bets.append(Bet(r.need(b, "name", where, str) or f"bet{i}", r.need(b, "offer", where, str) or "pre",
                        var or "", payoffs))
    if r.problems:
        raise DilemmaFileError(r.problems, "schema")
    report = validate(d)
    if not report.ok:
        raise DilemmaFileError([str(i) for i in report.issues], "validation")
    if bets:
        try:
            d = bind_bets(d, BetMenu(tuple(bets)))
        except (KeyError, ValueError) as exc:
            raise DilemmaFileError([f"bets: {exc}"], "validation") from None
    return d


def loads(text: str) -> Dilemma:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DilemmaFileError([f"line {exc.lineno}, column {exc.colno}: {exc.msg}"], "syntax") from None
    return from_document(doc)


def parse_dilemma(path) -> Dilemma:
    return loads(Path(path).read_text(encoding="utf-8"))
