"""Builders for every dilemma in the catalog, with documented default parameters.

Defaults reproduce the printed payoffs wherever they exist.  Magnitudes that
are never stated (cancer cost, blackmail harm, lesion statistics, the
insurance conditional) are ordinary parameters with chosen defaults.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bets import PRE, Bet, BetMenu, bind_bets
from .core import (ChanceVar, DecisionPoint, Dilemma, DispositionRule, Moment, PredictorVar,
                   Term, Token, rational)
from .divergence import GameSpec

F = Fraction


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Param:
    default: object
    doc: str
    kind: str = "rational"  # or "int"


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    params: dict
    topic: str

    def defaults(self) -> dict:
        return {k: p.default for k, p in self.params.items()}


def _coin(name, a, b, pa=F(1, 2)):
    return ChanceVar(name, (a, b), (), {(): {a: pa, b: 1 - pa}})


def _det(name, domain, parents, fn, parent_domains):
    import itertools
    cpt = {}
    for key in itertools.product(*parent_domains):
        v = fn(*key)
        cpt[key] = {v: F(1)}
    return ChanceVar(name, domain, parents, cpt)


def _prob(x, name, lo=0, hi=1, open_=True):
    if open_ and not (lo < x < hi) or not open_ and not (lo <= x <= hi):
        raise ScenarioError(f"{name}={x} outside {'(' if open_ else '['}{lo}, {hi}{')' if open_ else ']'}")


# ------------------------------------------------------------------ builders


def newcomb(big=1_000_000, small=1_000, accuracy=1):
    _prob(accuracy, "accuracy", F(1, 2), 1, open_=False)
    return Dilemma(
        "newcomb",
        decisions=(DecisionPoint("choose", ("one-box", "two-box"), (Token("choose"),)),),
        predictors=(PredictorVar("prediction", "choose", accuracy),),
        utility=(Term({"prediction": "one-box"}, big), Term({"choose": "two-box"}, small)),
    )


def transparent_newcomb(big=1_000_000, small=1_000, accuracy=1):
    _prob(accuracy, "accuracy", F(1, 2), 1, open_=False)
    # the predictor reads the rule at the full-box infoset
    full = DecisionPoint("full", ("one-box", "two-box"),
                         (Token("full", {"prediction": "one-box"}),), ("prediction",))
    empty = DecisionPoint("empty", ("one-box", "two-box"),
                          (Token("empty", {"prediction": "two-box"}),), ("prediction",))
    return Dilemma(
        "transparent-newcomb",
        decisions=(full, empty),
        predictors=(PredictorVar("prediction", "full", accuracy),),
        utility=(Term({"prediction": "one-box"}, big), Term({"full": "two-box"}, small),
                 Term({"empty": "two-box"}, small)),
    )


def counterfactual_mugging(ask=1, reward=10, p_heads=F(1, 2), accuracy=1):
    _prob(p_heads, "p_heads")
    return Dilemma(
        "counterfactual-mugging",
        chance=(_coin("coin", "heads", "tails", p_heads),),
        decisions=(DecisionPoint("asked", ("refuse", "pay"),
                                 (Token("asked", {"coin": "tails"}),), ("coin",)),),
        predictors=(PredictorVar("prediction", "asked", accuracy),),
        utility=(Term({"coin": "heads", "prediction": "pay"}, reward), Term({"asked": "pay"}, -ask)),
    )


def money_pump(rounds=3, loss=1, gain=3, accuracy=1):
    if not 1 <= rounds <= 8:
        raise ScenarioError("rounds must lie in [1, 8]")
    decisions, predictors, terms = [], [], []
    for k in range(1, rounds + 1):
        play, box, pred = f"play{k}", f"box{k}", f"pred{k}"
        decisions.append(DecisionPoint(play, ("decline", "play"), (Token(play),), (), 2 * k - 1))
        decisions.append(DecisionPoint(box, ("A", "B"), (Token(box, {play: "play"}),), (), 2 * k))
        predictors.append(PredictorVar(pred, box, accuracy))
        for b, other in (("A", "B"), ("B", "A")):
            terms.append(Term({box: b, pred: b}, -loss, tag=f"round{k}"))
            terms.append(Term({box: b, pred: other}, gain, tag=f"round{k}"))
    return Dilemma("money-pump", decisions=tuple(decisions), predictors=tuple(predictors),
                   utility=tuple(terms), meta={"rounds": rounds})


def smoking_lesion(smoke_bonus=1, cancer_cost=100, p_lesion=F(1, 2),
                   p_smoke_lesion=F(9, 10), p_smoke_no_lesion=F(1, 10)):
    for n, v in (("p_lesion", p_lesion), ("p_smoke_lesion", p_smoke_lesion),
                 ("p_smoke_no_lesion", p_smoke_no_lesion)):
        _prob(v, n)
    lesion = _coin("lesion", "yes", "no", p_lesion)
    cancer = _det("cancer", ("yes", "no"), ("lesion",), lambda l: l, [("yes", "no")])
    disp = DispositionRule(("lesion",), {
        ("yes",): {"smoke": p_smoke_lesion, "abstain": 1 - p_smoke_lesion},
        ("no",): {"smoke": p_smoke_no_lesion, "abstain": 1 - p_smoke_no_lesion},
    })
    return Dilemma(
        "smoking-lesion", chance=(lesion, cancer),
        decisions=(DecisionPoint("smoke", ("abstain", "smoke"), (Token("smoke"),)),),
        utility=(Term({"smoke": "smoke"}, smoke_bonus), Term({"cancer": "yes"}, -cancer_cost)),
        disposition={"smoke": disp},
    )


def xor_blackmail(fee=100, harm=1_000_000, p_lesion=F(1, 100), accuracy=1):
    _prob(p_lesion, "p_lesion")
    lesion = _coin("lesion", "yes", "no", p_lesion)
    letter = _det("letter_sent", ("yes", "no"), ("prediction", "lesion"),
                  lambda pred, les: "yes" if (pred == "pay") != (les == "yes") else "no",
                  [("refuse", "pay"), ("yes", "no")])
    return Dilemma(
        "xor-blackmail", chance=(lesion, letter),
        decisions=(DecisionPoint("letter", ("refuse", "pay"),
                                 (Token("letter", {"letter_sent": "yes"}),), ("letter_sent",)),),
        predictors=(PredictorVar("prediction", "letter", accuracy),),
        utility=(Term({"letter": "pay"}, -fee), Term({"lesion": "yes"}, -harm)),
    )


def insurance(c=F(2, 5), q=F(4, 5), smoke_lesion=-1, smoke_no_lesion=1,
              bet_match=F(1, 2), bet_mismatch=F(-3, 2)):
    """Smoke, then bet that (lesion iff smoked).

    ``c`` is the prior credence in the lesion; ``q`` is both P(lesion | smoke)
    and P(no lesion | abstain) in the reference population.  The disposition
    is derived so that these hold together, which needs 1 - q < c < q.
    """
    _prob(q, "q", F(1, 2), 1)
    if not (1 - q < c < q):
        raise ScenarioError(f"prior c={c} must lie strictly between 1-q and q")
    s = (c - (1 - q)) / (2 * q - 1)  # P(smoke) in the population
    disp = DispositionRule(("lesion",), {
        ("yes",): {"smoke": q * s / c, "abstain": 1 - q * s / c},
        ("no",): {"smoke": (1 - q) * s / (1 - c), "abstain": 1 - (1 - q) * s / (1 - c)},
    })
    decisions = (
        DecisionPoint("smoke", ("abstain", "smoke"), (Token("smoke"),), (), 1),
        DecisionPoint("bet-after-smoke", ("no-bet", "bet"),
                      (Token("bet-after-smoke", {"smoke": "smoke"}),), ("smoke",), 2),
        DecisionPoint("bet-after-abstain", ("no-bet", "bet"),
                      (Token("bet-after-abstain", {"smoke": "abstain"}),), ("smoke",), 2),
    )
    terms = (
        Term({"smoke": "smoke", "lesion": "yes"}, smoke_lesion),
        Term({"smoke": "smoke", "lesion": "no"}, smoke_no_lesion),
        Term({"bet-after-smoke": "bet", "lesion": "yes"}, bet_match, tag="insurance"),
        Term({"bet-after-smoke": "bet", "lesion": "no"}, bet_mismatch, tag="insurance"),
        Term({"bet-after-abstain": "bet", "lesion": "no"}, bet_match, tag="insurance"),
        Term({"bet-after-abstain": "bet", "lesion": "yes"}, bet_mismatch, tag="insurance"),
    )
    return Dilemma("insurance", chance=(_coin("lesion", "yes", "no", c),), decisions=decisions,
                   utility=terms, disposition={"smoke": disp})


def sleeping_beauty_classic(bet1_heads=-13, bet1_tails=16, bet2_heads=11, bet2_tails=-9,
                            with_bets=1):
    awake = DecisionPoint("awake", ("wait",), (Token("mon", {}, "Mon"),
                                               Token("tue", {"coin": "tails"}, "Tue")), (), 1)
    d = Dilemma("sleeping-beauty-classic", chance=(_coin("coin", "heads", "tails"),),
                decisions=(awake,),
                moments=(Moment("Mon"), Moment("Tue", {"coin": "tails"})))
    menu = BetMenu((
        Bet("bet1", PRE, "coin", {"heads": bet1_heads, "tails": bet1_tails}),
        Bet("bet2", "awake", "coin", {"heads": bet2_heads, "tails": bet2_tails}),
    ))
    return bind_bets(d, menu) if with_bets else d


def sleeping_beauty_wbg(bet1_grey=22, bet1_opposite=-20, bet2_grey=-24, bet2_opposite=9,
                        with_bets=1):
    # Monday room is white or black; Tuesday room is grey or the opposite colour.
    room = DecisionPoint("colored-room", ("wait",),
                         (Token("mon", {}, "Mon"), Token("tue", {"coin2": "opposite"}, "Tue")), (), 1)
    d = Dilemma("sleeping-beauty-wbg",
                chance=(_coin("coin1", "white", "black"), _coin("coin2", "grey", "opposite")),
                decisions=(room,), moments=(Moment("Mon"), Moment("Tue")))
    menu = BetMenu((
        Bet("bet1", PRE, "coin2", {"grey": bet1_grey, "opposite": bet1_opposite}),
        Bet("bet2", "colored-room", "coin2", {"grey": bet2_grey, "opposite": bet2_opposite}),
    ))
    return bind_bets(d, menu) if with_bets else d


def two_envelopes(floor=8, fee=1, pairs=3):
    """Envelope pairs (n, 2n) with n = floor * 2**i, i < pairs, uniform prior."""
    if floor <= 0 or pairs < 1:
        raise ScenarioError("floor must be positive and pairs >= 1")
    smalls = tuple(int(floor * 2**i) if F(floor).denominator == 1 else floor * 2**i
                   for i in range(pairs))
    amounts = sorted(set(smalls) | {2 * n for n in smalls})
    pair = ChanceVar("pair", smalls, (), {(): {n: F(1, pairs) for n in smalls}})
    held = _coin("held", "small", "large")
    held_amount = _det("held_amount", tuple(amounts), ("pair", "held"),
                       lambda n, h: n if h == "small" else 2 * n, [smalls, ("small", "large")])
    decisions, terms = [], []
    for x in amounts:
        name = f"hold-{x}"
        decisions.append(DecisionPoint(name, ("keep", "switch"),
                                       (Token(name, {"held_amount": x}),), ("held_amount",)))
    for n in smalls:
        for h in ("small", "large"):
            x, y = (n, 2 * n) if h == "small" else (2 * n, n)
            name = f"hold-{x}"
            terms.append(Term({"pair": n, "held": h, name: "keep"}, x))
            terms.append(Term({"pair": n, "held": h, name: "switch"}, rational(y) - fee))
    return Dilemma("two-envelopes", chance=(pair, held, held_amount), decisions=tuple(decisions),
                   utility=tuple(terms), meta={"floor": floor, "fee": fee, "pairs": smalls})


# ------------------------------------------------------------------ catalog

_P = Param
_REGISTRY = {
    "newcomb": (newcomb, "causal decision theory: predictor-read boxes", {
        "big": _P(1_000_000, "box A content when one-boxing is predicted"),
        "small": _P(1_000, "box B content"),
        "accuracy": _P(F(1), "predictor accuracy in [1/2, 1]")}),
    "transparent-newcomb": (transparent_newcomb, "updateful decision theory: visible boxes", {
        "big": _P(1_000_000, "box A content"), "small": _P(1_000, "box B content"),
        "accuracy": _P(F(1), "predictor accuracy")}),
    "counterfactual-mugging": (counterfactual_mugging, "causal decision theory: coin-flip mugging", {
        "ask": _P(1, "amount requested on tails"), "reward": _P(10, "award on heads"),
        "p_heads": _P(F(1, 2), "coin bias"), "accuracy": _P(F(1), "predictor accuracy")}),
    "money-pump": (money_pump, "causal decision theory: adversarial box game", {
        "rounds": _P(3, "number of rounds", "int"), "loss": _P(1, "loss in the predicted box"),
        "gain": _P(3, "gain in the other box"), "accuracy": _P(F(1), "predictor accuracy")}),
    "smoking-lesion": (smoking_lesion, "evidential decision theory: common-cause lesion", {
        "smoke_bonus": _P(1, "utility of smoking"), "cancer_cost": _P(100, "cost of cancer"),
        "p_lesion": _P(F(1, 2), "lesion prior"),
        "p_smoke_lesion": _P(F(9, 10), "P(smoke | lesion) in the reference class"),
        "p_smoke_no_lesion": _P(F(1, 10), "P(smoke | no lesion)")}),
    "xor-blackmail": (xor_blackmail, "evidential decision theory: XOR blackmail", {
        "fee": _P(100, "blackmail demand"), "harm": _P(1_000_000, "lesion harm"),
        "p_lesion": _P(F(1, 100), "lesion prior"), "accuracy": _P(F(1), "blackmailer accuracy")}),
    "insurance": (insurance, "causal decision theory: sequential insurance bet", {
        "c": _P(F(2, 5), "prior credence in the lesion"),
        "q": _P(F(4, 5), "P(lesion | smoke) = P(no lesion | abstain)"),
        "smoke_lesion": _P(-1, "smoking with the lesion"),
        "smoke_no_lesion": _P(1, "smoking without the lesion"),
        "bet_match": _P(F(1, 2), "bet payout when lesion iff smoked"),
        "bet_mismatch": _P(F(-3, 2), "bet payout otherwise")}),
    "sleeping-beauty-classic": (sleeping_beauty_classic, "anthropic: classic Sleeping Beauty", {
        "bet1_heads": _P(-13, "Sunday bet, heads"), "bet1_tails": _P(16, "Sunday bet, tails"),
        "bet2_heads": _P(11, "awakening bet, heads"), "bet2_tails": _P(-9, "awakening bet, tails"),
        "with_bets": _P(1, "bind the two-bet menu", "int")}),
    "sleeping-beauty-wbg": (sleeping_beauty_wbg, "anthropic: white-black-grey Sleeping Beauty", {
        "bet1_grey": _P(22, "Sunday bet, grey"), "bet1_opposite": _P(-20, "Sunday bet, opposite"),
        "bet2_grey": _P(-24, "coloured-room bet, grey"),
        "bet2_opposite": _P(9, "coloured-room bet, opposite"),
        "with_bets": _P(1, "bind the two-bet menu", "int")}),
    "two-envelopes": (two_envelopes, "aversion to subjective priors: envelope switching", {
        "floor": _P(8, "smallest possible amount"), "fee": _P(1, "switching fee"),
        "pairs": _P(3, "number of (n, 2n) pairs in the prior", "int")}),
    "st-petersburg": (None, "divergent temporal models: St. Petersburg", {
        "start": _P(2, "initial winnings")}),
    "quit-flip": (None, "divergent temporal models: quit-or-flip procrastination", {
        "alpha": _P(3, "winnings multiplier on heads"), "start": _P(2, "initial winnings")}),
    "reservoir": (None, "divergent temporal models: utility reservoir", {
        "growth": _P(2, "reservoir growth per step"), "cost": _P(1, "maintenance cost per step"),
        "gamma": _P(F(3, 4), "discount factor")}),
    "iterated-st-petersburg": (None, "divergent temporal models: iterated re-entry", {
        "fee": _P(1, "re-entry fee"), "start": _P(2, "initial winnings")}),
}

SCENARIO_IDS = tuple(_REGISTRY)


def catalog() -> list[CatalogEntry]:
    return [CatalogEntry(sid, dict(params), topic) for sid, (_, topic, params) in _REGISTRY.items()]


def _coerce(entry_params: dict, params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if k not in entry_params:
            raise ScenarioError(f"unknown parameter {k!r}; expected one of {sorted(entry_params)}")
        if entry_params[k].kind == "int":
            if isinstance(v, str):
                try:
                    v = int(v)
                except ValueError:
                    raise ScenarioError(f"parameter {k!r} must be an integer, got {v!r}") from None
            if not isinstance(v, int) or isinstance(v, bool):
                raise ScenarioError(f"parameter {k!r} must be an integer")
        else:
            try:
                v = rational(v)
            except (TypeError, ValueError, ZeroDivisionError) as exc:
                raise ScenarioError(f"parameter {k!r}: {exc}") from None
        out[k] = v
    return out


def build(sid: str, params: dict | None = None, **kw):
    """Build scenario ``sid``; returns a Dilemma or, for infinite games, a GameSpec."""
    if sid not in _REGISTRY:
        raise ScenarioError(f"unknown scenario {sid!r}")
    fn, _, schema = _REGISTRY[sid]
    merged = {k: p.default for k, p in schema.items()}
    merged.update(_coerce(schema, {**(params or {}), **kw}))
    merged = {k: (rational(v) if schema[k].kind == "rational" else v) for k, v in merged.items()}
    if fn is None:
        try:
            return GameSpec(sid, **merged)
        except ValueError as exc:
            raise ScenarioError(str(exc)) from None
    try:
        return fn(**merged)
    except ZeroDivisionError as exc:
        raise ScenarioError(str(exc)) from None
