import random
from fractions import Fraction as F

import pytest

from gauntlet.core import (ChanceVar, ConditioningError, DecisionPoint, Dilemma, PredictorVar, Term,
                           Token, condition, expected_utility, intervene, joint, pure_policies, rational,
                           validate)
from gauntlet.oracles import brute_force_value, random_dilemma
from gauntlet.scenarios import build


def coin(name="c", p=F(1, 2)):
    return ChanceVar(name, ("h", "t"), (), {(): {"h": p, "t": 1 - p}})


def test_rational_accepts_ints_strings_and_fractions():
    assert rational(3) == F(3)
    assert rational("2/6") == F(1, 3)
    assert rational(F(1, 2)) == F(1, 2)


def test_rational_rejects_floats():
    with pytest.raises((TypeError, ValueError)):
        rational(0.5)


def test_joint_is_normalised_and_exact():
    d = build("newcomb")
    for pi in pure_policies(d):
        dist = joint(d, pi)
        assert dist.total() == 1
        assert all(isinstance(p, F) for _, p in dist.entries)


def test_newcomb_policy_values():
    d = build("newcomb")
    assert expected_utility(d, {"choose": "one-box"}) == 1_000_000
    assert expected_utility(d, {"choose": "two-box"}) == 1_000


def test_imperfect_predictor_mixes_outcomes():
    d = build("newcomb", accuracy=F(9, 10))
    assert expected_utility(d, {"choose": "one-box"}) == F(9, 10) * 1_000_000
    assert expected_utility(d, {"choose": "two-box"}) == F(1, 10) * 1_000_000 + 1_000


def test_condition_on_zero_probability_raises():
    d = Dilemma("c", chance=(coin(p=F(1)),))
    with pytest.raises(ConditioningError):
        condition(joint(d, {}), {"c": "t"})


def test_condition_renormalises():
    d = Dilemma("c", chance=(coin(), ChanceVar("x", (0, 1), ("c",), {("h",): {0: F(1)}, ("t",): {0: F(1, 2), 1: F(1, 2)}})))
    post = condition(joint(d, {}), {"x": 0})
    assert post.marginal("c") == {"h": F(2, 3), "t": F(1, 3)}


def test_pure_policy_count_is_product_of_action_counts():
    d = build("transparent-newcomb")
    assert len(list(pure_policies(d))) == 4


def test_intervene_clamps_a_single_token():
    d = build("sleeping-beauty-classic", with_bets=0)
    d2 = intervene(d, "awake", "mon", "wait")
    assert d2.clamps == {"mon": "wait"}


def test_validate_accepts_builtins():
    for sid in ("newcomb", "insurance", "money-pump", "two-envelopes", "sleeping-beauty-wbg"):
        assert validate(build(sid)).ok, sid


def test_validate_reports_row_sum_and_unknown_variable():
    bad = ChanceVar("c", ("h", "t"), (), {(): {"h": F(1, 2), "t": F(1, 3)}})
    dp = DecisionPoint("d", ("a",), (Token("d", {"nope": 1}),))
    report = validate(Dilemma("bad", chance=(bad,), decisions=(dp,)))
    assert not report.ok
    kinds = report.kinds()
    assert "unknown-variable" in kinds
    assert any("row sums to 5/6" in str(i) for i in report.issues)


def test_validate_reports_accuracy_range():
    dp = DecisionPoint("d", ("a", "b"), (Token("d"),))
    d = Dilemma("bad", decisions=(dp,), predictors=(PredictorVar("p", "d", F(1, 3)),))
    assert "accuracy-range" in validate(d).kinds()


def test_validate_reports_cycle():
    a = ChanceVar("a", (0, 1), ("b",), {(0,): {0: F(1)}, (1,): {0: F(1)}})
    b = ChanceVar("b", (0, 1), ("a",), {(0,): {0: F(1)}, (1,): {0: F(1)}})
    assert "cycle" in validate(Dilemma("cyc", chance=(a, b))).kinds()


def test_utility_terms_add():
    d = Dilemma("u", chance=(coin(),), utility=(Term({"c": "h"}, F(3)), Term({}, F(-1))))
    assert expected_utility(d, {}) == F(1, 2)


@pytest.mark.parametrize("seed", range(25))
def test_engine_matches_brute_force_enumeration(seed):
    rng = random.Random(seed)
    d = random_dilemma(rng, predictor=seed % 2 == 1)
    for pi in pure_policies(d):
        assert expected_utility(d, pi) == brute_force_value(d, pi)
