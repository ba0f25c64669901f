from fractions import Fraction as F

import pytest

from gauntlet.core import ChanceVar, DecisionPoint, Dilemma, Moment, Token
from gauntlet.credence import (NEG_INFINITY, UNBOUNDED, AnthropicRule, UnreachableInfosetError,
                               anthropic_credence, as_rule, posterior_after_actions,
                               simulation_cooperation_margin)
from gauntlet.scenarios import build


@pytest.fixture
def beauty():
    return build("sleeping-beauty-classic", with_bets=0)


def cells(table):
    out = {}
    for w, tok, p in table:
        key = (w["coin"], tok)
        out[key] = out.get(key, F(0)) + p
    return out


def test_ssa_halfer(beauty):
    t = anthropic_credence(beauty, "awake", "ssa")
    assert cells(t) == {("heads", "mon"): F(1, 2), ("tails", "mon"): F(1, 4), ("tails", "tue"): F(1, 4)}


def test_sia_thirder(beauty):
    t = anthropic_credence(beauty, "awake", "sia")
    assert cells(t) == {("heads", "mon"): F(1, 3), ("tails", "mon"): F(1, 3), ("tails", "tue"): F(1, 3)}


@pytest.mark.parametrize("rule", ["ssa", "sia"])
def test_wbg_opposite_two_thirds(rule):
    d = build("sleeping-beauty-wbg", with_bets=0)
    t = anthropic_credence(d, "colored-room", rule)
    assert t.marginal("coin2")["opposite"] == F(2, 3)
    assert t.total() == 1


def test_rules_coincide_without_duplication():
    d = build("counterfactual-mugging")
    a = anthropic_credence(d, "asked", "ssa")
    b = anthropic_credence(d, "asked", "sia")
    assert a.marginal("coin") == b.marginal("coin") == {"tails": 1}


def test_rule_parsing():
    assert as_rule("SIA") is AnthropicRule.SIA
    with pytest.raises(ValueError):
        as_rule("fnc")


def test_unreachable_infoset_raises():
    coin = ChanceVar("c", ("h", "t"), (), {(): {"h": F(1), "t": F(0)}})
    dp = DecisionPoint("never", ("a", "b"), (Token("never", {"c": "t"}),), ("c",))
    d = Dilemma("u", chance=(coin,), decisions=(dp,), moments=(Moment("m"),))
    with pytest.raises(UnreachableInfosetError):
        anthropic_credence(d, "never", "ssa")


def test_posterior_after_own_action(beauty):
    t = anthropic_credence(beauty, "awake", "ssa")
    assert posterior_after_actions(t, beauty, {"awake": "wait"}).total() == 1
    with pytest.raises(ValueError):
        posterior_after_actions(t, beauty, {"awake": "sleep"})


def test_simulation_margin_exact_and_unbounded():
    assert simulation_cooperation_margin(F(1, 2), 5, 10, 0) == 0
    assert simulation_cooperation_margin(F(1, 2), 5, UNBOUNDED, 0, cap=4) == 3
    assert simulation_cooperation_margin(F(1, 2), 5, UNBOUNDED, 0) is NEG_INFINITY
    assert simulation_cooperation_margin(1, 5, UNBOUNDED, 0) == 5
    assert NEG_INFINITY < F(-10**12)
    with pytest.raises(ValueError):
        simulation_cooperation_margin(2, 0, 0, 0)
