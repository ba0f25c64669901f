from fractions import Fraction as F

import pytest

from gauntlet import exploit as ex
from gauntlet.bets import PRE, Bet, BetMenu, bind_bets
from gauntlet.oracles import independent_nets
from gauntlet.scenarios import build


def sb():
    return build("sleeping-beauty-classic")


def test_bind_bets_rejects_bad_menus():
    d = build("sleeping-beauty-classic", with_bets=0)
    with pytest.raises(ValueError):
        bind_bets(d, BetMenu((Bet("b", PRE, "dice", {1: F(1)}),)))
    with pytest.raises(ValueError):
        bind_bets(d, BetMenu((Bet("b", PRE, "coin", {"heads": F(1)}),)))
    with pytest.raises(ValueError):
        bind_bets(d, BetMenu((Bet("coin", PRE, "coin", {"heads": F(1), "tails": F(1)}),)))


def test_classic_book_against_halfer_cdt():
    r = ex.evaluate_bets(sb(), "cdt-myopic", "ssa")
    assert r.accepted() == ("bet1", "bet2")
    assert r.net_by("coin") == {"heads": -2, "tails": -2}
    assert r.verdict == ex.DUTCH_BOOK
    assert r.worst == r.best == -2


def test_halfer_edt_rejects_awakening_bet():
    r = ex.evaluate_bets(sb(), "edt", "ssa")
    bet2 = r.decisions[1]
    assert (bet2.accepted, bet2.ev) == (False, F(-7, 2))
    assert r.verdict == ex.SAFE


def test_wbg_book_against_edt():
    r = ex.evaluate_bets(build("sleeping-beauty-wbg"), "edt", "ssa")
    assert r.accepted() == ("bet1", "bet2")
    assert r.decisions[1].ev == 4
    assert r.net_by("coin2") == {"grey": -2, "opposite": -2}
    c = ex.evaluate_bets(build("sleeping-beauty-wbg"), "cdt-myopic", "ssa").decisions[1]
    assert (c.accepted, c.ev) == (False, -2)


@pytest.mark.parametrize("theory", ["fdt", "ucdt", "uedt"])
def test_updateless_agents_are_not_booked(theory):
    for sid in ("sleeping-beauty-classic", "sleeping-beauty-wbg"):
        assert ex.evaluate_bets(build(sid), theory, "ssa").verdict != ex.DUTCH_BOOK


def test_reported_nets_match_independent_enumeration():
    d = sb()
    r = ex.evaluate_bets(d, "cdt-myopic", "ssa")
    assert {n.net for n in r.nets} == set(independent_nets(d, r.policy))


@pytest.mark.parametrize("k", [2, 3, F(1, 7)])
def test_acceptance_invariant_under_positive_scaling(k):
    def scaled(theory, rule):
        d = build("sleeping-beauty-classic", bet1_heads=-13 * k, bet1_tails=16 * k,
                  bet2_heads=11 * k, bet2_tails=-9 * k)
        return ex.evaluate_bets(d, theory, rule).accepted()
    for th in ("edt", "cdt-myopic", "fdt"):
        for rule in ("ssa", "sia"):
            assert scaled(th, rule) == ex.evaluate_bets(sb(), th, rule).accepted()


def test_money_pump_traces():
    d = build("money-pump", rounds=5)
    cdt = ex.run_money_pump(d, "cdt-myopic")
    assert [r.perceived for r in cdt.rows] == [1] * 5
    assert [r.realized for r in cdt.rows] == [-1] * 5
    assert cdt.total == -5
    assert ex.run_money_pump(d, "fdt").total == 0


def test_search_finds_classic_book_within_bound():
    menu = ex.search_dutch_book(sb(), "cdt-myopic", "ssa", bound=20)
    assert menu is not None
    d = bind_bets(ex.strip_bets(sb()), menu)
    assert ex.evaluate_bets(d, "cdt-myopic", "ssa").verdict == ex.DUTCH_BOOK


def test_search_exhausts_newcomb_for_fdt():
    d = build("newcomb")
    assert ex.search_dutch_book(d, "fdt", bound=10) is None
    assert ex.search_space_size(d, 10) == 882 + 882 * 881 // 2


def test_search_respects_bound_and_budget():
    with pytest.raises(ValueError):
        ex.search_dutch_book(sb(), "edt", bound=0)
    with pytest.raises(ex.SearchSpaceError):
        ex.search_dutch_book(build("two-envelopes"), "edt", bound=10, max_candidates=100)


def test_envelopes():
    m = ex.envelope_model_of(build("two-envelopes"))
    assert ex.prior_averse_appraisal(8) == 10
    assert ex.run_envelope_pump(m, "prior-averse", 10).total == 10
    assert ex.unconditional_switch_gain(m) == 0
    two = ex.EnvelopeModel({8: F(1, 2), 16: F(1, 2)})
    for x in (8, 16, 32):
        trace = ex.run_envelope_pump(two, "bayes", 10, x)
        assert sum(r.switched for r in trace.rows) <= 1
