from dataclasses import replace
from fractions import Fraction as F

import pytest

from gauntlet.core import DispositionRule, expected_utility
from gauntlet.scenarios import build
from gauntlet.theories import (THEORIES, UPDATEFUL, UPDATELESS, NoRatifiableActionError,
                               PolicySpaceError, TheoryError, induced_policy, optimal_policy,
                               policy_count, recommend)


def test_theory_partition():
    assert set(UPDATEFUL) | set(UPDATELESS) == set(THEORIES)
    assert len(THEORIES) == 8


def test_unknown_theory():
    with pytest.raises(TheoryError):
        recommend(build("newcomb"), "choose", "wdt")


def test_newcomb_edt_one_boxes_with_exact_ev():
    r = recommend(build("newcomb"), "choose", "edt")
    assert r.action == "one-box"
    assert r.ev == {"one-box": 1_000_000, "two-box": 1_000}


@pytest.mark.parametrize("p", [F(0), F(1, 10), F(1, 2), F(1)])
def test_newcomb_cdt_gap_is_exactly_small_box(p):
    d = build("newcomb")
    if 0 < p < 1:
        d = replace(d, disposition={"choose": DispositionRule((), {(): {"one-box": p, "two-box": 1 - p}})})
    r = recommend(d, "choose", "cdt-myopic")
    assert r.action == "two-box"
    assert r.advantage("two-box", "one-box") == 1_000


@pytest.mark.parametrize("theory", ["fdt", "ucdt", "uedt"])
def test_updateless_one_box(theory):
    assert optimal_policy(build("newcomb"), theory).policy == {"choose": "one-box"}


@pytest.mark.parametrize("theory,value", [("edt", 1_000), ("cdt-myopic", 1_000), ("fdt", 1_000_000)])
def test_transparent_newcomb_realized(theory, value):
    d = build("transparent-newcomb")
    assert expected_utility(d, induced_policy(d, theory)) == value


def test_mugging():
    d = build("counterfactual-mugging")
    rec = optimal_policy(d, "fdt")
    assert rec.policy == {"asked": "pay"} and rec.value == F(9, 2)
    assert dict((tuple(p.items()), v) for p, v in rec.values)[(("asked", "refuse"),)] == 0
    for th in ("edt", "cdt-myopic"):
        assert recommend(d, "asked", th).action == "refuse"


def test_smoking_lesion_variants():
    d = build("smoking-lesion")
    edt = recommend(d, "smoke", "edt")
    assert edt.action == "abstain" and edt.ev == {"abstain": -10, "smoke": -89}
    assert recommend(d, "smoke", "edt-tickle").action == "smoke"
    assert recommend(d, "smoke", "edt-ratify").action == "smoke"
    assert recommend(d, "smoke", "cdt-myopic").action == "smoke"


def test_xor_blackmail():
    d = build("xor-blackmail")
    for th in ("edt", "edt-tickle", "edt-ratify"):
        assert recommend(d, "letter", th).action == "pay", th
    assert optimal_policy(d, "fdt").policy == {"letter": "refuse"}


def test_insurance_paths():
    d = build("insurance")
    pe = induced_policy(d, "edt")
    assert (pe["smoke"], pe["bet-after-abstain"]) == ("abstain", "bet")
    pc = induced_policy(d, "cdt-myopic")
    assert (pc["smoke"], pc["bet-after-smoke"]) == ("smoke", "bet")
    soph = build("insurance", c=F(3, 5))
    r = recommend(soph, "smoke", "cdt-sophisticated")
    assert r.action == "smoke" and r.ev == {"abstain": F(-7, 10), "smoke": F(-1, 2)}


def test_insurance_has_no_ratifiable_smoking_choice():
    with pytest.raises(NoRatifiableActionError):
        recommend(build("insurance"), "smoke", "edt-ratify")


def test_policy_space_bound():
    d = build("money-pump", rounds=8)
    assert policy_count(d) == 2 ** 16
    with pytest.raises(PolicySpaceError):
        optimal_policy(d, "fdt", bound=1000)


def test_updateful_theories_reject_policy_search():
    with pytest.raises(TheoryError):
        optimal_policy(build("newcomb"), "edt")


def test_induced_policy_is_deterministic():
    d = build("money-pump")
    assert induced_policy(d, "cdt-sophisticated") == induced_policy(d, "cdt-sophisticated")
