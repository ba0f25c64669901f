from fractions import Fraction as F

import pytest

from gauntlet.core import Dilemma, validate
from gauntlet.divergence import GameSpec
from gauntlet.scenarios import SCENARIO_IDS, ScenarioError, build, catalog


def test_catalog_lists_every_builtin_with_documented_params():
    ids = [c.id for c in catalog()]
    assert ids == list(SCENARIO_IDS)
    assert len(ids) == 14
    for entry in catalog():
        assert entry.topic
        assert all(p.doc for p in entry.params.values())


@pytest.mark.parametrize("sid", SCENARIO_IDS)
def test_defaults_build_and_validate(sid):
    obj = build(sid)
    if isinstance(obj, GameSpec):
        assert obj.game == sid
    else:
        assert isinstance(obj, Dilemma)
        assert validate(obj).ok


def test_string_parameters_are_coerced():
    d = build("insurance", {"c": "3/5", "smoke_lesion": "-9/10"})
    assert any(t.value == F(-9, 10) for t in d.utility)


def test_unknown_scenario_and_parameter():
    with pytest.raises(ScenarioError):
        build("trolley")
    with pytest.raises(ScenarioError):
        build("newcomb", colour="red")


def test_parameter_ranges_are_enforced():
    with pytest.raises(ScenarioError):
        build("newcomb", accuracy=F(1, 3))
    with pytest.raises(ScenarioError):
        build("insurance", c=F(1, 10))
    with pytest.raises(ScenarioError):
        build("money-pump", rounds=9)
    with pytest.raises(ScenarioError):
        build("money-pump", rounds="many")


def test_money_pump_rounds_scale_decisions():
    d = build("money-pump", rounds=5)
    assert len(d.decisions) == 10
    assert d.meta["rounds"] == 5


def test_sleeping_beauty_bets_can_be_unbound():
    assert build("sleeping-beauty-classic").bets is not None
    assert build("sleeping-beauty-classic", with_bets=0).bets is None
