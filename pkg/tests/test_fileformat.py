import json
from fractions import Fraction as F

import pytest

from gauntlet.fileformat import (DilemmaFileError, dumps, format_rational, from_document, loads,
                                 parse_dilemma, parse_rational, to_document)
from gauntlet.scenarios import SCENARIO_IDS, build
from gauntlet.divergence import GameSpec

DILEMMAS = [s for s in SCENARIO_IDS if not isinstance(build(s), GameSpec)]


@pytest.mark.parametrize("sid", DILEMMAS)
def test_round_trip_is_identical(sid):
    d = build(sid)
    back = loads(dumps(d))
    assert back == d
    assert dumps(back) == dumps(d)


def test_file_round_trip(tmp_path):
    p = tmp_path / "newcomb.json"
    p.write_text(dumps(build("newcomb")), encoding="utf-8")
    assert parse_dilemma(p) == build("newcomb")


@pytest.mark.parametrize("text,value", [("1/2", F(1, 2)), ("-3/4", F(-3, 4)), ("7", F(7)), (5, F(5))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value
    assert parse_rational(format_rational(value)) == value


@pytest.mark.parametrize("bad", ["1/0", "2/4", "1/-2", "0.5", "abc", 0.5, True, None])
def test_parse_rational_rejects(bad):
    with pytest.raises(DilemmaFileError) as info:
        parse_rational(bad)
    assert info.value.kind == "rational"


def test_zero_denominator_message():
    with pytest.raises(DilemmaFileError, match="zero denominator"):
        parse_rational("3/0", "chance[0]")


def coin_doc(probs):
    doc = to_document(build("counterfactual-mugging"))
    doc["chance"][0]["cpt"][0]["probs"] = probs
    return doc


def test_row_sum_error_names_the_row():
    with pytest.raises(DilemmaFileError) as info:
        from_document(coin_doc({"heads": "1/2", "tails": "1/3"}))
    assert info.value.kind == "validation"
    assert any("coin" in p and "5/6" in p for p in info.value.problems)


def test_zero_denominator_in_document():
    with pytest.raises(DilemmaFileError) as info:
        from_document(coin_doc({"heads": "1/0", "tails": "1/2"}))
    assert any("zero denominator" in p and "chance[0]" in p for p in info.value.problems)


def test_every_problem_is_listed():
    doc = coin_doc({"heads": "2/4", "tails": "1/0"})
    del doc["decisions"][0]["actions"]
    with pytest.raises(DilemmaFileError) as info:
        from_document(doc)
    assert len(info.value.problems) >= 3


def test_syntax_error_reports_position():
    with pytest.raises(DilemmaFileError) as info:
        loads('{"name": "x",\n  "chance": [}')
    assert info.value.kind == "syntax"
    assert "line 2" in str(info.value)


def test_rationals_are_strings_on_output():
    doc = json.loads(dumps(build("insurance")))
    for t in doc["utility"]["terms"]:
        assert isinstance(t["value"], str)
