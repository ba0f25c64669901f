import random
from fractions import Fraction as F

from hypothesis import given, settings
from hypothesis import strategies as st

from gauntlet import exploit as ex
from gauntlet.core import expected_utility, joint, pure_policies
from gauntlet.fileformat import format_rational, parse_rational
from gauntlet.oracles import affine, brute_force_optimum, brute_force_value, random_dilemma
from gauntlet.scenarios import build
from gauntlet.theories import optimal_policy
from gauntlet.verification import _argmax_sets, fdt_oracle_mismatches, verdict_soundness_failures

seeds = st.integers(min_value=0, max_value=2**32 - 1)
positive = st.fractions(min_value=F(1, 50), max_value=50)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_predictor_free_theories_agree(seed):
    d = random_dilemma(random.Random(seed))
    sets = list(_argmax_sets(d).values())
    assert all(s == sets[0] for s in sets)


@settings(max_examples=40, deadline=None)
@given(seeds, st.booleans(), positive, st.fractions(min_value=-100, max_value=100))
def test_affine_utility_preserves_argmax(seed, predictor, scale, shift):
    d = random_dilemma(random.Random(seed), predictor=predictor)
    assert _argmax_sets(d) == _argmax_sets(affine(d, scale, shift))


@settings(max_examples=60, deadline=None)
@given(seeds, st.booleans())
def test_joint_sums_to_one_and_matches_oracle(seed, predictor):
    d = random_dilemma(random.Random(seed), predictor=predictor)
    for pi in pure_policies(d):
        assert joint(d, pi).total() == 1
        assert expected_utility(d, pi) == brute_force_value(d, pi)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_fdt_matches_policy_enumeration_oracle(seed):
    d = random_dilemma(random.Random(seed), predictor=True)
    best, winners = brute_force_optimum(d)
    rec = optimal_policy(d, "fdt")
    assert rec.value == best
    assert rec.policy in winners


@settings(max_examples=200)
@given(st.fractions(max_denominator=10**6))
def test_rational_text_round_trip(q):
    assert parse_rational(format_rational(q)) == q
    assert format_rational(parse_rational(format_rational(q))) == format_rational(q)


@settings(max_examples=25, deadline=None)
@given(positive)
def test_bet_acceptance_scale_invariant(k):
    base = ex.evaluate_bets(build("sleeping-beauty-wbg"), "edt", "ssa")
    scaled = ex.evaluate_bets(build("sleeping-beauty-wbg", bet1_grey=22 * k, bet1_opposite=-20 * k,
                                    bet2_grey=-24 * k, bet2_opposite=9 * k), "edt", "ssa")
    assert scaled.accepted() == base.accepted()
    assert scaled.verdict == base.verdict


def test_fdt_oracle_on_builtins():
    assert fdt_oracle_mismatches() == []


def test_verdicts_sound_against_independent_enumeration():
    assert verdict_soundness_failures() == []
