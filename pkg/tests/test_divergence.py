from fractions import Fraction as F

import pytest

from gauntlet import divergence as dv


def test_st_petersburg_partial_ev_is_k():
    for k in range(1, 65):
        assert dv.st_petersburg_partial_ev(k) == k
    assert dv.st_petersburg_series(8).diverges


def test_price_witness_exceeds_price():
    k = dv.price_witness(100)
    assert dv.st_petersburg_partial_ev(k) > 100
    assert dv.st_petersburg_partial_ev(k - 1) <= 100


def test_quit_flip_hand_values():
    s = dv.naive_quit_flip_ev(3, 3)
    assert s.partial_sums == (F(1, 2), F(3, 2), F(27, 8))
    assert s.diverges and not s.caveat


def test_quit_flip_alpha_two_carries_caveat():
    s = dv.naive_quit_flip_ev(2, 5)
    assert s.caveat and not s.diverges


def test_never_quit_always_loses():
    sim = dv.simulate_never_quit(3, 10_000, seed=0)
    assert sim.negative_fraction == 1.0
    assert sim.mean_turns == pytest.approx(2.0, abs=0.1)


def test_never_quit_is_seed_deterministic():
    a = dv.simulate_never_quit(3, 500, seed=7)
    b = dv.simulate_never_quit(3, 500, seed=7)
    assert (a.utilities == b.utilities).all()


@pytest.mark.parametrize("gamma", [F(1, 4), F(1, 2), F(3, 4), F(9, 10)])
@pytest.mark.parametrize("g", [F(11, 10), F(4, 3), F(2), F(4)])
def test_bellman_flip_at_gamma_g_one(gamma, g):
    v = dv.bellman_convergence(dv.BellmanSpec(gamma, g))
    assert v.converges == (gamma * g < 1)
    assert v.agrees


def test_boundary_gamma_g_equal_one_does_not_converge():
    assert not dv.bellman_convergence(dv.BellmanSpec(F(1, 2), F(2))).converges


def test_reservoir_unbounded_agent_waits_forever():
    plan = dv.reservoir_decision(2, 1, F(3, 4), None)
    assert set(plan.decisions) == {"wait"}
    assert plan.unbounded
    assert all(r < 0 for r in plan.realized)


def test_reservoir_horizon_agent_taps():
    plan = dv.reservoir_decision(2, 1, F(3, 4), 5)
    assert "tap" in plan.decisions


def test_iterated_reentry_agents():
    naive = dv.iterated_reentry_trace(1, 10, "naive-ev")
    assert sum(r.reenter for r in naive.rounds) == 10 and naive.total_fees == 10
    bounded = dv.iterated_reentry_trace(1, 10, "fdt-bounded")
    assert bounded.total_fees == 0
    with pytest.raises(ValueError):
        dv.iterated_reentry_trace(1, 10, "oracle")


def test_game_spec_validation():
    with pytest.raises(ValueError):
        dv.GameSpec("quit-flip", alpha=F(1))
    with pytest.raises(ValueError):
        dv.GameSpec("reservoir", gamma=F(1))
