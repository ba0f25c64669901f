import pytest

from gauntlet import learninglab as ll


def cfg(**kw):
    return ll.TrainConfig(**{"episodes": 400, **kw})


@pytest.mark.parametrize("env", ll.ENV_IDS)
@pytest.mark.parametrize("learner", ll.LEARNER_IDS)
def test_every_pair_trains(env, learner):
    st = ll.train(env, learner, cfg())
    assert len(st.reward_curve) == 400
    for s in ll.DECISION_STATES[env]:
        assert sum(st.frequency[s].values()) == pytest.approx(1.0) or sum(st.frequency[s].values()) == 0


def test_same_seed_same_run():
    a = ll.train("repeated-newcomb", "q-learning", cfg(seed=3))
    b = ll.train("repeated-newcomb", "q-learning", cfg(seed=3))
    assert a.reward_curve == b.reward_curve and a.final_greedy == b.final_greedy


def test_counterfactual_feedback_holds_hidden_state():
    out = ll.counterfactual_feedback("repeated-newcomb", "choose", "one-box", {"prediction": "one-box"})
    assert out == {"two-box": 1_001_000}
    out = ll.counterfactual_feedback("repeated-lesion", "decide", "abstain", {"lesion": True})
    assert set(out) == {"smoke"}
    with pytest.raises(ValueError):
        ll.counterfactual_feedback("repeated-newcomb", "choose", "three-box")


def test_convergence_flag():
    assert ll.is_converged(("a", "a", "a"), 2)
    assert not ll.is_converged(("a", "b", "a"), 2)


def test_sweep_counts_and_reward_table():
    rep = ll.sweep("repeated-newcomb", ("q-learning", "pg-episode-return"), range(3), cfg())
    assert sum(rep.outcomes["q-learning"].values()) == 3
    table = ll.reward_table(rep.runs["q-learning"][0])
    assert table.startswith("episode,return\n")
    assert table.count("\n") == 401
    with pytest.raises(ValueError):
        ll.sweep("repeated-newcomb", ("q-learning",), [], cfg())


def test_pg_episode_return_one_boxes_and_q_learning_two_boxes():
    rep = ll.sweep("repeated-newcomb", ("q-learning", "pg-episode-return"), range(5), ll.TrainConfig())
    assert rep.count("pg-episode-return", "one-box") >= 4
    assert rep.count("q-learning", "two-box", "nonconverged") >= 4


def test_counterfactual_learner_smokes_on_lesion():
    rep = ll.sweep("repeated-lesion", ("q-learning", "q-counterfactual"), range(5), ll.TrainConfig())
    assert rep.count("q-learning", "abstain") >= 4
    assert rep.count("q-counterfactual", "smoke") >= 4
