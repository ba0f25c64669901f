"""Toy reinforcement learning: which update rules breed which decision theory.

Environments are small episodic problems mirroring the exact dilemmas.  The
learners are tabular (Q-learning, SARSA, counterfactual Q) or softmax policy
gradient with either future-return or whole-episode-return credit.

Coupling choices (where the reference class must be made concrete):

* Newcomb predictors simulate the learner: the decision-state action is
  sampled once at episode start, the predictor reads that sample (with the
  configured accuracy), and the learner then plays it.
* The lesion is drawn conditionally on the action actually taken, so a
  learner sees the smoke/lesion correlation only in its factual data.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace

import numpy as np

ENV_IDS = ("repeated-newcomb", "repeated-transparent-newcomb", "repeated-lesion")
LEARNER_IDS = ("q-learning", "sarsa", "pg-future-return", "pg-episode-return", "q-counterfactual")

BIG, SMALL = 1_000_000, 1_000
SMOKE_BONUS, CANCER_COST = 1, 100
REWARD_SCALE = {"repeated-newcomb": 1e-6, "repeated-transparent-newcomb": 1e-6,
                "repeated-lesion": 1e-2}


class CounterfactualUnsupported(ValueError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    """Step size lr_t = lr / (1 + lr_decay * t); exploration eps_t likewise."""

    episodes: int = 2000
    seed: int = 0
    lr: float = 0.1
    lr_decay: float = 0.0
    epsilon: float = 0.1
    epsilon_decay: float = 0.0
    gamma: float = 1.0
    accuracy: float = 1.0
    p_lesion_smoke: float = 0.9
    p_lesion_abstain: float = 0.1
    reward_scale: float | None = None
    window_frac: float = 0.1

    def step_size(self, t: int) -> float:
        return self.lr / (1.0 + self.lr_decay * t)

    def explore(self, t: int) -> float:
        return self.epsilon / (1.0 + self.epsilon_decay * t)

    def window(self) -> int:
        return max(1, int(round(self.episodes * self.window_frac)))


@dataclass(frozen=True)
class Step:
    state: str
    action: str
    reward: float  # unscaled
    hidden: dict = field(default_factory=dict)


# ------------------------------------------------------------ environments

ACTIONS = {
    "start": ("open",),
    "choose": ("one-box", "two-box"),
    "full": ("one-box", "two-box"),
    "empty": ("one-box", "two-box"),
    "decide": ("abstain", "smoke"),
}
DECISION_STATES = {
    "repeated-newcomb": ("choose",),
    "repeated-transparent-newcomb": ("full", "empty"),
    "repeated-lesion": ("decide",),
}


def _predict(action: str, accuracy: float, rng) -> str:
    if rng.random() < accuracy:
        return action
    return "two-box" if action == "one-box" else "one-box"


def _episode(env: str, choose, cfg: TrainConfig, rng) -> list[Step]:
    if env == "repeated-newcomb":
        planned = choose("choose")
        pred = _predict(planned, cfg.accuracy, rng)
        hidden = {"prediction": pred}
        return [Step("start", "open", BIG if pred == "one-box" else 0, hidden),
                Step("choose", planned, SMALL if planned == "two-box" else 0, hidden)]
    if env == "repeated-transparent-newcomb":
        planned = choose("full")
        pred = _predict(planned, cfg.accuracy, rng)
        hidden = {"prediction": pred}
        state = "full" if pred == "one-box" else "empty"
        act = planned if state == "full" else choose("empty")
        return [Step("start", "open", BIG if pred == "one-box" else 0, hidden),
                Step(state, act, SMALL if act == "two-box" else 0, hidden)]
    if env == "repeated-lesion":
        act = choose("decide")
        p = cfg.p_lesion_smoke if act == "smoke" else cfg.p_lesion_abstain
        lesion = bool(rng.random() < p)
        reward = (SMOKE_BONUS if act == "smoke" else 0) - (CANCER_COST if lesion else 0)
        return [Step("decide", act, reward, {"lesion": lesion})]
    raise ValueError(f"unknown env {env!r}")


def counterfactual_feedback(env: str, state: str, action: str, hidden: dict | None = None) -> dict:
    """Episode payoff each unchosen action would have earned, hidden state held fixed."""
    if env not in ENV_IDS:
        raise CounterfactualUnsupported(f"unknown env {env!r}")
    hidden = hidden or {}
    actions = ACTIONS.get(state, ())
    if action not in actions:
        raise ValueError(f"{action!r} is not available in state {state!r}")
    out = {}
    for b in actions:
        if b == action:
            continue
        if env == "repeated-lesion":
            out[b] = (SMOKE_BONUS if b == "smoke" else 0) - (CANCER_COST if hidden.get("lesion") else 0)
        else:
            box_a = BIG if hidden.get("prediction") == "one-box" else 0
            out[b] = box_a + (SMALL if b == "two-box" else 0)
    return out


def _step_payoffs(env: str, step: Step) -> dict:
    """Immediate reward of every action at a decision step, hidden state fixed."""
    out = {}
    for b in ACTIONS[step.state]:
        if env == "repeated-lesion":
            out[b] = (SMOKE_BONUS if b == "smoke" else 0) - (CANCER_COST if step.hidden["lesion"] else 0)
        else:
            out[b] = SMALL if b == "two-box" else 0
    return out


# ------------------------------------------------------------ learners


@dataclass(frozen=True)
class TrainStats:
    env: str
    learner: str
    final_greedy: dict
    frequency: dict  # state -> action -> share over the final window
    converged: bool
    reward_curve: tuple  # per-episode unscaled return
    greedy_curve: tuple = field(default=(), repr=False)  # per-episode greedy action per decision state

    def behavior(self, state: str | None = None) -> str:
        state = state or DECISION_STATES[self.env][0]
        return self.final_greedy[state] if self.converged else "nonconverged"


def _softmax(x: np.ndarray) -> np.ndarray:
    z = np.exp(x - x.max())
    return z / z.sum()


def train(env: str, learner: str, cfg: TrainConfig = TrainConfig()) -> TrainStats:
    """Run one seeded training job; identical inputs give identical stats."""
    if env not in ENV_IDS:
        raise ValueError(f"unknown env {env!r}")
    if learner not in LEARNER_IDS:
        raise ValueError(f"unknown learner {learner!r}")
    if cfg.episodes < 1:
        raise ValueError("episodes must be >= 1")
    rng = np.random.default_rng(cfg.seed)
    scale = cfg.reward_scale if cfg.reward_scale is not None else REWARD_SCALE[env]
    states = ("start",) + DECISION_STATES[env] if env != "repeated-lesion" else DECISION_STATES[env]
    table = {s: np.zeros(len(ACTIONS[s])) for s in states}
    is_pg = learner.startswith("pg-")
    decision_states = DECISION_STATES[env]

    def greedy(s: str) -> str:
        return ACTIONS[s][int(np.argmax(table[s]))]

    rewards, greedies, taken = [], [], []
    for t in range(cfg.episodes):
        eps, lr = cfg.explore(t), cfg.step_size(t)
        draws: dict = {}

        def choose(s: str) -> str:
            u = rng.random()
            if is_pg:
                probs = _softmax(table[s])
                a = int(np.searchsorted(np.cumsum(probs), u, side="right"))
                a = min(a, len(probs) - 1)
            elif u < eps:
                a = int(rng.integers(len(ACTIONS[s])))
            else:
                a = int(np.argmax(table[s]))
            draws[s] = a
            return ACTIONS[s][a]

        steps = _episode(env, choose, cfg, rng)
        scaled = [st.reward * scale for st in steps]
        if is_pg:
            total = sum(scaled)
            for i, st in enumerate(steps):
                if len(ACTIONS[st.state]) < 2:
                    continue
                g = total if learner == "pg-episode-return" else sum(scaled[i:])
                a = ACTIONS[st.state].index(st.action)
                grad = -_softmax(table[st.state])
                grad[a] += 1.0
                table[st.state] += lr * g * grad
        else:
            for i, st in enumerate(steps):
                a = ACTIONS[st.state].index(st.action)
                nxt = steps[i + 1] if i + 1 < len(steps) else None
                if nxt is None:
                    boot = 0.0
                elif learner == "sarsa":
                    boot = table[nxt.state][ACTIONS[nxt.state].index(nxt.action)]
                else:
                    boot = float(table[nxt.state].max())
                if learner == "q-counterfactual" and st.state in decision_states:
                    for b, r in _step_payoffs(env, st).items():
                        j = ACTIONS[st.state].index(b)
                        table[st.state][j] += lr * (r * scale + cfg.gamma * boot - table[st.state][j])
                else:
                    table[st.state][a] += lr * (scaled[i] + cfg.gamma * boot - table[st.state][a])
        rewards.append(float(sum(st.reward for st in steps)))
        greedies.append(tuple(greedy(s) for s in decision_states))
        taken.append({st.state: st.action for st in steps if st.state in decision_states})

    w = cfg.window()
    freq = {}
    for s in decision_states:
        seen = [ep[s] for ep in taken[-w:] if s in ep]
        c = Counter(seen)
        freq[s] = {a: (c[a] / len(seen) if seen else 0.0) for a in ACTIONS[s]}
    converged = len(set(greedies[-w:])) == 1
    return TrainStats(env, learner, {s: greedy(s) for s in decision_states}, freq, converged,
                      tuple(rewards), tuple(greedies))


def is_converged(greedy_curve, window: int) -> bool:
    """Convergence flag recomputed from a stored greedy curve."""
    return len(set(greedy_curve[-window:])) == 1


@dataclass(frozen=True)
class SweepReport:
    env: str
    outcomes: dict  # learner -> Counter of behaviour labels
    frequencies: dict  # learner -> list of final-window decision-state frequencies
    runs: dict = field(default_factory=dict, repr=False)

    def count(self, learner: str, *labels: str) -> int:
        return sum(self.outcomes[learner][lab] for lab in labels)

    def majority_share(self, learner: str, state: str, action: str, threshold: float) -> int:
        return sum(1 for f in self.frequencies[learner] if f[state][action] >= threshold)


def sweep(env: str, learners, seeds, cfg: TrainConfig = TrainConfig()) -> SweepReport:
    seeds = list(seeds)
    if not seeds:
        raise ValueError("seed list must be nonempty")
    outcomes, freqs, runs = {}, {}, {}
    for learner in learners:
        stats = [train(env, learner, replace(cfg, seed=s)) for s in seeds]
        outcomes[learner] = Counter(st.behavior() for st in stats)
        freqs[learner] = [st.frequency for st in stats]
        runs[learner] = stats
    return SweepReport(env, outcomes, freqs, runs)


def reward_table(stats: TrainStats) -> str:
    """Comma-separated episode,return table for plotting."""
    lines = ["episode,return"] + [f"{i},{r:g}" for i, r in enumerate(stats.reward_curve)]
    return "\n".join(lines) + "\n"
