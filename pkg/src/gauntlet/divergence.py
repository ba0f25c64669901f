"""Infinite-horizon pathologies: St. Petersburg, procrastination, Bellman growth.

These games have no finite outcome space, so they are handled analytically
(exact partial sums, closed-form comparisons) or by seeded Monte Carlo.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import rational

GAME_IDS = ("st-petersburg", "iterated-st-petersburg", "quit-flip", "reservoir")


@dataclass(frozen=True)
class GameSpec:
    game: str
    start: Fraction = Fraction(2)
    alpha: Fraction = Fraction(3)
    fee: Fraction = Fraction(1)
    growth: Fraction = Fraction(2)
    cost: Fraction = Fraction(1)
    gamma: Fraction = Fraction(3, 4)

    def __post_init__(self):
        if self.game not in GAME_IDS:
            raise ValueError(f"unknown game {self.game!r}")
        if self.alpha <= 1 or self.growth <= 1:
            raise ValueError("alpha and growth must exceed 1")
        if not (0 <= self.gamma < 1):
            raise ValueError("gamma must lie in [0, 1)")


@dataclass(frozen=True)
class SeriesAnalysis:
    partial_sums: tuple
    diverges: bool
    caveat: str = ""
    terms: tuple = field(default=(), repr=False)

    def witness(self, threshold) -> int | None:
        """First index (1-based) whose partial sum exceeds ``threshold``."""
        threshold = rational(threshold)
        for k, s in enumerate(self.partial_sums, start=1):
            if s > threshold:
                return k
        return None


def st_petersburg_partial_ev(k: int) -> Fraction:
    """Sum of the first ``k`` terms of 2^j / 2^j."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return sum((Fraction(2**j, 2**j) for j in range(1, k + 1)), Fraction(0))


def st_petersburg_series(k: int) -> SeriesAnalysis:
    sums, s = [], Fraction(0)
    for j in range(1, k + 1):
        s += Fraction(2**j, 2**j)
        sums.append(s)
    return SeriesAnalysis(tuple(sums), diverges=True)


def price_witness(price) -> int:
    """Smallest number of terms whose partial EV exceeds ``price``.

    Exists for every finite price, which is the whole paradox.
    """
    price = rational(price)
    k = max(1, int(price // 1) + 1)
    while st_petersburg_partial_ev(k) <= price:
        k += 1
    return k


def quit_flip_term(alpha, k: int) -> Fraction:
    alpha = rational(alpha)
    return (2 * alpha ** (k - 1) - k) / Fraction(2**k)


def naive_quit_flip_ev(alpha, terms: int) -> SeriesAnalysis:
    """Partial sums of the naive never-quit appraisal of the quit/flip game."""
    alpha = rational(alpha)
    if terms < 1:
        raise ValueError("terms must be >= 1")
    ts = tuple(quit_flip_term(alpha, k) for k in range(1, terms + 1))
    sums, s = [], Fraction(0)
    for t in ts:
        s += t
        sums.append(s)
    caveat = ""
    if alpha == 2:
        caveat = ("alpha = 2 sits on the boundary: terms tend to 1 and the series still "
                  "diverges, but the alpha > 2 criterion classifies it as non-divergent")
    return SeriesAnalysis(tuple(sums), diverges=alpha > 2, caveat=caveat, terms=ts)


@dataclass(frozen=True)
class NeverQuitSummary:
    trials: int
    terminated: int
    negative_fraction: float
    mean_turns: float
    utilities: np.ndarray = field(repr=False, compare=False)


def simulate_never_quit(alpha, trials: int, seed: int) -> NeverQuitSummary:
    """Monte Carlo of the quit/flip game for an agent that never quits.

    The game ends at the first tails; ending at turn k loses k, whatever
    ``alpha`` is, because the winnings vanish.
    """
    rational(alpha)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    turns = rng.geometric(0.5, size=trials)
    utilities = -turns
    return NeverQuitSummary(trials, trials, float(np.mean(utilities < 0)),
                            float(np.mean(turns)), utilities)


@dataclass(frozen=True)
class ReentryRound:
    round: int
    winnings: int
    appraisal: str
    reenter: bool
    fee_paid: Fraction


@dataclass(frozen=True)
class ReentryTrace:
    agent: str
    rounds: tuple
    total_fees: Fraction
    quit_round: int | None


def iterated_reentry_trace(fee, rounds: int, agent: str, *, horizon: int = 10,
                           seed: int = 0) -> ReentryTrace:
    """Offer ``rounds`` chances to forfeit winnings and pay ``fee`` to replay.

    ``naive-ev`` compares its finite winnings to the divergent replay value and
    always re-enters.  ``fdt-bounded`` scores every quit-after-j policy
    (j = 0..horizon) by its horizon-truncated value, final game value H minus
    j fees, and follows the best one (smallest j on ties).
    """
    fee = rational(fee)
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if agent not in ("naive-ev", "fdt-bounded"):
        raise ValueError(f"unknown agent {agent!r}")
    rng = np.random.default_rng(seed)
    if agent == "naive-ev":
        planned = rounds
    else:
        value_h = st_petersburg_partial_ev(horizon)
        scores = [value_h - j * fee for j in range(horizon + 1)]
        planned = scores.index(max(scores))
    rows, total, quit_round = [], Fraction(0), None
    for r in range(1, rounds + 1):
        winnings = 2 ** int(rng.geometric(0.5))
        reenter = r <= planned
        paid = fee if reenter else Fraction(0)
        total += paid
        appraisal = "divergent" if agent == "naive-ev" else str(st_petersburg_partial_ev(horizon))
        rows.append(ReentryRound(r, winnings, appraisal, reenter, paid))
        if not reenter:
            quit_round = r
            break
    return ReentryTrace(agent, tuple(rows), total, quit_round)


@dataclass(frozen=True)
class BellmanSpec:
    gamma: Fraction
    growth: Fraction
    sweeps: int = 24

    def __post_init__(self):
        if not (0 <= self.gamma < 1):
            raise ValueError("gamma must lie in [0, 1)")


@dataclass(frozen=True)
class BellmanVerdict:
    converges: bool
    ratio: Fraction
    empirical_shrinks: bool
    differences: tuple

    @property
    def agrees(self) -> bool:
        return self.converges == self.empirical_shrinks


def bellman_convergence(spec: BellmanSpec) -> BellmanVerdict:
    """Geometric criterion plus value iteration on a growing-reward chain.

    State t pays growth**t; value iteration V_n(t) = r(t) + gamma V_{n-1}(t+1)
    is run exactly, and the successive differences at state 0 must shrink
    toward zero exactly when gamma * growth < 1.
    """
    gamma, g = rational(spec.gamma), rational(spec.growth)
    ratio = gamma * g
    n = spec.sweeps
    # values[t] for t = 0..n (enough states for n sweeps to reach state 0)
    values = [Fraction(0)] * (n + 2)
    prev0 = Fraction(0)
    diffs = []
    for _ in range(n):
        values = [g**t + gamma * values[t + 1] for t in range(n + 1)] + [Fraction(0)]
        diffs.append(abs(values[0] - prev0))
        prev0 = values[0]
    tail = diffs[1:]
    shrinks = all(b < a or b == 0 for a, b in zip(tail, tail[1:]))
    return BellmanVerdict(ratio < 1, ratio, shrinks, tuple(diffs))


@dataclass(frozen=True)
class ReservoirPlan:
    decisions: tuple  # "tap" / "wait" per state t = 0, 1, ...
    realized: tuple  # utility realized by the plan after each step
    unbounded: bool


def reservoir_decision(g, cost, gamma, horizon: int | None, *, states: int = 12) -> ReservoirPlan:
    """Tap-or-wait decisions for a reservoir worth g**t at step t.

    With ``horizon`` the plan is backward induction over that many steps (the
    last step taps).  With ``horizon=None`` the agent uses the infinite-horizon
    appraisal: if gamma * g >= 1 waiting is appraised as unbounded and it waits
    at every state; otherwise it compares tapping now against every finite
    delay in closed form.
    """
    g, cost, gamma = rational(g), rational(cost), rational(gamma)
    if g <= 1:
        raise ValueError("growth must exceed 1")
    if horizon is not None:
        if horizon < 1:
            raise ValueError("horizon must be >= 1")
        v = g ** (horizon - 1)
        plan = ["tap"]
        for t in range(horizon - 2, -1, -1):
            tap, wait = g**t, -cost + gamma * v
            plan.append("wait" if wait > tap else "tap")
            v = max(tap, wait)
        decisions = tuple(reversed(plan))
        unbounded = False
    elif gamma * g >= 1:
        decisions = ("wait",) * states
        unbounded = True
    else:
        out = []
        for t in range(states):
            tap = g**t
            best_delay = max(
                -cost * sum((gamma**j for j in range(k)), Fraction(0)) + (gamma * g) ** k * tap
                for k in range(1, 64))
            out.append("wait" if best_delay > tap else "tap")
        decisions = tuple(out)
        unbounded = False
    realized, total = [], Fraction(0)
    for t, choice in enumerate(decisions):
        if choice == "tap":
            total += g**t
            realized.append(total)
            break
        total -= cost
        realized.append(total)
    return ReservoirPlan(decisions, tuple(realized), unbounded)
