"""Print the realized payoff of every theory on every builtin finite dilemma."""

from gauntlet.core import DilemmaError, expected_utility
from gauntlet.divergence import GameSpec
from gauntlet.scenarios import SCENARIO_IDS, build
from gauntlet.theories import THEORIES, induced_policy


def main():
    rows = []
    for sid in SCENARIO_IDS:
        d = build(sid)
        if isinstance(d, GameSpec):
            continue
        cells = []
        for th in THEORIES:
            try:
                cells.append(str(expected_utility(d, induced_policy(d, th))))
            except DilemmaError as exc:
                cells.append(type(exc).__name__)
        rows.append([sid] + cells)
    header = ["scenario"] + list(THEORIES)
    widths = [max(len(r[i]) for r in rows + [header]) for i in range(len(header))]
    for r in [header] + rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)))


if __name__ == "__main__":
    main()
