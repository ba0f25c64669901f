"""Search for one- and two-bet Dutch books against each theory on the anthropic dilemmas."""

import argparse

from gauntlet import exploit as ex
from gauntlet.scenarios import build
from gauntlet.theories import THEORIES


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--bound", type=int, default=8)
    args = p.parse_args()
    for sid in ("sleeping-beauty-classic", "sleeping-beauty-wbg"):
        d = build(sid)
        for rule in ("ssa", "sia"):
            for th in THEORIES:
                menu = ex.search_dutch_book(d, th, rule, args.bound)
                found = "none" if menu is None else "; ".join(
                    f"{b.offer}:{b.var}{dict((k, str(v)) for k, v in b.payoffs.items())}" for b in menu)
                print(f"{sid:24s} {rule}  {th:18s} {found}")


if __name__ == "__main__":
    main()
