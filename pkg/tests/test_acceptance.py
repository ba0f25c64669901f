"""One check per acceptance criterion, each backed by the verify-paper claims.

Run directly (``python3 tests/test_acceptance.py``) to print one PASS/FAIL
line per criterion; under pytest the same lines appear in the summary.
"""

import sys

import pytest

from gauntlet.verification import run_claims

CRITERIA = {
    1: "Newcomb matrix",
    2: "transparent Newcomb realized payoffs",
    3: "counterfactual mugging",
    4: "money pump",
    5: "smoking lesion and XOR blackmail",
    6: "insurance problem",
    7: "Sleeping Beauty credences",
    8: "Dutch book I (classic)",
    9: "Dutch book II (white-black-grey)",
    10: "divergent temporal models",
    11: "two envelopes",
    12: "learning suite over 20 seeds",
    13: "property suites",
}
LINES: list[str] = []


def summarize(claims) -> dict:
    out = {}
    for n in CRITERIA:
        mine = [c for c in claims if c.criterion == n]
        out[n] = (bool(mine) and all(c.passed for c in mine), mine)
    return out


def line(n, ok, mine) -> str:
    failed = ", ".join(c.id for c in mine if not c.passed)
    tail = f" failing: {failed}" if failed else ""
    return f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {CRITERIA[n]} ({sum(c.passed for c in mine)}/{len(mine)} claims){tail}"


@pytest.fixture(scope="module")
def results():
    claims = run_claims()
    yield claims, summarize(claims)


def test_claim_count(results):
    claims, _ = results
    assert len({c.id for c in claims}) >= 25


@pytest.mark.parametrize("n", list(CRITERIA))
def test_criterion(results, n):
    _, summary = results
    ok, mine = summary[n]
    LINES.append(line(n, ok, mine))
    assert mine, f"no claims cover criterion {n}"
    assert ok, "; ".join(f"{c.id}: expected {c.expected}, computed {c.computed}" for c in mine if not c.passed)


if __name__ == "__main__":
    summary = summarize(run_claims())
    for n, (ok, mine) in summary.items():
        print(line(n, ok, mine))
    sys.exit(0 if all(ok for ok, _ in summary.values()) else 1)
