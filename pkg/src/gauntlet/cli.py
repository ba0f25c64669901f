"""Command-line front end.

Exit codes: 0 success, 1 a verified claim failed, 2 usage error, 3 invalid
dilemma or parameters, 4 computation error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import divergence as dv
from . import exploit as ex
from . import learninglab as ll
from .core import DilemmaError, Dilemma, expected_utility, validate
from .credence import UnreachableInfosetError
from .fileformat import DilemmaFileError, dumps, parse_dilemma
from .scenarios import SCENARIO_IDS, ScenarioError, build
from .theories import THEORIES, UPDATELESS, induced_policy, optimal_policy, recommend

EXIT_OK, EXIT_CLAIM, EXIT_USAGE, EXIT_VALIDATION, EXIT_COMPUTE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


# ------------------------------------------------------------ helpers


def jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, float):
        return round(x, 12)
    return x


def default_seed() -> int:
    raw = os.environ.get("GAUNTLET_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"GAUNTLET_SEED must be an integer, got {raw!r}") from None


def _params(pairs) -> dict:
    out = {}
    for item in pairs or ():
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _theories(spec: str) -> list[str]:
    if spec == "all":
        return list(THEORIES)
    names = [t.strip() for t in spec.split(",") if t.strip()]
    bad = [t for t in names if t not in THEORIES]
    if bad or not names:
        raise UsageError(f"unknown theory {', '.join(bad) or spec!r}; choose from {', '.join(THEORIES)}")
    return names


def _load(target: str, params: dict):
    if target in SCENARIO_IDS:
        return build(target, params)
    path = Path(target)
    if path.suffix == ".json" or path.exists():
        if params:
            raise UsageError("--param applies to builtin scenarios only")
        if not path.exists():
            raise UsageError(f"no such file: {target}")
        return parse_dilemma(path)
    raise UsageError(f"unknown scenario {target!r}; choose from {', '.join(SCENARIO_IDS)} or pass a .json file")


def _meta(command: str, target: str, seed: int, params: dict, **extra) -> dict:
    return {"version": __version__, "command": command, "scenario": target, "seed": seed,
            "params": params, **extra}


def _emit(report: dict, fmt: str, out: str | None, render) -> None:
    text = json.dumps(jsonable(report), indent=2, ensure_ascii=False) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    sys.stdout.write(text if fmt == "json" else render(report))


def _table(headers: list[str], rows: list[list]) -> str:
    cells = [[str(c) for c in headers]] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------ run


def _theory_row(d: Dilemma, theory: str, rule: str) -> dict:
    row: dict = {"theory": theory}
    try:
        if theory in UPDATELESS:
            rec = optimal_policy(d, theory)
            row["policy_value"] = rec.value
            row["optimal_policies"] = list(rec.best)
        else:
            recs = {}
            for infoset in d.infosets:
                try:
                    r = recommend(d, infoset, theory, rule)
                    recs[infoset] = {"ev": dict(r.ev), "best": list(r.best)}
                except UnreachableInfosetError:
                    recs[infoset] = "unreachable"
            row["recommendations"] = recs
        pi = induced_policy(d, theory, rule)
        row["induced_policy"] = pi
        row["realized"] = expected_utility(d, pi)
        if d.bets:
            rep = ex.evaluate_bets(d, theory, rule)
            row["exploit"] = _exploit_dict(rep)
        if d.name == "money-pump":
            trace = ex.run_money_pump(d, theory, None, rule)
            row["pump"] = {"total": trace.total, "rounds": [
                {"round": r.round, "perceived": r.perceived, "action": r.action, "box": r.box,
                 "realized": r.realized} for r in trace.rows]}
    except DilemmaError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _exploit_dict(rep: ex.ExploitReport) -> dict:
    return {
        "verdict": rep.verdict,
        "bets": [{"name": b.name, "offer": b.offer, "ev": b.ev, "accepted": b.accepted} for b in rep.decisions],
        "nets": [{"outcome": n.outcome, "prob": n.prob, "net": n.net} for n in rep.nets],
        "worst": rep.worst, "best": rep.best, "expected": rep.expected,
    }


def _divergence_summary(game: dv.GameSpec, seed: int) -> dict:
    if game.game == "st-petersburg":
        series = dv.st_petersburg_series(10)
        return {"partial_ev": list(series.partial_sums), "diverges": series.diverges,
                "terms_to_exceed_price_100": dv.price_witness(100)}
    if game.game == "quit-flip":
        series = dv.naive_quit_flip_ev(game.alpha, 10)
        sim = dv.simulate_never_quit(game.alpha, 10_000, seed)
        return {"partial_sums": list(series.partial_sums), "diverges": series.diverges,
                "caveat": series.caveat, "never_quit_trials": sim.trials,
                "never_quit_negative_fraction": sim.negative_fraction, "never_quit_mean_turns": sim.mean_turns}
    if game.game == "reservoir":
        verdict = dv.bellman_convergence(dv.BellmanSpec(game.gamma, game.growth))
        unbounded = dv.reservoir_decision(game.growth, game.cost, game.gamma, None)
        bounded = dv.reservoir_decision(game.growth, game.cost, game.gamma, 5)
        return {"ratio": verdict.ratio, "converges": verdict.converges,
                "value_iteration_shrinks": verdict.empirical_shrinks,
                "unbounded_plan": list(unbounded.decisions), "unbounded_realized": list(unbounded.realized),
                "horizon5_plan": list(bounded.decisions), "horizon5_realized": list(bounded.realized)}
    out = {}
    for agent in ("naive-ev", "fdt-bounded"):
        t = dv.iterated_reentry_trace(game.fee, 10, agent, seed=seed)
        out[agent] = {"reentries": sum(r.reenter for r in t.rounds), "fees": t.total_fees,
                      "quit_round": t.quit_round}
    return out


def _render_run(report: dict) -> str:
    lines = [f"{report['meta']['scenario']}  (rule {report['meta'].get('rule', '-')}, seed {report['meta']['seed']})\n"]
    if "divergence" in report:
        for k, v in report["divergence"].items():
            lines.append(f"  {k}: {jsonable(v)}\n")
        return "".join(lines)
    rows = []
    for r in report["theories"]:
        if "error" in r:
            rows.append([r["theory"], "error", r["error"], "", ""])
            continue
        pol = ", ".join(f"{k}={v}" for k, v in r["induced_policy"].items())
        verdict = r.get("exploit", {}).get("verdict", "")
        nets = ""
        if "exploit" in r:
            nets = " ".join(str(n["net"]) for n in r["exploit"]["nets"])
        rows.append([r["theory"], pol, str(r["realized"]), verdict, nets])
    lines.append(_table(["theory", "induced policy", "realized", "verdict", "bet nets"], rows))
    return "".join(lines)


def cmd_run(args) -> int:
    params = _params(args.param)
    theories = _theories(args.theories)
    obj = _load(args.target, params)
    meta = _meta("run", args.target, args.seed, params, rule=args.rule, theories=theories)
    if isinstance(obj, dv.GameSpec):
        report = {"meta": meta, "divergence": _divergence_summary(obj, args.seed)}
        _emit(report, args.format, args.out, _render_run)
        return EXIT_OK
    issues = validate(obj)
    if not issues.ok:
        raise DilemmaFileError([str(i) for i in issues.issues], "validation")
    rows = [_theory_row(obj, th, args.rule) for th in theories]
    report = {"meta": meta, "theories": rows}
    _emit(report, args.format, args.out, _render_run)
    return EXIT_COMPUTE if any("error" in r for r in rows) else EXIT_OK


# ------------------------------------------------------------ verify-paper


def cmd_verify(args) -> int:
    from .verification import run_claims
    overrides: dict = {}
    for item in args.set or ():
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise UsageError(f"--set expects scenario.param=value, got {item!r}")
        key, value = item.split("=", 1)
        sid, param = key.split(".", 1)
        overrides.setdefault(sid, {})[param] = value
    claims = run_claims(overrides, rl=not args.no_rl, fuzz_n=args.fuzz)
    report = {
        "meta": _meta("verify-paper", "-", args.seed, {k: v for k, v in overrides.items()}),
        "summary": {"claims": len(claims), "passed": sum(c.passed for c in claims),
                    "failed": [c.id for c in claims if not c.passed]},
        "claims": [{"id": c.id, "criterion": c.criterion, "description": c.description,
                    "expected": c.expected, "computed": c.computed, "passed": c.passed} for c in claims],
    }

    def render(rep):
        rows = [[c["criterion"], c["id"], "PASS" if c["passed"] else "FAIL", c["expected"], c["computed"]]
                for c in rep["claims"]]
        s = rep["summary"]
        return _table(["#", "claim", "result", "expected", "computed"], rows) + \
            f"\n{s['passed']}/{s['claims']} claims passed\n"
    _emit(report, args.format, args.out, render)
    failed = [c for c in claims if not c.passed]
    for c in failed:
        print(f"claim failed: {c.id} (criterion {c.criterion}): expected {c.expected}, computed {c.computed}",
              file=sys.stderr)
    return EXIT_CLAIM if failed else EXIT_OK


# ------------------------------------------------------------ learn


def cmd_learn(args) -> int:
    if args.env not in ll.ENV_IDS:
        raise UsageError(f"unknown env {args.env!r}; choose from {', '.join(ll.ENV_IDS)}")
    learners = ll.LEARNER_IDS if args.learner == "all" else tuple(args.learner.split(","))
    bad = [x for x in learners if x not in ll.LEARNER_IDS]
    if bad:
        raise UsageError(f"unknown learner {', '.join(bad)}; choose from {', '.join(ll.LEARNER_IDS)}")
    if args.episodes < 1 or args.seeds < 1:
        raise UsageError("--episodes and --seeds must be >= 1")
    cfg = ll.TrainConfig(episodes=args.episodes)
    seeds = list(range(args.seed, args.seed + args.seeds))
    rep = ll.sweep(args.env, learners, seeds, cfg)
    report = {
        "meta": _meta("learn", args.env, args.seed, {"episodes": args.episodes, "seeds": args.seeds}),
        "learners": {lr: {"outcomes": dict(sorted(rep.outcomes[lr].items())),
                          "mean_final_frequency": {
                              s: {a: sum(f[s][a] for f in rep.frequencies[lr]) / len(seeds)
                                  for a in ll.ACTIONS[s]} for s in ll.DECISION_STATES[args.env]}}
                     for lr in learners},
    }
    if args.curve_csv:
        first = rep.runs[learners[0]][0]
        Path(args.curve_csv).write_text(ll.reward_table(first), encoding="utf-8")

    def render(r):
        rows = [[lr, ", ".join(f"{k}: {v}" for k, v in d["outcomes"].items())] for lr, d in r["learners"].items()]
        return f"{args.env}, {args.seeds} seeds x {args.episodes} episodes\n" + _table(["learner", "outcomes"], rows)
    _emit(report, args.format, args.out, render)
    return EXIT_OK


# ------------------------------------------------------------ audit


def cmd_audit(args) -> int:
    if args.bound < 1:
        raise UsageError("--bound must be >= 1")
    if args.theory not in THEORIES:
        raise UsageError(f"unknown theory {args.theory!r}; choose from {', '.join(THEORIES)}")
    params = _params(args.param)
    d = _load(args.target, params)
    if isinstance(d, dv.GameSpec):
        raise UsageError(f"{args.target} has no finite outcome space to bet on")
    menu = ex.search_dutch_book(d, args.theory, args.rule, args.bound)
    size = ex.search_space_size(d, args.bound)
    report = {"meta": _meta("audit", args.target, args.seed, params, theory=args.theory, rule=args.rule,
                            bound=args.bound),
              "searched_menus": size}
    if menu is None:
        report["result"] = "none"
        report["statement"] = (f"no Dutch book among all {size} menus of one or two bets with integer "
                               f"payoffs in [-{args.bound}, {args.bound}]")
    else:
        report["result"] = "certificate"
        report["menu"] = [{"name": b.name, "offer": b.offer, "var": b.var, "payoffs": dict(b.payoffs)}
                          for b in menu]
        report["exploit"] = _exploit_dict(ex.evaluate_bets(ex.bind_bets(ex.strip_bets(d), menu),
                                                           args.theory, args.rule))

    def render(r):
        head = f"audit {r['meta']['scenario']} / {args.theory} / {args.rule}, bound {args.bound}\n"
        if r["result"] == "none":
            return head + r["statement"] + "\n"
        rows = [[b["name"], b["offer"], b["var"], jsonable(b["payoffs"])] for b in r["menu"]]
        nets = ", ".join(str(n["net"]) for n in r["exploit"]["nets"])
        return head + _table(["bet", "offer", "on", "payoffs"], rows) + \
            f"verdict {r['exploit']['verdict']}; nets {nets}\n"
    _emit(report, args.format, args.out, render)
    return EXIT_OK


# ------------------------------------------------------------ export


def cmd_export(args) -> int:
    params = _params(args.param)
    obj = _load(args.target, params)
    if isinstance(obj, dv.GameSpec):
        raise UsageError(f"{args.target} is an infinite game and has no dilemma file")
    text = dumps(obj)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ------------------------------------------------------------ entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gauntlet", description="Adversarial decision-theory dilemmas, exactly evaluated.")
    p.add_argument("--version", action="version", version=f"gauntlet {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed=True):
        sp.add_argument("--out", help="write the JSON report here")
        sp.add_argument("--format", choices=("json", "table"), default="table")
        if seed:
            sp.add_argument("--seed", type=int, default=None, help="default: $GAUNTLET_SEED or 0")

    r = sub.add_parser("run", help="evaluate a scenario or dilemma file under several theories")
    r.add_argument("target")
    r.add_argument("--theories", default="all")
    r.add_argument("--rule", choices=("ssa", "sia"), default="ssa")
    r.add_argument("--param", action="append", metavar="KEY=VALUE")
    common(r)
    r.set_defaults(fn=cmd_run)

    v = sub.add_parser("verify-paper", help="check every reproduced claim")
    v.add_argument("--set", action="append", metavar="SCENARIO.PARAM=VALUE",
                   help="override a scenario parameter (mutation testing)")
    v.add_argument("--no-rl", action="store_true", help="skip the learning suite")
    v.add_argument("--fuzz", type=int, default=1000, help="dilemmas per fuzz suite")
    common(v)
    v.set_defaults(fn=cmd_verify)

    lp = sub.add_parser("learn", help="train learners on a repeated dilemma across seeds")
    lp.add_argument("env")
    lp.add_argument("learner", help="learner id, comma list, or 'all'")
    lp.add_argument("--episodes", type=int, default=ll.TrainConfig().episodes)
    lp.add_argument("--seeds", type=int, default=20)
    lp.add_argument("--curve-csv", help="write the first run's reward curve as CSV")
    common(lp)
    lp.set_defaults(fn=cmd_learn)

    a = sub.add_parser("audit", help="search for a Dutch book against a theory")
    a.add_argument("target")
    a.add_argument("theory")
    a.add_argument("--rule", choices=("ssa", "sia"), default="ssa")
    a.add_argument("--bound", type=int, default=10)
    a.add_argument("--param", action="append", metavar="KEY=VALUE")
    common(a)
    a.set_defaults(fn=cmd_audit)

    e = sub.add_parser("export-scenario", help="write a builtin scenario as a dilemma file")
    e.add_argument("target")
    e.add_argument("--param", action="append", metavar="KEY=VALUE")
    e.add_argument("--out")
    e.set_defaults(fn=cmd_export)
    return p


def main(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
        if getattr(args, "seed", 0) is None:
            args.seed = default_seed()
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DilemmaFileError, ScenarioError) as exc:
        print(f"invalid input:\n{exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (DilemmaError, ValueError, ArithmeticError) as exc:
        print(f"computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
