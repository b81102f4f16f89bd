"""Command-line interface.

    inspection-game solve --spec game.json [--full-table] [--format csv]
    inspection-game schedule --spec game.json
    inspection-game leadership --spec game.json
    inspection-game simulate --spec game.json --trials 1000000 --seed 7
    inspection-game verify --spec game.json
    inspection-game sweep --b 0 --k 1 --n 2..6 --m 1..n-1

``--spec`` takes a path, ``-`` for stdin, or inline JSON.  Results go to
stdout; errors go to stderr as JSON.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from fractions import Fraction
from typing import Iterable, List, Optional

from . import closed_form as cf
from .leadership import LeadershipError, leadership_profile, solve_leadership
from .model import (
    GameSpec,
    GameSpecError,
    StateKey,
    StateSolution,
    Variant,
    load_spec,
    rational_from_json,
    rational_to_json,
    spec_to_dict,
    validate,
)
from .oracle import InfoMode
from .simulation import simulate

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_VERIFY_FAILED = 4


class CliError(Exception):
    def __init__(self, code: str, message: str, exit_code: int):
        super().__init__(message)
        self.code = code
        self.exit_code = exit_code


def _read_spec(source: str) -> GameSpec:
    if source == "-":
        text = sys.stdin.read()
    elif source.lstrip().startswith("{"):
        text = source
    else:
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise CliError("spec_unreadable", str(exc), EXIT_USAGE) from exc
    return load_spec(text)


def _frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _solution_dict(sol: StateSolution) -> dict:
    return {
        "state": {"n": sol.state.n, "m": sol.state.m, "k": sol.state.k},
        "inspector_value": rational_to_json(sol.inspector_value),
        "inspectee_value": rational_to_json(sol.inspectee_value),
        "p": rational_to_json(sol.p),
        "q": rational_to_json(sol.q),
        "degenerate": sol.degenerate,
    }


def _rational_columns(name: str, x) -> dict:
    return {name: _frac_str(x), f"{name}_decimal": f"{float(x):.12g}"}


def _solution_row(sol: StateSolution, extra: Optional[dict] = None) -> dict:
    row = dict(extra or {})
    row.update({"n": sol.state.n, "m": sol.state.m, "k": sol.state.k})
    row.update(_rational_columns("inspector_value", sol.inspector_value))
    row.update(_rational_columns("inspectee_value", sol.inspectee_value))
    row.update(_rational_columns("p", sol.p))
    row.update(_rational_columns("q", sol.q))
    row["degenerate"] = int(sol.degenerate)
    return row


def _write_csv(rows: List[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


# -- commands --------------------------------------------------------------

def cmd_solve(args) -> str:
    spec = _read_spec(args.spec)
    root = cf.solve_state(spec.root, spec)
    states = sorted(cf.closed_form_table(spec)) if args.full_table else [spec.root]
    if args.format == "csv":
        return _write_csv([_solution_row(cf.solve_state(s, spec)) for s in states])
    out = {"spec": spec_to_dict(spec), "root": _solution_dict(root)}
    if args.full_table:
        out["table"] = [_solution_dict(cf.solve_state(s, spec)) for s in states]
    return _dump(out)


def cmd_schedule(args) -> str:
    spec = _read_spec(args.spec)
    sched = cf.schedule(spec)
    rows = [{"n": n, "m": m, **_rational_columns("p", p)} for (n, m), p in sorted(sched.items())]
    if args.format == "csv":
        return _write_csv(rows)
    return _dump(
        {
            "spec": spec_to_dict(spec),
            "schedule": [{"n": n, "m": m, "p": rational_to_json(p)} for (n, m), p in sorted(sched.items())],
        }
    )


def cmd_leadership(args) -> str:
    spec = _read_spec(args.spec)
    sol = solve_leadership(spec)
    states = sorted(sol.u)
    if args.format == "csv":
        rows = []
        for s in states:
            row = {"n": s.n, "m": s.m, "k": s.k}
            row.update(_rational_columns("u", sol.u[s]))
            row.update(_rational_columns("w", sol.w[s]))
            rows.append(row)
        return _write_csv(rows)
    u, w = sol.root_payoffs
    out = {
        "spec": spec_to_dict(spec),
        "root": {"u": rational_to_json(u), "w": rational_to_json(w)},
        "gain_factor": rational_to_json(sol.gain_factor),
        "schedule": [
            {"n": n, "m": m, "p": rational_to_json(p)} for (n, m), p in sorted(sol.schedule.items())
        ],
    }
    if args.full_table:
        out["table"] = [
            {"n": s.n, "m": s.m, "k": s.k, "u": rational_to_json(sol.u[s]), "w": rational_to_json(sol.w[s])}
            for s in states
        ]
    return _dump(out)


def cmd_simulate(args) -> str:
    spec = _read_spec(args.spec)
    if spec.variant is Variant.LEADERSHIP:
        profile = leadership_profile(spec)
    else:
        profile = cf.equilibrium_profile(spec)
    report = simulate(spec, profile, args.trials, args.seed, InfoMode(args.info_mode))
    if args.format == "csv":
        return report.histogram_csv()
    return report.to_json()


def cmd_verify(args) -> str:
    from .verify import run_checks

    spec = _read_spec(args.spec)
    checks = run_checks(spec)
    root = cf.solve_state(spec.root, spec)
    passed = all(c.passed for c in checks)
    out = {
        "passed": passed,
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
        "root": _solution_dict(root),
    }
    text = _dump(out)
    if not passed:
        raise CliError("verification_failed", text, EXIT_VERIFY_FAILED)
    return text


_TERM = re.compile(r"\s*([+-]?)\s*(\d+|n|m)\s*")


def _eval_bound(expr: str, env: dict) -> int:
    expr = expr.strip()
    pos, total = 0, 0
    if not expr:
        raise CliError("bad_range", "empty range bound", EXIT_USAGE)
    while pos < len(expr):
        match = _TERM.match(expr, pos)
        if not match or (pos > 0 and not match.group(1)):
            raise CliError("bad_range", f"cannot read range bound {expr!r}", EXIT_USAGE)
        sign = -1 if match.group(1) == "-" else 1
        token = match.group(2)
        if token.isdigit():
            value = int(token)
        elif token in env:
            value = env[token]
        else:
            raise CliError("bad_range", f"{token!r} is not defined in {expr!r}", EXIT_USAGE)
        total += sign * value
        pos = match.end()
    return total


def _range(spec: str, env: dict) -> range:
    lo, sep, hi = spec.partition("..")
    lo_v = _eval_bound(lo, env)
    hi_v = _eval_bound(hi, env) if sep else lo_v
    return range(lo_v, hi_v + 1)


def _sweep_rows(args) -> Iterable[dict]:
    variant = Variant(args.variant)
    a = None if args.a is None else rational_from_json(args.a)
    reward = rational_from_json(args.reward)
    b_values = [rational_from_json(b) for b in args.b.split(",")]
    for b in b_values:
        for n in _range(args.n, {}):
            for m in _range(args.m, {"n": n}):
                for k in _range(args.k, {"n": n, "m": m}):
                    if m < 0 or k < 0 or n < 0:
                        continue
                    spec = validate(
                        GameSpec(n=n, m=m, k=k, b=b, a=a, rewards=(reward,) * k, variant=variant)
                    )
                    extra = {"b": _frac_str(b)}
                    if a is not None:
                        extra["a"] = _frac_str(a)
                    yield _solution_row(cf.solve_state(StateKey(n, m, k), spec), extra)


def cmd_sweep(args) -> str:
    rows = list(_sweep_rows(args))
    if not rows:
        raise CliError("empty_sweep", "sweep ranges produced no grid points", EXIT_USAGE)
    if args.format == "json":
        return _dump(rows)
    return _write_csv(rows)


# -- entry point -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="inspection-game", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, *, needs_spec=True, default_format="json"):
        p = sub.add_parser(name, help=help_text)
        if needs_spec:
            p.add_argument("--spec", required=True, help="path, '-' for stdin, or inline JSON")
        p.add_argument("--format", choices=("json", "csv"), default=default_format)
        p.set_defaults(func=func)
        return p

    p = add("solve", cmd_solve, "closed-form values and strategies")
    p.add_argument("--full-table", action="store_true")
    add("schedule", cmd_schedule, "k-free inspection schedule")
    p = add("leadership", cmd_leadership, "inspector leadership solution")
    p.add_argument("--full-table", action="store_true")
    p = add("simulate", cmd_simulate, "Monte Carlo play of the equilibrium profile")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--info-mode", choices=[m.value for m in InfoMode], default="informed")
    add("verify", cmd_verify, "closed form vs oracle, regrets, identities")
    p = add("sweep", cmd_sweep, "values over a parameter grid", needs_spec=False, default_format="csv")
    p.add_argument("--variant", default="ZeroSum", choices=[v.value for v in Variant])
    p.add_argument("--a", default=None)
    p.add_argument("--b", default="1", help="comma-separated list of penalty factors")
    p.add_argument("--reward", default="1", help="reward for every violation")
    p.add_argument("--n", default="1..5", help="range lo..hi")
    p.add_argument("--m", default="1..n-1", help="range; bounds may use n")
    p.add_argument("--k", default="1", help="range; bounds may use n and m")
    return parser


def _error(code: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": code, "message": message}, ensure_ascii=False) + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        output = args.func(args)
    except CliError as exc:
        if exc.exit_code == EXIT_VERIFY_FAILED:
            sys.stdout.write(str(exc) + "\n")
            _error(exc.code, "one or more checks failed")
        else:
            _error(exc.code, str(exc))
        return exc.exit_code
    except GameSpecError as exc:
        code = EXIT_USAGE if exc.code in ("invalid_json", "bad_document") else EXIT_INVALID
        _error(exc.code, exc.message)
        return code
    except LeadershipError as exc:
        _error(exc.code, str(exc))
        return EXIT_INVALID
    except (ValueError, OverflowError) as exc:
        _error("error", str(exc))
        return EXIT_ERROR
    sys.stdout.write(output if output.endswith("\n") else output + "\n")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
