"""Per-spec verification bundle: closed form against the oracle, regrets,
and the leadership checks.  Used by ``inspection-game verify``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

from . import closed_form as cf
from .combinatorics import binom, s_alt, s_beta
from .leadership import LeadershipError, check_legal_preference, solve_leadership
from .model import GameSpec, Variant, is_interior, stage_game, validate
from .oracle import InfoMode, StageError, solve_recursive
from .simulation import exploitability_report


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


def _indifference(spec: GameSpec) -> Check:
    for state in sorted(cf.closed_form_table(spec)):
        if not is_interior(state) or cf.is_degenerate(state, spec):
            continue
        sol = cf.solve_state(state, spec)
        stage = stage_game(state, spec, lambda s: cf.payoffs(s, spec))
        p, q = sol.p, sol.q
        A, B, C, D = stage.inspector
        a_, b_, c_, d_ = stage.inspectee
        if p * a_ + (1 - p) * c_ != p * b_ + (1 - p) * d_:
            return Check("indifference", False, f"inspectee not indifferent at {tuple(state)}")
        if (1 - q) * A + q * B != (1 - q) * C + q * D:
            return Check("indifference", False, f"inspector not indifferent at {tuple(state)}")
    return Check("indifference", True)


def _kernel(spec: GameSpec) -> Check:
    beta = spec.b
    for n in range(1, spec.n + 1):
        for m in range(0, n + 1):
            if s_alt(n, m, beta) != s_beta(n, m, beta):
                return Check("kernel_identities", False, f"alternative sum differs at {(n, m)}")
            if 0 < m < n and s_beta(n, m, beta) != s_beta(n - 1, m - 1, beta) + s_beta(n - 1, m, beta):
                return Check("kernel_identities", False, f"Pascal rule fails at {(n, m)}")
            if 0 < m <= n - 1 and beta * s_beta(n - 1, m - 1, beta) != s_beta(n - 1, m, beta) - binom(n - 1, m):
                return Check("kernel_identities", False, f"shift identity fails at {(n, m)}")
    return Check("kernel_identities", True)


def _simultaneous_checks(spec: GameSpec) -> List[Check]:
    checks = [_kernel(spec)]
    try:
        table = solve_recursive(spec)
    except StageError as exc:
        return checks + [Check("oracle", False, str(exc))]
    mismatches = []
    for state, sol in table.entries.items():
        ref = cf.solve_state(state, spec)
        if (sol.inspector_value, sol.inspectee_value, sol.p, sol.q) != (
            ref.inspector_value, ref.inspectee_value, ref.p, ref.q,
        ):
            mismatches.append(tuple(state))
    checks.append(
        Check(
            "closed_form_matches_oracle",
            not mismatches,
            f"{len(table)} states" if not mismatches else f"mismatch at {sorted(mismatches)[:5]}",
        )
    )
    try:
        sched = table.inspector_schedule()
        same = all(sched[key] == p for key, p in cf.schedule(spec).items() if key in sched)
        checks.append(Check("k_free_schedule", same))
    except ValueError as exc:
        checks.append(Check("k_free_schedule", False, str(exc)))
    checks.append(_indifference(spec))
    profile = cf.equilibrium_profile(spec)
    for mode in InfoMode:
        regrets = exploitability_report(spec, profile, mode)
        checks.append(
            Check(
                f"zero_regret_{mode.value}",
                regrets == (0, 0),
                f"inspector {regrets[0]}, inspectee {regrets[1]}",
            )
        )
    return checks


def _leadership_checks(spec: GameSpec) -> List[Check]:
    checks = []
    try:
        sol = solve_leadership(spec)
    except (LeadershipError, ValueError) as exc:
        return [Check("leadership_solve", False, str(exc))]
    nz = spec.with_params(variant=Variant.NON_ZERO_SUM)
    bad = [
        s for s in sol.u
        if sol.u[s] != -sol.w[s] or sol.w[s] != cf.nonzero_payoffs(s, nz)[1]
    ]
    checks.append(Check("u_equals_minus_w", not bad, "" if not bad else f"fails at {bad[:5]}"))
    root = spec.root
    gain = sol.gain_factor
    scaled = gain * cf.nonzero_payoffs(root, nz)[0] == sol.u[root]
    in_range = (0 < gain < 1) if is_interior(root) else True
    checks.append(Check("gain_factor", scaled and in_range, f"factor {gain}"))
    bad = [
        s for s, out in sol.outcomes.items()
        if out.nash_value is not None and not out.leader_value > out.nash_value
    ]
    # a zero reward can make B <= D; such stages have no mixed N to compare with
    skipped = sum(out.nash_value is None for out in sol.outcomes.values())
    detail = f"fails at {bad[:5]}" if bad else (f"{skipped} non-circular stages skipped" if skipped else "")
    checks.append(Check("leader_beats_nash", not bad, detail))
    pref = all(
        check_legal_preference(n, m, spec.a, spec.b)[0]
        for (n, m) in sol.schedule
        if 0 < m < n
    )
    checks.append(Check("legal_preference", pref))
    return checks


def run_checks(spec: GameSpec) -> List[Check]:
    validate(spec)
    if spec.variant is Variant.LEADERSHIP:
        return _leadership_checks(spec)
    return _simultaneous_checks(spec)
