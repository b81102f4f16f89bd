"""Monte Carlo play of a strategy profile, and exact exploitability.

Trials are simulated in fixed-size chunks.  Chunk ``c`` draws from a
Philox stream keyed by ``SeedSequence(seed, spawn_key=(c,))``, so the
random numbers of trial ``i`` depend only on ``(seed, i)``, never on the
order in which chunks are processed.  Payoffs are accumulated as exact
integers in units of ``1/scale``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np

from .model import (
    BehaviorStrategy,
    GameSpec,
    StateKey,
    caught_payoffs,
    rational_to_json,
    reward_at,
)
from .oracle import (
    InfoMode,
    Player,
    _check_profile,
    best_response_value,
    profile_value,
)

__all__ = ["SimulationReport", "simulate", "exploitability_report"]

CHUNK = 1 << 16


@dataclass
class SimulationReport:
    trials: int
    seed: int
    info_mode: str
    inspector_mean: float
    inspectee_mean: float
    inspector_mean_exact: Fraction
    inspectee_mean_exact: Fraction
    inspector_se: float
    inspectee_se: float
    inspector_target: Fraction
    inspectee_target: Fraction
    inspector_z: float
    inspectee_z: float
    caught_at_period: Dict[str, int] = field(default_factory=dict)
    violations_achieved: Dict[int, int] = field(default_factory=dict)

    @property
    def caught_total(self) -> int:
        return sum(v for key, v in self.caught_at_period.items() if key != "never")

    def to_dict(self) -> dict:
        def z(x):
            return x if math.isfinite(x) else str(x)

        return {
            "trials": self.trials,
            "seed": self.seed,
            "info_mode": self.info_mode,
            "inspector": {
                "mean": self.inspector_mean,
                "mean_exact": rational_to_json(self.inspector_mean_exact),
                "standard_error": self.inspector_se,
                "target": rational_to_json(self.inspector_target),
                "z": z(self.inspector_z),
            },
            "inspectee": {
                "mean": self.inspectee_mean,
                "mean_exact": rational_to_json(self.inspectee_mean_exact),
                "standard_error": self.inspectee_se,
                "target": rational_to_json(self.inspectee_target),
                "z": z(self.inspectee_z),
            },
            "histogram": {
                "caught_at_period": self.caught_at_period,
                "violations_achieved": {str(k): v for k, v in self.violations_achieved.items()},
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def histogram_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["kind", "bucket", "count"])
        for key, count in self.caught_at_period.items():
            writer.writerow(["caught_at_period", key, count])
        for key, count in self.violations_achieved.items():
            writer.writerow(["violations_achieved", key, count])
        return buf.getvalue()


def _lcm_denominator(values) -> int:
    scale = 1
    for v in values:
        scale = math.lcm(scale, Fraction(v).denominator)
    return scale


def _tables(spec: GameSpec, profile: BehaviorStrategy, info_mode: InfoMode):
    n, m, k = spec.n, spec.m, spec.k
    p_tab = np.zeros((n + 1, m + 1, k + 1))
    q_tab = np.zeros((n + 1, m + 1, k + 1))
    for n2 in range(1, n + 1):
        for m2 in range(0, m + 1):
            for k2 in range(0, k + 1):
                key = (n2, m2, k2)
                if m2 > 0:
                    if info_mode is InfoMode.INFORMED and key in profile.inspector:
                        p_tab[key] = float(profile.inspector[key])
                    elif (n2, m2) in profile.inspector:
                        p_tab[key] = float(profile.inspector[(n2, m2)])
                if k2 > 0 and m2 < n2 and key in profile.inspectee:
                    q_tab[key] = float(profile.inspectee[key])
    return p_tab, q_tab


def _payoff_tables(spec: GameSpec):
    """Per-k payoff increments, as integers in units of 1/scale."""
    caught, uncaught = {}, {}
    for k2 in range(1, spec.k + 1):
        state = StateKey(spec.n, 0, k2)
        caught[k2] = caught_payoffs(state, spec)
        r = reward_at(state, spec)
        uncaught[k2] = (-r, r)
    values = [x for pair in list(caught.values()) + list(uncaught.values()) for x in pair]
    scale = _lcm_denominator(values)
    tabs = np.zeros((4, spec.k + 1), dtype=np.int64)
    for k2 in range(1, spec.k + 1):
        tabs[0, k2] = int(caught[k2][0] * scale)
        tabs[1, k2] = int(caught[k2][1] * scale)
        tabs[2, k2] = int(uncaught[k2][0] * scale)
        tabs[3, k2] = int(uncaught[k2][1] * scale)
    bound = int(np.abs(tabs).max(initial=0)) * max(spec.n, 1)
    return tabs, scale, bound


def _play_chunk(spec, rng, count, p_tab, q_tab, pay):
    n = spec.n
    draws = rng.random((count, max(n, 1), 2))
    mm = np.full(count, spec.m, dtype=np.int64)
    kk = np.full(count, spec.k, dtype=np.int64)
    alive = np.ones(count, dtype=bool)
    insp_pay = np.zeros(count, dtype=np.int64)
    tee_pay = np.zeros(count, dtype=np.int64)
    caught_at = np.zeros(count, dtype=np.int64)
    violations = np.zeros(count, dtype=np.int64)
    for t in range(n):
        left = n - t
        p = p_tab[left, mm, kk]
        q = q_tab[left, mm, kk]
        inspect = alive & (mm > 0) & (draws[:, t, 0] < p)
        violate = alive & (kk > 0) & (mm < left) & (draws[:, t, 1] < q)
        caught = inspect & violate
        slipped = violate & ~inspect
        insp_pay += np.where(caught, pay[0, kk], 0) + np.where(slipped, pay[2, kk], 0)
        tee_pay += np.where(caught, pay[1, kk], 0) + np.where(slipped, pay[3, kk], 0)
        caught_at[caught] = t + 1
        alive &= ~caught
        violations += slipped
        kk -= slipped
        mm -= inspect & ~violate
    return insp_pay, tee_pay, caught_at, violations


def simulate(
    spec: GameSpec,
    profile: BehaviorStrategy,
    trials: int,
    seed: int,
    info_mode: InfoMode = InfoMode.INFORMED,
    targets: Optional[Tuple[Fraction, Fraction]] = None,
) -> SimulationReport:
    """Play ``trials`` independent games under ``profile``.

    ``targets`` defaults to the exact expected payoffs of the profile.
    """
    info_mode = InfoMode(info_mode)
    if trials <= 0:
        raise ValueError("trials must be positive")
    _check_profile(spec, profile, info_mode)
    if targets is None:
        targets = profile_value(spec, profile, info_mode)
    p_tab, q_tab = _tables(spec, profile, info_mode)
    pay, scale, bound = _payoff_tables(spec)
    if bound * bound * trials >= 2**62:
        raise OverflowError("payoff scale too large for exact int64 accumulation")

    sums = [0, 0]
    squares = [0, 0]
    caught_hist = np.zeros(spec.n + 1, dtype=np.int64)
    viol_hist = np.zeros(spec.k + 1, dtype=np.int64)
    for chunk, start in enumerate(range(0, trials, CHUNK)):
        count = min(CHUNK, trials - start)
        seq = np.random.SeedSequence(seed, spawn_key=(chunk,))
        rng = np.random.Generator(np.random.Philox(seq))
        insp, tee, caught_at, violations = _play_chunk(spec, rng, count, p_tab, q_tab, pay)
        for j, arr in enumerate((insp, tee)):
            sums[j] += int(arr.sum())
            squares[j] += int((arr * arr).sum())
        caught_hist += np.bincount(caught_at, minlength=spec.n + 1)
        viol_hist += np.bincount(violations, minlength=spec.k + 1)

    means, ses, zs = [], [], []
    for j in (0, 1):
        mean = Fraction(sums[j], trials * scale)
        if trials > 1:
            var = Fraction(squares[j] * trials - sums[j] ** 2, trials * (trials - 1) * scale**2)
            se = math.sqrt(var / trials)
        else:
            se = 0.0
        diff = float(mean - targets[j])
        if se > 0:
            z = diff / se
        else:
            z = 0.0 if diff == 0 else math.copysign(math.inf, diff)
        means.append(mean)
        ses.append(se)
        zs.append(z)

    caught_at_period = {str(t): int(caught_hist[t]) for t in range(1, spec.n + 1)}
    caught_at_period["never"] = int(caught_hist[0])
    return SimulationReport(
        trials=trials,
        seed=seed,
        info_mode=info_mode.value,
        inspector_mean=float(means[0]),
        inspectee_mean=float(means[1]),
        inspector_mean_exact=means[0],
        inspectee_mean_exact=means[1],
        inspector_se=ses[0],
        inspectee_se=ses[1],
        inspector_target=Fraction(targets[0]),
        inspectee_target=Fraction(targets[1]),
        inspector_z=zs[0],
        inspectee_z=zs[1],
        caught_at_period=caught_at_period,
        violations_achieved={v: int(viol_hist[v]) for v in range(spec.k + 1)},
    )


def exploitability_report(
    spec: GameSpec, profile: BehaviorStrategy, info_mode: InfoMode = InfoMode.INFORMED
) -> Tuple[Fraction, Fraction]:
    """(inspector regret, inspectee regret) of ``profile``, computed exactly."""
    info_mode = InfoMode(info_mode)
    inspector, inspectee = profile_value(spec, profile, info_mode)
    return (
        best_response_value(spec, profile, Player.INSPECTOR, info_mode) - inspector,
        best_response_value(spec, profile, Player.INSPECTEE, info_mode) - inspectee,
    )
