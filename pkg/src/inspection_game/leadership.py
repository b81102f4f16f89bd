"""Inspector leadership: committing to the inspection schedule.

The inspector announces the randomization in advance.  The inspectee's
equilibrium payoff is unchanged, but now it acts legally while
inspections remain, which saves the inspector the cost of caught
violations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .closed_form import inspect_prob
from .combinatorics import s_beta
from .model import (
    BehaviorStrategy,
    GameSpec,
    GameSpecError,
    StageGame,
    StateKey,
    Variant,
    base_payoffs,
    caught_cost_at,
    is_interior,
    reachable_states,
    reward_at,
    stage_game,
    validate,
)

__all__ = [
    "LeadershipError",
    "ThresholdResponse",
    "LeadershipOutcome",
    "LeadershipSolution",
    "commit_2x2",
    "solve_leadership",
    "leadership_profile",
    "check_legal_preference",
]


class LeadershipError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class ThresholdResponse:
    """Follower's best reply to a commitment: violate iff p < p_star.

    At exactly ``p_star`` the follower is indifferent and takes the reply
    the leader prefers (legal action).
    """

    p_star: Fraction

    def __call__(self, p) -> Fraction:
        return Fraction(1) if p < self.p_star else Fraction(0)


@dataclass(frozen=True)
class LeadershipOutcome:
    p_star: Fraction
    leader_value: Fraction
    nash_value: Optional[Fraction]  # None when B <= D: no mixed simultaneous equilibrium
    follower_value: Fraction
    follower_response: ThresholdResponse
    violation_value: Fraction  # leader payoff if the follower violates at p_star


def _commit(stage: StageGame, *, require_b_gt_d: bool) -> LeadershipOutcome:
    A, B, C, D = stage.inspector
    a_, b_, c_, d_ = stage.inspectee
    checks = [("A < C", A < C), ("a' > b'", a_ > b_), ("c' < d'", c_ < d_)]
    if require_b_gt_d:
        checks.insert(1, ("B > D", B > D))
    for name, ok in checks:
        if not ok:
            raise LeadershipError("not_circular", f"commitment stage violates {name}")
    p_star = (d_ - c_) / (a_ - b_ + d_ - c_)
    leader = p_star * A + (1 - p_star) * C
    if_violated = p_star * B + (1 - p_star) * D
    if not leader > if_violated:
        raise LeadershipError("leader_prefers_violation", "leader prefers violation branch")
    # the simultaneous mixed equilibrium only exists for a circular stage
    nash = (B * C - A * D) / (B - D + C - A) if B > D else None
    follower = p_star * a_ + (1 - p_star) * c_
    return LeadershipOutcome(
        p_star, leader, nash, follower, ThresholdResponse(p_star), if_violated
    )


def commit_2x2(stage: StageGame) -> LeadershipOutcome:
    """Leader-commitment solution of a 2x2 game with circular preferences.

    The leader commits to play the top row with ``p_star``, the mix that
    makes the follower indifferent; the follower then plays the left
    column.  Requires A < C, B > D, a' > b', c' < d' and that the leader
    prefers the left column at ``p_star``.
    """
    return _commit(stage, require_b_gt_d=True)


@dataclass
class LeadershipSolution:
    spec: GameSpec
    u: Dict[StateKey, Fraction] = field(default_factory=dict)
    w: Dict[StateKey, Fraction] = field(default_factory=dict)
    schedule: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)
    outcomes: Dict[StateKey, LeadershipOutcome] = field(default_factory=dict)
    gain_factor: Fraction = Fraction(1)

    @property
    def root_payoffs(self) -> Tuple[Fraction, Fraction]:
        root = self.spec.root
        return self.u[root], self.w[root]


def _as_leadership(spec: GameSpec) -> GameSpec:
    if spec.variant is Variant.LEADERSHIP:
        return spec
    if spec.variant is Variant.NON_ZERO_SUM:
        return spec.with_params(variant=Variant.LEADERSHIP)
    raise GameSpecError("bad_variant", "leadership needs the cost factor a of the non-zero-sum game")


def solve_leadership(spec: GameSpec) -> LeadershipSolution:
    """Subgame perfect solution of the leadership game by backward induction.

    At each interior state the inspector commits to the probability that
    makes the inspectee indifferent, given the continuation payoffs; the
    inspectee then acts legally.  Raises if some stage lacks the payoff
    structure that makes this the equilibrium.
    """
    spec = validate(_as_leadership(spec))
    sol = LeadershipSolution(spec)

    def payoff(state: StateKey) -> Tuple[Fraction, Fraction]:
        return sol.u[state], sol.w[state]

    # children before parents: fewer periods first
    for state in sorted(reachable_states(spec.root), key=lambda s: s.n):
        n, m, k = state
        if not is_interior(state):
            sol.u[state], sol.w[state] = base_payoffs(state, spec)
            continue
        r = reward_at(state, spec)
        cost = caught_cost_at(state, spec)
        if not spec.b * r > -cost:
            raise LeadershipError("legal_not_preferred", f"b*r <= -c(r) at {tuple(state)}")
        stage = stage_game(state, spec, payoff)
        if not any(stage.inspectee):
            # nothing at stake for the inspectee; commit to the usual mix
            p = inspect_prob(n, m, spec)
            sol.u[state] = p * stage.A + (1 - p) * stage.C
            sol.w[state] = Fraction(0)
            sol.schedule.setdefault((n, m), p)
            continue
        try:
            outcome = _commit(stage, require_b_gt_d=False)
        except LeadershipError as exc:
            raise LeadershipError(exc.code, f"{exc} at state {tuple(state)}") from None
        # a commitment below p_star draws violations; its best case is p -> 0
        if not outcome.leader_value > stage.D:
            raise LeadershipError(
                "leader_prefers_violation",
                f"committing to no inspection beats p_star at {tuple(state)}",
            )
        sol.outcomes[state] = outcome
        sol.u[state] = outcome.leader_value
        sol.w[state] = outcome.follower_value
        previous = sol.schedule.setdefault((n, m), outcome.p_star)
        if previous != outcome.p_star:
            raise LeadershipError("schedule_depends_on_k", f"commitment at {(n, m)} varies with k")

    for n2 in range(spec.n, 0, -1):
        used = spec.n - n2
        for m2 in range(max(0, spec.m - used), spec.m + 1):
            sol.schedule.setdefault((n2, m2), inspect_prob(n2, m2, spec))
    sol.gain_factor = s_beta(spec.n, spec.m, -spec.a) / s_beta(spec.n, spec.m, spec.b)
    return sol


def leadership_profile(spec: GameSpec) -> BehaviorStrategy:
    """Committed schedule plus the inspectee's on-path behavior.

    The inspectee acts legally while inspections remain and violates in
    every remaining period once they are used up.
    """
    sched = solve_leadership(spec).schedule
    inspectee = {}
    for n2 in range(1, spec.n + 1):
        for m2 in range(0, min(spec.m, n2 - 1) + 1):
            for k2 in range(1, spec.k + 1):
                inspectee[StateKey(n2, m2, k2)] = Fraction(1 if m2 == 0 else 0)
    return BehaviorStrategy(inspector=sched, inspectee=inspectee)


def check_legal_preference(n: int, m: int, a, b) -> Tuple[bool, Dict[str, Fraction]]:
    """Exact check that the inspector's max-min mix exceeds the equilibrium mix.

    Compares s(n-1, m-1)/s(n, m) at beta = -a (max-min) against beta = b
    (equilibrium).  Returns ``(holds, witness)``.
    """
    a, b = Fraction(a), Fraction(b)
    if not 0 < m < n:
        raise GameSpecError("state_out_of_range", f"need 0 < m < n, got n={n}, m={m}")
    if not 0 < a < 1:
        raise GameSpecError("cost_factor_range", "cost factor a must lie in (0, 1)")
    if b < 0:
        raise GameSpecError("penalty_factor_negative", "penalty factor b must be nonnegative")
    p_hat = s_beta(n - 1, m - 1, -a) / s_beta(n, m, -a)
    p = s_beta(n - 1, m - 1, b) / s_beta(n, m, b)
    return p_hat > p, {"p_hat": p_hat, "p": p}
