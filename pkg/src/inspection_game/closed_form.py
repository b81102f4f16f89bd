"""Explicit equilibrium values and strategies from the binomial sums."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, List, Tuple

from gmpy2 import mpq

from .combinatorics import s_beta, t_value
from .model import (
    BehaviorStrategy,
    StateSolution,
    GameSpec,
    StateKey,
    Variant,
    is_interior,
    reachable_states,
    remaining_rewards,
    reward_at,
)

_ZERO = mpq(0)

__all__ = [
    "value_zero_sum",
    "inspect_prob",
    "violate_prob",
    "nonzero_payoffs",
    "payoffs",
    "solve_state",
    "closed_form_table",
    "schedule",
    "equilibrium_profile",
    "first_inspection_distribution",
    "is_degenerate",
]


def _t(state: StateKey, spec: GameSpec) -> Fraction:
    return t_value(state.n, state.m, remaining_rewards(spec, state.k))


@lru_cache(maxsize=None)
def _ratio(n: int, m: int, rewards: tuple, beta: Fraction) -> Fraction:
    # t / s_beta; the hot path of every value lookup
    return t_value(n, m, rewards) / s_beta(n, m, beta)


def is_degenerate(state: StateKey, spec: GameSpec) -> bool:
    """All rewards that could still be collected at ``state`` are zero."""
    n, m, k = state
    return _t(StateKey(n - 1, m - 1, k), spec) == 0


def value_zero_sum(state: StateKey, spec: GameSpec) -> Fraction:
    """Inspector's value -t(n, m, k) / s(n, m) with s taken at beta = b."""
    n, m, k = state
    if m >= n:
        return Fraction(0)
    return -_ratio(n, m, remaining_rewards(spec, k), spec.b)


def nonzero_payoffs(state: StateKey, spec: GameSpec) -> Tuple[Fraction, Fraction]:
    """(inspector, inspectee) equilibrium payoffs of the non-zero-sum game.

    The inspector's payoff uses the sum at beta = -a, the inspectee's at
    beta = b.
    """
    n, m, k = state
    if m >= n:
        return Fraction(0), Fraction(0)
    rest = remaining_rewards(spec, k)
    return -_ratio(n, m, rest, -spec.a), _ratio(n, m, rest, spec.b)


def leadership_payoffs(state: StateKey, spec: GameSpec) -> Tuple[Fraction, Fraction]:
    n, m, k = state
    if m >= n:
        return Fraction(0), Fraction(0)
    w = _ratio(n, m, remaining_rewards(spec, k), spec.b)
    return -w, w


def payoffs(state: StateKey, spec: GameSpec) -> Tuple[Fraction, Fraction]:
    """Closed-form (inspector, inspectee) payoffs for any variant."""
    if spec.variant is Variant.ZERO_SUM:
        v = value_zero_sum(state, spec)
        return v, -v
    if spec.variant is Variant.NON_ZERO_SUM:
        return nonzero_payoffs(state, spec)
    return leadership_payoffs(state, spec)


def inspect_prob(n: int, m: int, spec: GameSpec) -> Fraction:
    """Equilibrium inspection probability; never depends on k or rewards.

    With no inspections left it is 0.  Once every remaining period can be
    inspected, 1/(1+b) keeps the inspectee indifferent; for b < 0 that is
    not a probability and the inspector simply inspects.
    """
    b = spec.b
    if m <= 0:
        return Fraction(0)
    if m >= n:
        return 1 / (1 + b) if b >= 0 else Fraction(1)
    return s_beta(n - 1, m - 1, b) / s_beta(n, m, b)


def violate_prob(state: StateKey, spec: GameSpec) -> Fraction:
    """Equilibrium violation probability at an interior state.

    Built from the stage entries (C - A) / (C - A + B - D), where the
    entries are the inspector's closed-form continuation payoffs.
    Degenerate stages return 0.
    """
    state = StateKey(*state)
    n, m, k = state
    if not is_interior(state):
        raise ValueError(f"violate_prob needs n > m > 0 and k > 0, got {tuple(state)}")
    if is_degenerate(state, spec):
        return Fraction(0)
    r = reward_at(state, spec)
    if spec.variant is Variant.ZERO_SUM:
        inspector_value = lambda s: value_zero_sum(s, spec)  # noqa: E731
        caught = spec.b * r
    else:
        # the inspectee's mix equalizes the inspector's payoffs of the
        # simultaneous game, whose caught cell is -a * r
        inspector_value = lambda s: nonzero_payoffs(s, spec)[0]  # noqa: E731
        caught = -spec.a * r
    A = inspector_value(StateKey(n - 1, m - 1, k))
    C = inspector_value(StateKey(n - 1, m, k))
    D = inspector_value(StateKey(n - 1, m, k - 1)) - r
    return (C - A) / (C - A + caught - D)


def _base_q(state: StateKey) -> Fraction:
    n, m, k = state
    # without inspections the inspectee violates in every period it can
    return Fraction(1) if (m == 0 and k > 0 and n > 0) else Fraction(0)


def solve_state(state: StateKey, spec: GameSpec) -> StateSolution:
    state = StateKey(*state)
    inspector, inspectee = payoffs(state, spec)
    p = inspect_prob(state.n, state.m, spec)
    if is_interior(state):
        degenerate = is_degenerate(state, spec)
        if spec.variant is Variant.LEADERSHIP:
            q = Fraction(0)
        else:
            q = violate_prob(state, spec)
    else:
        degenerate = False
        q = _base_q(state)
    return StateSolution(state, inspector, inspectee, p, q, degenerate)


def closed_form_table(spec: GameSpec) -> Dict[StateKey, StateSolution]:
    """Closed-form solution at every state reachable from the root."""
    return {s: solve_state(s, spec) for s in reachable_states(spec.root)}


def schedule(spec: GameSpec) -> Dict[Tuple[int, int], Fraction]:
    """Inspection probability for every reachable (n', m') with n' >= 1."""
    out = {}
    for n2 in range(spec.n, 0, -1):
        used = spec.n - n2
        for m2 in range(max(0, spec.m - used), spec.m + 1):
            out[(n2, m2)] = inspect_prob(n2, m2, spec)
    return out


def _inspector_values(spec: GameSpec) -> Dict[tuple, mpq]:
    # the same -t/s formulas, tabulated once per spec in gmpy2 rationals;
    # the profile build touches every state so per-call caching does not pay
    beta = spec.b if spec.variant is Variant.ZERO_SUM else -spec.a
    weights = {
        (n2, m2): mpq(s_beta(n2, m2, beta))
        for n2 in range(spec.n + 1)
        for m2 in range(spec.m + 1)
    }
    rewards = [mpq(r) for r in spec.rewards]
    out = {}
    for k2 in range(spec.k + 1):
        rest = rewards[spec.k - k2:] if k2 else []
        for n2 in range(spec.n + 1):
            for m2 in range(spec.m + 1):
                if m2 >= n2:
                    out[(n2, m2, k2)] = _ZERO
                    continue
                t = sum(
                    (r * comb(n2 - i, m2) for i, r in enumerate(rest[:n2], start=1) if r),
                    _ZERO,
                )
                out[(n2, m2, k2)] = -t / weights[(n2, m2)]
    return out


def first_inspection_distribution(spec: GameSpec) -> List[Fraction]:
    """Probability that the first inspection happens in period 1, ..., n.

    Play is assumed legal, so the schedule is followed along the path
    where no inspection has happened yet.  Once the remaining periods no
    longer exceed the remaining inspections the inspector has nothing to
    save them for and inspects.  Entries sum to 1 when m >= 1.
    """
    out = []
    reach = Fraction(1)
    for period in range(1, spec.n + 1):
        n2 = spec.n - period + 1
        p = Fraction(1) if spec.m >= n2 else inspect_prob(n2, spec.m, spec)
        out.append(reach * p)
        reach *= 1 - p
    return out


def equilibrium_profile(spec: GameSpec) -> BehaviorStrategy:
    """The closed-form equilibrium as a k-free behavior strategy profile."""
    if spec.variant is Variant.LEADERSHIP:
        table = {s: solve_state(s, spec).q for s in _profile_states(spec)}
        return BehaviorStrategy(inspector=schedule(spec), inspectee=table)
    values = _inspector_values(spec)
    factor = mpq(spec.b) if spec.variant is Variant.ZERO_SUM else -mpq(spec.a)
    inspectee = {}
    for state in _profile_states(spec):
        n, m, k = state
        if not is_interior(state):
            inspectee[state] = _base_q(state)
            continue
        r = mpq(reward_at(state, spec))
        A = values[(n - 1, m - 1, k)]
        C = values[(n - 1, m, k)]
        D = values[(n - 1, m, k - 1)] - r
        if A == 0 and C == 0 and D == 0 and r == 0:
            # degenerate stage: nothing left to collect
            inspectee[state] = Fraction(0)
            continue
        q = (C - A) / (C - A + factor * r - D)
        inspectee[state] = Fraction(int(q.numerator), int(q.denominator))
    return BehaviorStrategy(inspector=schedule(spec), inspectee=inspectee)


def _profile_states(spec: GameSpec):
    for n2 in range(1, spec.n + 1):
        for m2 in range(0, min(spec.m, n2 - 1) + 1):
            for k2 in range(1, spec.k + 1):
                yield StateKey(n2, m2, k2)
