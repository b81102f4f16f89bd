"""Ground truth by backward induction over (n, m, k).

Nothing here uses the binomial closed forms.  Every interior stage is
solved as a 2x2 game from its continuation values, and best responses to
fixed behavior strategies are computed by dynamic programming.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Optional, Tuple

from gmpy2 import mpq

from .model import (
    BehaviorStrategy,
    GameSpec,
    StageGame,
    StateKey,
    StateSolution,
    Variant,
    base_payoffs,
    caught_payoffs,
    is_interior,
    stage_game,
    validate,
)

__all__ = [
    "Player",
    "InfoMode",
    "StageError",
    "StrategyError",
    "SolutionTable",
    "solve_2x2_mixed",
    "solve_recursive",
    "best_response_value",
    "profile_value",
]


class Player(str, enum.Enum):
    INSPECTOR = "inspector"
    INSPECTEE = "inspectee"


class InfoMode(str, enum.Enum):
    INFORMED = "informed"
    UNINFORMED = "uninformed"


class StageError(ValueError):
    """A stage game without the circular preference structure."""

    def __init__(self, inequality: str, stage: StageGame, state: Optional[StateKey] = None):
        where = "" if state is None else f" at state {tuple(state)}"
        super().__init__(f"stage game violates {inequality}{where}")
        self.inequality = inequality
        self.stage = stage
        self.state = state


class StrategyError(ValueError):
    def __init__(self, message: str, missing=()):
        super().__init__(message)
        self.missing = sorted(missing)


def _check_circular(stage: StageGame) -> None:
    checks = (
        ("A < C", stage.A < stage.C),
        ("B > D", stage.B > stage.D),
        ("a' > b'", stage.a_ > stage.b_),
        ("c' < d'", stage.c_ < stage.d_),
    )
    for name, ok in checks:
        if not ok:
            raise StageError(name, stage)


def solve_2x2_mixed(
    stage: StageGame, degenerate_p: Optional[Fraction] = None
) -> Tuple[Fraction, Fraction, Tuple[Fraction, Fraction]]:
    """Completely mixed equilibrium of a circular 2x2 stage game.

    Returns ``(p, q, (inspector_value, inspectee_value))``.  The inspection
    probability ``p`` equalizes the inspectee's payoffs and ``q`` equalizes
    the inspector's.  An all-zero stage has no preferred mix; it returns
    ``degenerate_p`` with ``q = 0``.
    """
    if stage.is_all_zero():
        if degenerate_p is None:
            raise ValueError("all-zero stage: pass degenerate_p to choose the inspection mix")
        return Fraction(degenerate_p), Fraction(0), (Fraction(0), Fraction(0))
    _check_circular(stage)
    A, B, C, D = stage.inspector
    a_, b_, c_, d_ = stage.inspectee
    q = (C - A) / (C - A + B - D)
    if stage.zero_sum:
        denom = B - A + C - D
        p = (C - D) / denom
        value = (B * C - A * D) / denom
        return p, q, (value, -value)
    p = (d_ - c_) / (a_ - b_ + d_ - c_)
    inspector_value = (1 - q) * A + q * B
    inspectee_value = p * a_ + (1 - p) * c_
    return p, q, (inspector_value, inspectee_value)


def _saturated_p(spec: GameSpec) -> Fraction:
    # with m >= n the stage is [[0, caught], [0, -r]]; equalize the
    # inspectee's payoffs -b*r (caught) against r (uncaught)
    p = Fraction(1) / (1 + spec.b)
    return p if p <= 1 else Fraction(1)


StageBuilder = Callable[[StateKey, GameSpec, Callable], StageGame]


@dataclass
class SolutionTable:
    spec: GameSpec
    entries: Dict[StateKey, StateSolution] = field(default_factory=dict)

    @property
    def variant(self) -> Variant:
        return self.spec.variant

    @property
    def root(self) -> StateSolution:
        return self.entries[self.spec.root]

    def __getitem__(self, state) -> StateSolution:
        return self.entries[StateKey(*state)]

    def __len__(self) -> int:
        return len(self.entries)

    def inspector_schedule(self) -> Dict[Tuple[int, int], Fraction]:
        """Collapse p over k.  Raises if p differs between two values of k."""
        out: Dict[Tuple[int, int], Fraction] = {}
        for state, sol in self.entries.items():
            if state.n == 0:
                continue
            key = (state.n, state.m)
            if key in out and out[key] != sol.p:
                raise ValueError(f"inspection probability at {key} depends on k")
            out[key] = sol.p
        return out

    def profile(self) -> BehaviorStrategy:
        inspectee = {
            s: sol.q for s, sol in self.entries.items() if s.n > 0 and s.k > 0 and s.m < s.n
        }
        return BehaviorStrategy(inspector=self.inspector_schedule(), inspectee=inspectee)


class _Solver:
    def __init__(self, spec: GameSpec, stage_builder: StageBuilder):
        self.spec = spec
        self.stage_builder = stage_builder
        self.entries: Dict[StateKey, StateSolution] = {}
        self._reference: Optional[_Solver] = None

    def reference_p(self, n: int, m: int) -> Fraction:
        # p is k-free, so a degenerate stage borrows it from the same (n, m)
        # with one unit-reward violation still to come
        if self._reference is None:
            ref_spec = self.spec.with_params(k=1, rewards=(Fraction(1),), caught_costs=None)
            self._reference = _Solver(ref_spec, self.stage_builder)
        return self._reference.solve(StateKey(n, m, 1)).p

    def payoff(self, state: StateKey) -> Tuple[Fraction, Fraction]:
        sol = self.solve(state)
        return sol.inspector_value, sol.inspectee_value

    def solve(self, state: StateKey) -> StateSolution:
        sol = self.entries.get(state)
        if sol is not None:
            return sol
        n, m, k = state
        if is_interior(state):
            stage = self.stage_builder(state, self.spec, self.payoff)
            degenerate = stage.is_all_zero()
            try:
                p, q, values = solve_2x2_mixed(
                    stage, self.reference_p(n, m) if degenerate else None
                )
            except StageError as exc:
                raise StageError(exc.inequality, exc.stage, state) from None
            sol = StateSolution(state, values[0], values[1], p, q, degenerate)
        else:
            inspector, inspectee = base_payoffs(state, self.spec)
            if m <= 0:
                p = Fraction(0)
            elif m >= n:
                p = _saturated_p(self.spec)
            else:
                # k = 0: nothing left to deter, keep the k-free mix
                p = self.reference_p(n, m)
            q = Fraction(1) if (m == 0 and k > 0 and n > 0) else Fraction(0)
            sol = StateSolution(state, inspector, inspectee, p, q)
        self.entries[state] = sol
        return sol


def solve_recursive(
    spec: GameSpec,
    *,
    stage_builder: Optional[StageBuilder] = None,
    check: bool = True,
) -> SolutionTable:
    """Solve every state reachable from the root, each exactly once.

    ``stage_builder`` replaces the stage payoff construction, which lets
    payoff variants be explored numerically.  ``check=False`` skips
    parameter validation (for relaxed test harnesses).
    """
    if check:
        validate(spec)
    if spec.variant is Variant.LEADERSHIP:
        raise ValueError("use leadership.solve_leadership for the leadership game")
    solver = _Solver(spec, stage_builder or stage_game)
    solver.solve(spec.root)
    return SolutionTable(spec, solver.entries)


# -- best responses --------------------------------------------------------

def _can_violate(state: StateKey) -> bool:
    return state.n > 0 and state.k > 0 and state.m < state.n


def _inspector_matters(state: StateKey) -> bool:
    return is_interior(state)


def _reachable_box(spec: GameSpec):
    """Every state that play can visit, base regions included."""
    out = []
    for n in range(spec.n, 0, -1):
        used = spec.n - n
        for m in range(max(0, spec.m - used), spec.m + 1):
            for k in range(max(0, spec.k - used), spec.k + 1):
                out.append(StateKey(n, m, k))
    return out


def _inspector_p(profile: BehaviorStrategy, state: StateKey, info_mode: InfoMode) -> Fraction:
    if info_mode is InfoMode.INFORMED and tuple(state) in profile.inspector:
        return profile.inspector[tuple(state)]
    return profile.inspector[(state.n, state.m)]


def _check_profile(spec, profile, info_mode, need_inspector=True, need_inspectee=True):
    if info_mode is InfoMode.UNINFORMED and not profile.is_k_free():
        raise StrategyError("an uninformed inspector's strategy may only key on (n, m)")
    missing = []
    for state in _reachable_box(spec):
        if need_inspector and _inspector_matters(state):
            key3, key2 = tuple(state), (state.n, state.m)
            informed_hit = info_mode is InfoMode.INFORMED and key3 in profile.inspector
            if not informed_hit and key2 not in profile.inspector:
                missing.append(("inspector", key2))
        if need_inspectee and _can_violate(state) and tuple(state) not in profile.inspectee:
            missing.append(("inspectee", tuple(state)))
    if missing:
        raise StrategyError(f"profile is missing {len(missing)} required entries", missing)
    for table in (profile.inspector, profile.inspectee):
        for key, prob in table.items():
            # integer test; Fraction keeps a positive denominator
            if not 0 <= prob.numerator <= prob.denominator:
                raise StrategyError(f"probability {prob} at {key} is outside [0, 1]")


class _Fast:
    """Per-call lookup tables in gmpy2 rationals for the inner loops."""

    def __init__(self, spec: GameSpec, profile: BehaviorStrategy, info_mode: InfoMode):
        self.info_mode = info_mode
        self.insp = {key: mpq(p) for key, p in profile.inspector.items()}
        self.viol = {key: mpq(q) for key, q in profile.inspectee.items()}
        self.reward = {k: mpq(r) for k, r in zip(range(spec.k, 0, -1), spec.rewards)}
        self._spec = spec
        self._caught: Dict[int, tuple] = {}

    def caught(self, k: int) -> tuple:
        # looked up lazily: the leadership cost check should only fire for
        # counters that play can actually reach
        pair = self._caught.get(k)
        if pair is None:
            raw = caught_payoffs(StateKey(1, 0, k), self._spec)
            pair = self._caught[k] = (mpq(raw[0]), mpq(raw[1]))
        return pair

    def p(self, n: int, m: int, k: int):
        if m <= 0:
            return _ZERO
        if self.info_mode is InfoMode.INFORMED:
            hit = self.insp.get((n, m, k))
            if hit is not None:
                return hit
        return self.insp[(n, m)]


_ZERO = mpq(0)
_ONE = mpq(1)


def _fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def profile_value(
    spec: GameSpec, profile: BehaviorStrategy, info_mode: InfoMode = InfoMode.INFORMED
) -> Tuple[Fraction, Fraction]:
    """Expected (inspector, inspectee) payoffs when both follow ``profile``."""
    info_mode = InfoMode(info_mode)
    _check_profile(spec, profile, info_mode)
    fast = _Fast(spec, profile, info_mode)
    memo: Dict[tuple, tuple] = {}
    zero = (_ZERO, _ZERO)

    def value(n: int, m: int, k: int):
        if n <= 0 or k <= 0 or m >= n:
            return zero
        key = (n, m, k)
        out = memo.get(key)
        if out is not None:
            return out
        p = fast.p(n, m, k)
        q = fast.viol[key]
        r = fast.reward[k]
        caught = fast.caught(k)
        after_legal_i = value(n - 1, m - 1, k) if m > 0 else zero
        after_legal_n = value(n - 1, m, k)
        after_viol = value(n - 1, m, k - 1)
        # cell probabilities of (inspect, no inspect) x (legal, violate)
        w_il, w_iv = p * (1 - q), p * q
        w_nl, w_nv = (1 - p) * (1 - q), (1 - p) * q
        out = (
            w_il * after_legal_i[0] + w_iv * caught[0] + w_nl * after_legal_n[0]
            + w_nv * (after_viol[0] - r),
            w_il * after_legal_i[1] + w_iv * caught[1] + w_nl * after_legal_n[1]
            + w_nv * (after_viol[1] + r),
        )
        memo[key] = out
        return out

    inspector, inspectee = value(spec.n, spec.m, spec.k)
    return _fraction(inspector), _fraction(inspectee)


def _inspectee_br(spec, profile, info_mode) -> Fraction:
    fast = _Fast(spec, profile, info_mode)
    memo: Dict[tuple, object] = {}

    def best(n: int, m: int, k: int):
        if n <= 0 or k <= 0 or m >= n:
            return _ZERO
        key = (n, m, k)
        out = memo.get(key)
        if out is not None:
            return out
        p = fast.p(n, m, k)
        legal = (1 - p) * best(n - 1, m, k)
        if m > 0:
            legal += p * best(n - 1, m - 1, k)
        violate = p * fast.caught(k)[1] + (1 - p) * (fast.reward[k] + best(n - 1, m, k - 1))
        out = memo[key] = max(legal, violate)
        return out

    return _fraction(best(spec.n, spec.m, spec.k))


def _inspector_br_informed(spec, profile) -> Fraction:
    fast = _Fast(spec, profile, InfoMode.INFORMED)
    memo: Dict[tuple, object] = {}

    def best(n: int, m: int, k: int):
        if n <= 0 or k <= 0 or m >= n:
            return _ZERO
        key = (n, m, k)
        out = memo.get(key)
        if out is not None:
            return out
        q = fast.viol[key]
        out = (1 - q) * best(n - 1, m, k) + q * (best(n - 1, m, k - 1) - fast.reward[k])
        if m > 0:
            out = max(out, (1 - q) * best(n - 1, m - 1, k) + q * fast.caught(k)[0])
        memo[key] = out
        return out

    return _fraction(best(spec.n, spec.m, spec.k))


def _inspector_br_uninformed(spec, profile) -> Fraction:
    """Best response of an inspector who only sees its own past actions.

    The search runs over the inspector's action histories.  At each node
    it carries the probability mass of the game still running for each
    hidden violation count k; since payoffs are linear in that mass, nodes
    are memoized on the normalized mass vector.
    """
    fast = _Fast(spec, profile, InfoMode.UNINFORMED)
    memo: Dict[tuple, object] = {}

    def best(n: int, m: int, mass: Dict[int, object]):
        mass = {k: w for k, w in mass.items() if w and k > 0}
        if n == 0 or m >= n or not mass:
            return _ZERO
        total = sum(mass.values())
        norm = tuple(sorted((k, w / total) for k, w in mass.items()))
        key = (n, m, norm)
        cached = memo.get(key)
        if cached is not None:
            return cached * total
        skip_now = _ZERO
        skip_next: Dict[int, object] = {}
        insp_now = _ZERO
        insp_next: Dict[int, object] = {}
        for k, w in norm:
            q = fast.viol[(n, m, k)]
            wq = w * q
            skip_now -= wq * fast.reward[k]
            skip_next[k] = skip_next.get(k, _ZERO) + (w - wq)
            skip_next[k - 1] = skip_next.get(k - 1, _ZERO) + wq
            if m > 0:
                insp_now += wq * fast.caught(k)[0]
                insp_next[k] = w - wq
        value = skip_now + best(n - 1, m, skip_next)
        if m > 0:
            value = max(value, insp_now + best(n - 1, m - 1, insp_next))
        memo[key] = value
        return value * total

    return _fraction(best(spec.n, spec.m, {spec.k: _ONE}))


def best_response_value(
    spec: GameSpec,
    opponent: BehaviorStrategy,
    responder: Player,
    info_mode: InfoMode = InfoMode.INFORMED,
) -> Fraction:
    """The responder's best payoff against the opponent's fixed behavior.

    The inspectee always knows the full state.  In ``uninformed`` mode the
    inspector does not learn about violations in uninspected periods: the inspector's
    strategy must be keyed on (n, m) only, and the best response is
    searched over the inspector's own action histories.
    """
    responder = Player(responder)
    info_mode = InfoMode(info_mode)
    if responder is Player.INSPECTEE:
        _check_profile(spec, opponent, info_mode, need_inspectee=False)
        return _inspectee_br(spec, opponent, info_mode)
    _check_profile(spec, opponent, info_mode, need_inspector=False)
    if info_mode is InfoMode.INFORMED:
        return _inspector_br_informed(spec, opponent)
    return _inspector_br_uninformed(spec, opponent)
