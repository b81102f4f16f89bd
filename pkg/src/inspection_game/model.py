"""Game parameters, validation, and the 2x2 stage game at a state."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, NamedTuple, Optional, Sequence, Tuple

__all__ = [
    "Variant",
    "StateKey",
    "GameSpec",
    "StageGame",
    "BehaviorStrategy",
    "StateSolution",
    "GameSpecError",
    "validate",
    "reward_at",
    "caught_cost_at",
    "remaining_rewards",
    "base_payoffs",
    "caught_payoffs",
    "stage_game",
    "is_interior",
    "reachable_states",
    "to_rational",
    "rational_to_json",
    "rational_from_json",
    "spec_to_dict",
    "spec_from_dict",
    "load_spec",
    "dump_spec",
]


class Variant(str, enum.Enum):
    ZERO_SUM = "ZeroSum"
    NON_ZERO_SUM = "NonZeroSum"
    LEADERSHIP = "Leadership"


class StateKey(NamedTuple):
    """Remaining periods, inspections and intended violations."""

    n: int
    m: int
    k: int


class GameSpecError(ValueError):
    """Invalid game parameters.  ``code`` is stable and machine readable."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def to_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # floats are accepted only when they are exact binary values
        return Fraction(x)
    return Fraction(x)


@dataclass(frozen=True)
class GameSpec:
    """Full parameterization of one inspection game.

    ``rewards`` is ordered first-violation-first: ``rewards[0]`` is paid
    for the first successful violation.  When ``k'`` violations remain the
    next reward is ``rewards[k - k']``.  ``caught_costs`` follows the same
    order and is only used by the leadership variant.
    """

    n: int
    m: int
    k: int
    b: Fraction
    rewards: Tuple[Fraction, ...]
    variant: Variant = Variant.ZERO_SUM
    a: Optional[Fraction] = None
    caught_costs: Optional[Tuple[Fraction, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "b", to_rational(self.b))
        object.__setattr__(self, "rewards", tuple(to_rational(r) for r in self.rewards))
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.a is not None:
            object.__setattr__(self, "a", to_rational(self.a))
        if self.caught_costs is not None:
            object.__setattr__(
                self, "caught_costs", tuple(to_rational(c) for c in self.caught_costs)
            )

    @property
    def root(self) -> StateKey:
        return StateKey(self.n, self.m, self.k)

    def with_params(self, **changes) -> "GameSpec":
        params = {
            "n": self.n, "m": self.m, "k": self.k, "b": self.b,
            "rewards": self.rewards, "variant": self.variant,
            "a": self.a, "caught_costs": self.caught_costs,
        }
        params.update(changes)
        return GameSpec(**params)


def validate(spec: GameSpec, *, relaxed: bool = False) -> GameSpec:
    """Check the variant-specific parameter ranges; return ``spec``.

    ``relaxed`` widens the non-zero-sum ranges to ``a < 1, b > -1`` so the
    zero-sum game can be embedded with ``a = -b``.  Only test harnesses
    should use it.
    """
    for name in ("n", "m", "k"):
        value = getattr(spec, name)
        if not isinstance(value, int) or value < 0:
            raise GameSpecError("negative_parameter", f"{name} must be a nonnegative integer")
    if len(spec.rewards) != spec.k:
        raise GameSpecError(
            "reward_length",
            f"expected {spec.k} rewards (one per intended violation), got {len(spec.rewards)}",
        )
    if any(r < 0 for r in spec.rewards):
        raise GameSpecError("negative_reward", "rewards must be nonnegative")

    if spec.variant is Variant.ZERO_SUM:
        if spec.b <= -1:
            raise GameSpecError("penalty_factor_range", "penalty factor must exceed −1")
        return spec

    if spec.a is None:
        raise GameSpecError("missing_cost_factor", f"{spec.variant.value} needs the cost factor a")
    if relaxed:
        if spec.a >= 1:
            raise GameSpecError("cost_factor_range", "cost factor a must be below 1")
        if spec.b <= -1:
            raise GameSpecError("penalty_factor_range", "penalty factor must exceed −1")
    else:
        if not 0 < spec.a < 1:
            raise GameSpecError("cost_factor_range", "cost factor a must lie in (0, 1)")
        if spec.b < 0:
            raise GameSpecError("penalty_factor_negative", "penalty factor b must be nonnegative")

    if spec.variant is Variant.LEADERSHIP and spec.caught_costs is not None:
        if len(spec.caught_costs) != spec.k:
            raise GameSpecError(
                "caught_cost_length",
                f"expected {spec.k} caught costs, got {len(spec.caught_costs)}",
            )
        if any(c <= 0 for c in spec.caught_costs):
            raise GameSpecError("caught_cost_nonpositive", "caught costs must be positive")
    return spec


def _reward_index(state: StateKey, spec: GameSpec) -> int:
    if state.k < 1:
        raise GameSpecError("no_violation_left", "no intended violations remain (k = 0)")
    if state.k > spec.k:
        raise GameSpecError("state_out_of_range", f"state k={state.k} exceeds spec k={spec.k}")
    return spec.k - state.k


def reward_at(state: StateKey, spec: GameSpec) -> Fraction:
    """Reward for the next successful violation at ``state``."""
    return spec.rewards[_reward_index(state, spec)]


def caught_cost_at(state: StateKey, spec: GameSpec) -> Fraction:
    """Inspector's cost of a caught violation in the leadership game.

    Defaults to ``a * r`` when no explicit costs are given; the result
    must be positive.
    """
    i = _reward_index(state, spec)
    if spec.caught_costs is not None:
        cost = spec.caught_costs[i]
    else:
        cost = spec.a * spec.rewards[i]
    if cost <= 0:
        raise GameSpecError(
            "caught_cost_nonpositive",
            f"caught cost at {tuple(state)} is {cost}; give positive caught_costs",
        )
    return cost


def remaining_rewards(spec: GameSpec, k: int) -> Tuple[Fraction, ...]:
    return spec.rewards[spec.k - k:] if k > 0 else ()


def is_interior(state: StateKey) -> bool:
    """True where the stage game is actually played (n > m > 0, k > 0)."""
    return state.n > state.m > 0 and state.k > 0


def base_payoffs(state: StateKey, spec: GameSpec) -> Tuple[Fraction, Fraction]:
    """(inspector, inspectee) payoffs of a state outside the recursive regime."""
    n, m, k = state
    if m >= n or k == 0:
        return Fraction(0), Fraction(0)
    if m == 0:
        collected = sum(remaining_rewards(spec, k)[: min(k, n)], Fraction(0))
        return -collected, collected
    raise GameSpecError("not_a_base_state", f"{tuple(state)} is a recursive state")


def caught_payoffs(state: StateKey, spec: GameSpec) -> Tuple[Fraction, Fraction]:
    """(inspector, inspectee) payoffs when a violation is caught at ``state``."""
    r = reward_at(state, spec)
    if spec.variant is Variant.ZERO_SUM:
        return spec.b * r, -spec.b * r
    if spec.variant is Variant.NON_ZERO_SUM:
        return -spec.a * r, -spec.b * r
    return -caught_cost_at(state, spec), -spec.b * r


@dataclass(frozen=True)
class StageGame:
    """The 2x2 game played in one period.

    Rows are (inspect, no inspect), columns (legal, violate).  Inspector
    payoffs are laid out as::

                 legal  violate
        inspect    A       B      <- (inspect, violate) terminates play
        no insp.   C       D

    ``a_``, ``b_``, ``c_``, ``d_`` are the inspectee payoffs in the same
    cells.
    """

    A: Fraction
    B: Fraction
    C: Fraction
    D: Fraction
    a_: Fraction
    b_: Fraction
    c_: Fraction
    d_: Fraction
    zero_sum: bool = False
    rows: Tuple[str, str] = ("inspect", "no_inspect")
    cols: Tuple[str, str] = ("legal", "violate")
    terminal: Tuple[Tuple[bool, bool], Tuple[bool, bool]] = field(
        default=((False, True), (False, False))
    )

    @classmethod
    def zero_sum_game(cls, A, B, C, D) -> "StageGame":
        A, B, C, D = (to_rational(x) for x in (A, B, C, D))
        return cls(A, B, C, D, -A, -B, -C, -D, zero_sum=True)

    @classmethod
    def bimatrix(cls, inspector: Sequence, inspectee: Sequence) -> "StageGame":
        A, B, C, D = (to_rational(x) for x in inspector)
        a_, b_, c_, d_ = (to_rational(x) for x in inspectee)
        return cls(A, B, C, D, a_, b_, c_, d_)

    @property
    def inspector(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return self.A, self.B, self.C, self.D

    @property
    def inspectee(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return self.a_, self.b_, self.c_, self.d_

    def is_all_zero(self) -> bool:
        return not any(self.inspector) and not any(self.inspectee)


@dataclass(frozen=True)
class StateSolution:
    state: StateKey
    inspector_value: Fraction
    inspectee_value: Fraction
    p: Fraction
    q: Fraction
    degenerate: bool = False


@dataclass
class BehaviorStrategy:
    """A strategy profile in behavior strategies.

    ``inspector`` maps ``(n, m)`` to an inspection probability.  Keys of
    the form ``(n, m, k)`` are also accepted and override the k-free entry,
    but only when the inspector is informed about past violations.
    ``inspectee`` maps ``(n, m, k)`` to a violation probability.
    """

    inspector: Dict[tuple, Fraction]
    inspectee: Dict[tuple, Fraction]

    def __post_init__(self):
        self.inspector = {tuple(key): Fraction(p) for key, p in self.inspector.items()}
        self.inspectee = {tuple(key): Fraction(q) for key, q in self.inspectee.items()}

    def is_k_free(self) -> bool:
        return all(len(key) == 2 for key in self.inspector)


ValueFn = Callable[[StateKey], Tuple[Fraction, Fraction]]


def stage_game(state: StateKey, spec: GameSpec, value_fn: ValueFn) -> StageGame:
    """Stage game at an interior state given continuation payoffs.

    ``value_fn`` maps a successor state to its (inspector, inspectee)
    payoff pair.
    """
    state = StateKey(*state)
    if not is_interior(state):
        raise GameSpecError(
            "not_recursive_state", f"stage game needs n > m > 0 and k > 0, got {tuple(state)}"
        )
    n, m, k = state
    r = reward_at(state, spec)
    inspected = value_fn(StateKey(n - 1, m - 1, k))
    skipped = value_fn(StateKey(n - 1, m, k))
    violated = value_fn(StateKey(n - 1, m, k - 1))
    caught = caught_payoffs(state, spec)
    if spec.variant is Variant.ZERO_SUM:
        return StageGame.zero_sum_game(inspected[0], caught[0], skipped[0], violated[0] - r)
    return StageGame.bimatrix(
        (inspected[0], caught[0], skipped[0], violated[0] - r),
        (inspected[1], caught[1], skipped[1], violated[1] + r),
    )


def reachable_states(root: StateKey):
    """States reachable from ``root``; play only continues from interior ones."""
    root = StateKey(*root)
    seen = {root}
    stack = [root]
    while stack:
        state = stack.pop()
        if not is_interior(state):
            continue
        n, m, k = state
        for nxt in (StateKey(n - 1, m - 1, k), StateKey(n - 1, m, k), StateKey(n - 1, m, k - 1)):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


# -- JSON ------------------------------------------------------------------

def rational_to_json(x) -> dict:
    x = to_rational(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def rational_from_json(obj) -> Fraction:
    """Accept ``{"num", "den"}`` objects, integers, or "p/q" strings."""
    if isinstance(obj, dict):
        try:
            return Fraction(int(obj["num"]), int(obj["den"]))
        except (KeyError, ValueError, ZeroDivisionError) as exc:
            raise GameSpecError("bad_rational", f"cannot read rational {obj!r}") from exc
    if isinstance(obj, bool) or obj is None:
        raise GameSpecError("bad_rational", f"cannot read rational {obj!r}")
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, str):
        try:
            return Fraction(obj)
        except (ValueError, ZeroDivisionError) as exc:
            raise GameSpecError("bad_rational", f"cannot read rational {obj!r}") from exc
    if isinstance(obj, float):
        raise GameSpecError("bad_rational", f"floats are not exact, write {obj!r} as a string")
    raise GameSpecError("bad_rational", f"cannot read rational {obj!r}")


def spec_to_dict(spec: GameSpec) -> dict:
    return {
        "n": spec.n,
        "m": spec.m,
        "k": spec.k,
        "b": rational_to_json(spec.b),
        "a": None if spec.a is None else rational_to_json(spec.a),
        "rewards": [rational_to_json(r) for r in spec.rewards],
        "caught_costs": None
        if spec.caught_costs is None
        else [rational_to_json(c) for c in spec.caught_costs],
        "variant": spec.variant.value,
    }


def spec_from_dict(doc: dict) -> GameSpec:
    if not isinstance(doc, dict):
        raise GameSpecError("bad_document", "game spec must be a JSON object")
    missing = [f for f in ("n", "m", "k", "b", "rewards") if f not in doc]
    if missing:
        raise GameSpecError("missing_field", f"missing field(s): {', '.join(missing)}")
    for name in ("n", "m", "k"):
        if not isinstance(doc[name], int) or isinstance(doc[name], bool):
            raise GameSpecError("negative_parameter", f"{name} must be a nonnegative integer")
    try:
        variant = Variant(doc.get("variant") or Variant.ZERO_SUM.value)
    except ValueError as exc:
        raise GameSpecError("bad_variant", f"unknown variant {doc.get('variant')!r}") from exc
    if not isinstance(doc["rewards"], list):
        raise GameSpecError("bad_document", "rewards must be an array")
    costs = doc.get("caught_costs")
    if costs is not None and not isinstance(costs, list):
        raise GameSpecError("bad_document", "caught_costs must be an array")
    return GameSpec(
        n=doc["n"],
        m=doc["m"],
        k=doc["k"],
        b=rational_from_json(doc["b"]),
        a=None if doc.get("a") is None else rational_from_json(doc["a"]),
        rewards=tuple(rational_from_json(r) for r in doc["rewards"]),
        caught_costs=None if costs is None else tuple(rational_from_json(c) for c in costs),
        variant=variant,
    )


def load_spec(text: str) -> GameSpec:
    """Parse and validate a JSON game spec."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameSpecError("invalid_json", f"invalid JSON: {exc}") from exc
    return validate(spec_from_dict(doc))


def dump_spec(spec: GameSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2)
