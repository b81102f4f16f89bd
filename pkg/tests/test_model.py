import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from inspection_game.model import (
    BehaviorStrategy,
    GameSpec,
    GameSpecError,
    StageGame,
    StateKey,
    Variant,
    base_payoffs,
    caught_cost_at,
    dump_spec,
    load_spec,
    rational_from_json,
    rational_to_json,
    reachable_states,
    reward_at,
    stage_game,
    validate,
)
from inspection_game import closed_form as cf

F = Fraction


def nz(n, m, k, a, b, rewards, variant=Variant.NON_ZERO_SUM):
    return GameSpec(n, m, k, b, rewards, variant=variant, a=a)


class TestValidate:
    def test_zero_sum_needs_b_above_minus_one(self):
        with pytest.raises(GameSpecError) as err:
            validate(GameSpec(2, 1, 1, -1, [1]))
        assert err.value.code == "penalty_factor_range"
        assert str(err.value) == "penalty factor must exceed −1"

    def test_zero_sum_accepts_negative_b(self):
        validate(GameSpec(2, 1, 1, F(-1, 2), [1]))

    def test_non_zero_sum_ok(self):
        validate(nz(2, 1, 1, F(1, 2), 0, [1]))

    def test_negative_reward(self):
        with pytest.raises(GameSpecError) as err:
            validate(GameSpec(1, 0, 1, 1, [-1]))
        assert err.value.code == "negative_reward"

    def test_reward_length(self):
        with pytest.raises(GameSpecError) as err:
            validate(GameSpec(3, 1, 2, 1, [1]))
        assert err.value.code == "reward_length"

    @pytest.mark.parametrize("a", [0, 1, F(3, 2), F(-1, 2)])
    def test_cost_factor_range(self, a):
        with pytest.raises(GameSpecError) as err:
            validate(nz(2, 1, 1, a, 1, [1]))
        assert err.value.code == "cost_factor_range"

    def test_missing_cost_factor(self):
        with pytest.raises(GameSpecError) as err:
            validate(GameSpec(2, 1, 1, 1, [1], variant=Variant.NON_ZERO_SUM))
        assert err.value.code == "missing_cost_factor"

    def test_non_zero_sum_negative_b(self):
        with pytest.raises(GameSpecError) as err:
            validate(nz(2, 1, 1, F(1, 2), F(-1, 2), [1]))
        assert err.value.code == "penalty_factor_negative"

    def test_relaxed_allows_embedding(self):
        validate(nz(2, 1, 1, F(-1, 2), F(1, 2), [1]), relaxed=True)

    def test_negative_parameter(self):
        with pytest.raises(GameSpecError) as err:
            validate(GameSpec(-1, 0, 0, 1, []))
        assert err.value.code == "negative_parameter"

    def test_k_larger_than_n_is_legal(self):
        validate(GameSpec(2, 1, 5, 1, [1] * 5))

    def test_caught_costs(self):
        spec = nz(2, 1, 1, F(1, 2), 1, [1], Variant.LEADERSHIP).with_params(caught_costs=[0])
        with pytest.raises(GameSpecError) as err:
            validate(spec)
        assert err.value.code == "caught_cost_nonpositive"
        with pytest.raises(GameSpecError) as err:
            validate(spec.with_params(caught_costs=[1, 2]))
        assert err.value.code == "caught_cost_length"


class TestRewardIndexing:
    spec = GameSpec(4, 1, 2, 1, [5, 3])

    def test_first_violation(self):
        assert reward_at(StateKey(4, 1, 2), self.spec) == 5

    def test_second_violation(self):
        assert reward_at(StateKey(3, 1, 1), self.spec) == 3

    def test_no_violation_left(self):
        with pytest.raises(GameSpecError) as err:
            reward_at(StateKey(3, 1, 0), self.spec)
        assert err.value.code == "no_violation_left"

    def test_default_caught_cost(self):
        spec = nz(2, 1, 2, F(1, 2), 1, [4, 2], Variant.LEADERSHIP)
        assert caught_cost_at(StateKey(2, 1, 2), spec) == 2
        assert caught_cost_at(StateKey(2, 1, 1), spec) == 1


class TestStageGame:
    def test_zero_sum_two_one_one(self):
        spec = GameSpec(2, 1, 1, 1, [1])
        stage = stage_game(StateKey(2, 1, 1), spec, lambda s: cf.payoffs(s, spec))
        assert stage.inspector == (-1, 1, 0, -1)
        assert stage.inspectee == (1, -1, 0, 1)
        assert stage.zero_sum
        assert stage.terminal[0][1] and not stage.terminal[1][1]

    def test_bimatrix_two_one_one(self):
        spec = nz(2, 1, 1, F(1, 2), 1, [1])
        stage = stage_game(StateKey(2, 1, 1), spec, lambda s: cf.payoffs(s, spec))
        assert stage.inspector == (-1, F(-1, 2), 0, -1)
        assert stage.inspectee == (1, -1, 0, 1)
        assert not stage.zero_sum

    def test_all_zero_rewards_give_all_zero_table(self):
        spec = GameSpec(4, 2, 2, 1, [0, 0])
        stage = stage_game(StateKey(4, 2, 2), spec, lambda s: cf.payoffs(s, spec))
        assert stage.is_all_zero()

    @pytest.mark.parametrize("state", [(3, 3, 1), (3, 0, 1), (3, 1, 0), (0, 0, 0)])
    def test_rejects_non_recursive(self, state):
        spec = GameSpec(3, 3, 1, 1, [1])
        with pytest.raises(GameSpecError):
            stage_game(StateKey(*state), spec, lambda s: (0, 0))

    def test_circular_inequalities(self):
        spec = GameSpec(6, 3, 4, F(1, 2), [2, 1, 3, F(1, 2)])
        for state in reachable_states(spec.root):
            if not (state.n > state.m > 0 and state.k > 0) or cf.is_degenerate(state, spec):
                continue
            A, B, C, D = stage_game(state, spec, lambda s: cf.payoffs(s, spec)).inspector
            assert A < C and B > D and A < B and C > D

    def test_constructors(self):
        g = StageGame.zero_sum_game(1, 2, 3, 4)
        assert g.inspectee == (-1, -2, -3, -4)
        h = StageGame.bimatrix((1, 2, 3, 4), (5, 6, 7, 8))
        assert h.inspectee == (5, 6, 7, 8)


class TestBaseCases:
    def test_saturated_is_zero(self):
        spec = GameSpec(3, 3, 2, 1, [1, 2])
        assert base_payoffs(StateKey(3, 3, 2), spec) == (0, 0)

    def test_no_inspections_collects(self):
        spec = GameSpec(5, 0, 3, 1, [1, 2, 4])
        assert base_payoffs(StateKey(2, 0, 3), spec) == (-3, 3)
        assert base_payoffs(StateKey(5, 0, 3), spec) == (-7, 7)


def test_reachable_states_count():
    states = reachable_states(StateKey(3, 1, 2))
    assert StateKey(3, 1, 2) in states
    assert len(states) <= 4 * 2 * 3


def test_behavior_strategy_k_free():
    assert BehaviorStrategy({(2, 1): F(1, 3)}, {}).is_k_free()
    assert not BehaviorStrategy({(2, 1, 1): F(1, 3)}, {}).is_k_free()


class TestJson:
    def test_rational_encoding(self):
        assert rational_to_json(F(-2, 6)) == {"num": "-1", "den": "3"}

    @pytest.mark.parametrize("obj,value", [({"num": "3", "den": "9"}, F(1, 3)), (4, 4), ("-5/7", F(-5, 7))])
    def test_rational_decoding(self, obj, value):
        assert rational_from_json(obj) == value

    @pytest.mark.parametrize("obj", [0.5, True, None, {"num": "1"}, "x", {"num": "1", "den": "0"}])
    def test_rational_decoding_errors(self, obj):
        with pytest.raises(GameSpecError):
            rational_from_json(obj)

    @given(st.fractions(max_denominator=10**30))
    def test_rational_round_trip(self, x):
        assert rational_from_json(json.loads(json.dumps(rational_to_json(x)))) == x

    def test_spec_round_trip(self):
        spec = GameSpec(5, 2, 3, F(1, 3), [1, F(2, 7), 0], variant=Variant.LEADERSHIP,
                        a=F(1, 2), caught_costs=[1, 1, 2])
        again = load_spec(dump_spec(spec))
        assert again == spec

    def test_invalid_json(self):
        with pytest.raises(GameSpecError) as err:
            load_spec("{not json")
        assert err.value.code == "invalid_json"

    def test_load_validates(self):
        with pytest.raises(GameSpecError) as err:
            load_spec('{"n": 2, "m": 1, "k": 1, "b": -1, "rewards": [1]}')
        assert err.value.code == "penalty_factor_range"
