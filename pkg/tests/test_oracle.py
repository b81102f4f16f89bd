from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from inspection_game import closed_form as cf
from inspection_game.model import (
    BehaviorStrategy,
    GameSpec,
    StageGame,
    StateKey,
    Variant,
    caught_payoffs,
    reward_at,
)
from inspection_game.oracle import (
    InfoMode,
    Player,
    StageError,
    StrategyError,
    best_response_value,
    profile_value,
    solve_2x2_mixed,
    solve_recursive,
)

F = Fraction
GAME_312 = GameSpec(3, 1, 2, 1, [1, 1])


class TestStageSolver:
    def test_zero_sum(self):
        p, q, values = solve_2x2_mixed(StageGame.zero_sum_game(-1, 1, 0, -1))
        assert (p, q, values) == (F(1, 3), F(1, 3), (F(-1, 3), F(1, 3)))

    def test_bimatrix(self):
        stage = StageGame.bimatrix((-1, F(-1, 2), 0, -1), (1, -1, 0, 1))
        p, q, values = solve_2x2_mixed(stage)
        assert p == F(1, 3)
        assert q == F(2, 3)
        assert values == (F(-2, 3), F(1, 3))

    def test_all_zero(self):
        stage = StageGame.zero_sum_game(0, 0, 0, 0)
        assert solve_2x2_mixed(stage, degenerate_p=F(2, 5)) == (F(2, 5), 0, (0, 0))
        with pytest.raises(ValueError):
            solve_2x2_mixed(stage)

    @pytest.mark.parametrize(
        "entries,inequality",
        [((1, 1, 0, -1), "A < C"), ((-1, -2, 0, -1), "B > D")],
    )
    def test_non_circular(self, entries, inequality):
        with pytest.raises(StageError) as err:
            solve_2x2_mixed(StageGame.zero_sum_game(*entries))
        assert err.value.inequality == inequality


class TestSolveRecursive:
    def test_three_one_two(self):
        root = solve_recursive(GAME_312).root
        assert (root.inspector_value, root.p, root.q) == (F(-3, 4), F(1, 4), F(5, 12))

    def test_saturated_table(self):
        table = solve_recursive(GameSpec(3, 3, 2, 1, [1, 1]))
        assert all(sol.inspector_value == 0 == sol.inspectee_value for sol in table.entries.values())

    def test_non_zero_sum(self):
        spec = GameSpec(2, 1, 1, 1, [1], variant=Variant.NON_ZERO_SUM, a=F(1, 2))
        root = solve_recursive(spec).root
        assert (root.inspector_value, root.inspectee_value) == (F(-2, 3), F(1, 3))

    def test_rejects_leadership(self):
        spec = GameSpec(2, 1, 1, 1, [1], variant=Variant.LEADERSHIP, a=F(1, 2))
        with pytest.raises(ValueError):
            solve_recursive(spec)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 9), st.data())
    def test_stage_count_bound(self, n, data):
        m = data.draw(st.integers(0, n))
        k = data.draw(st.integers(0, 9))
        table = solve_recursive(GameSpec(n, m, k, 1, [1] * k))
        assert len(table) <= (n + 1) * (m + 1) * (k + 1)

    def test_k_free_schedule_with_zero_rewards(self):
        spec = GameSpec(6, 2, 3, F(1, 2), [0, 2, 0])
        closed = cf.schedule(spec)
        for key, p in solve_recursive(spec).inspector_schedule().items():
            assert closed[key] == p

    def test_pluggable_stage_builder(self):
        # flat penalty: a caught violation costs the inspectee b, whatever the reward
        def flat_penalty(state, spec, value_fn):
            n, m, k = state
            r = reward_at(state, spec)
            return StageGame.zero_sum_game(
                value_fn(StateKey(n - 1, m - 1, k))[0],
                spec.b,
                value_fn(StateKey(n - 1, m, k))[0],
                value_fn(StateKey(n - 1, m, k - 1))[0] - r,
            )

        spec = GameSpec(4, 2, 2, 1, [2, 3])
        table = solve_recursive(spec, stage_builder=flat_penalty)
        for state, sol in table.entries.items():
            if state.n > state.m > 0 and state.k > 0:
                stage = flat_penalty(state, spec, lambda s: (table[s].inspector_value, 0))
                A, B, C, D = stage.inspector
                assert sol.p * A + (1 - sol.p) * C == sol.p * B + (1 - sol.p) * D
        assert table.root.inspector_value != solve_recursive(spec).root.inspector_value


class TestBestResponse:
    def test_inspectee_vs_schedule(self):
        profile = cf.equilibrium_profile(GAME_312)
        assert best_response_value(GAME_312, profile, Player.INSPECTEE) == F(3, 4)

    def test_inspector_vs_closed_form(self):
        profile = cf.equilibrium_profile(GAME_312)
        assert best_response_value(GAME_312, profile, Player.INSPECTOR) == F(-3, 4)

    def test_inspectee_without_inspections(self):
        spec = GameSpec(4, 0, 3, 1, [1, 2, 4])
        profile = cf.equilibrium_profile(spec)
        assert best_response_value(spec, profile, Player.INSPECTEE) == 7

    def test_missing_entries(self):
        profile = BehaviorStrategy({(3, 1): F(1, 4)}, {})
        with pytest.raises(StrategyError) as err:
            best_response_value(GAME_312, profile, Player.INSPECTEE)
        assert ("inspector", (2, 1)) in err.value.missing
        with pytest.raises(StrategyError) as err:
            best_response_value(GAME_312, profile, Player.INSPECTOR)
        assert ("inspectee", (3, 1, 2)) in err.value.missing

    def test_uninformed_rejects_k_keys(self):
        profile = cf.equilibrium_profile(GAME_312)
        profile.inspector[(3, 1, 2)] = F(1, 4)
        with pytest.raises(StrategyError):
            best_response_value(GAME_312, profile, Player.INSPECTEE, InfoMode.UNINFORMED)
        # an informed inspector may condition on k
        assert best_response_value(GAME_312, profile, Player.INSPECTEE) == F(3, 4)

    def test_out_of_range_probability(self):
        profile = cf.equilibrium_profile(GAME_312)
        profile.inspectee[(3, 1, 2)] = F(3, 2)
        with pytest.raises(StrategyError):
            best_response_value(GAME_312, profile, Player.INSPECTOR)

    @pytest.mark.parametrize("after_legal,after_violation", [(F(4, 7), 0), (0, F(4, 5))])
    def test_alternative_uninformed_equilibria(self, after_legal, after_violation):
        profile = cf.equilibrium_profile(GAME_312)
        profile.inspectee[(2, 1, 2)] = after_legal
        profile.inspectee[(2, 1, 1)] = after_violation
        assert profile_value(GAME_312, profile, InfoMode.UNINFORMED) == (F(-3, 4), F(3, 4))
        uninformed = best_response_value(GAME_312, profile, Player.INSPECTOR, InfoMode.UNINFORMED)
        assert uninformed == F(-3, 4)
        # an informed inspector can exploit either behavior
        assert best_response_value(GAME_312, profile, Player.INSPECTOR) > F(-3, 4)

    def test_uninformed_never_beats_informed(self):
        spec = GameSpec(5, 2, 3, F(1, 2), [1, 3, 2])
        profile = cf.equilibrium_profile(spec)
        profile.inspectee[(4, 2, 2)] = F(9, 10)
        profile.inspectee[(3, 1, 1)] = F(1, 10)
        informed = best_response_value(spec, profile, Player.INSPECTOR)
        uninformed = best_response_value(spec, profile, Player.INSPECTOR, InfoMode.UNINFORMED)
        assert uninformed <= informed

    def test_profile_value_matches_closed_form(self):
        spec = GameSpec(5, 2, 3, 1, [1, 3, 2], variant=Variant.NON_ZERO_SUM, a=F(1, 3))
        profile = cf.equilibrium_profile(spec)
        assert profile_value(spec, profile) == cf.nonzero_payoffs(spec.root, spec)

    def test_caught_payoffs_used(self):
        # inspect-always against violate-always on a one-period game
        spec = GameSpec(2, 1, 1, 2, [3])
        profile = BehaviorStrategy({(2, 1): F(1), (1, 1): F(1), (1, 0): F(0)},
                                   {(2, 1, 1): F(1), (1, 0, 1): F(1)})
        assert profile_value(spec, profile) == caught_payoffs(StateKey(2, 1, 1), spec)
