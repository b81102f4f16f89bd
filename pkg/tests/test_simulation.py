import json
from fractions import Fraction

import pytest

from inspection_game import closed_form as cf
from inspection_game.leadership import leadership_profile
from inspection_game.model import BehaviorStrategy, GameSpec, Variant
from inspection_game.oracle import StrategyError
from inspection_game.simulation import exploitability_report, simulate

F = Fraction
GAME_312 = GameSpec(3, 1, 2, 1, [1, 1])


def test_reproducible():
    spec = GameSpec(5, 2, 3, F(1, 2), [1, F(3, 2), 2])
    profile = cf.equilibrium_profile(spec)
    first = simulate(spec, profile, trials=70_000, seed=11)
    second = simulate(spec, profile, trials=70_000, seed=11)
    assert first.to_json() == second.to_json()
    assert simulate(spec, profile, trials=70_000, seed=12).to_json() != first.to_json()


def test_histogram_totals_and_targets():
    profile = cf.equilibrium_profile(GAME_312)
    report = simulate(GAME_312, profile, trials=20_000, seed=3)
    assert sum(report.caught_at_period.values()) == 20_000
    assert sum(report.violations_achieved.values()) == 20_000
    assert report.inspector_target == F(-3, 4)
    assert abs(report.inspector_z) <= 4
    assert report.inspector_z == pytest.approx(
        (report.inspector_mean - float(report.inspector_target)) / report.inspector_se
    )


def test_saturated_pays_nothing():
    spec = GameSpec(3, 3, 2, 1, [1, 1])
    inspector = {(n, m): F(1) for n in range(1, 4) for m in range(0, 4)}
    inspectee = {(n, m, k): F(1) for n in range(1, 4) for m in range(0, n) for k in range(1, 3)}
    report = simulate(spec, BehaviorStrategy(inspector, inspectee), trials=1000, seed=0)
    assert report.inspector_mean_exact == 0 == report.inspectee_mean_exact
    assert report.inspector_se == 0


def test_no_inspections_collects_every_reward():
    spec = GameSpec(3, 0, 5, 1, [1, 1, 1, 1, 1])
    report = simulate(spec, cf.equilibrium_profile(spec), trials=500, seed=1)
    assert report.violations_achieved[3] == 500
    assert report.inspectee_mean_exact == 3


def test_info_mode_transcripts_identical():
    spec = GameSpec(6, 2, 3, 1, [2, 1, 1])
    profile = cf.equilibrium_profile(spec)
    informed = simulate(spec, profile, trials=30_000, seed=5, info_mode="informed").to_dict()
    uninformed = simulate(spec, profile, trials=30_000, seed=5, info_mode="uninformed").to_dict()
    informed.pop("info_mode")
    uninformed.pop("info_mode")
    assert informed == uninformed


def test_leadership_never_caught():
    spec = GameSpec(2, 1, 1, 1, [1], variant=Variant.LEADERSHIP, a=F(1, 2))
    report = simulate(spec, leadership_profile(spec), trials=50_000, seed=9)
    assert report.caught_total == 0
    assert report.inspector_target == F(-1, 3)
    assert abs(report.inspector_z) <= 4


def test_errors():
    profile = cf.equilibrium_profile(GAME_312)
    with pytest.raises(ValueError):
        simulate(GAME_312, profile, trials=0, seed=0)
    with pytest.raises(StrategyError):
        simulate(GAME_312, BehaviorStrategy({}, {}), trials=10, seed=0)


def test_serialization():
    report = simulate(GAME_312, cf.equilibrium_profile(GAME_312), trials=100, seed=2)
    doc = json.loads(report.to_json())
    assert doc["inspector"]["target"] == {"num": "-3", "den": "4"}
    lines = report.histogram_csv().splitlines()
    assert lines[0] == "kind,bucket,count"
    assert any(line.startswith("caught_at_period,never,") for line in lines)


class TestExploitability:
    @pytest.mark.parametrize("mode", ["informed", "uninformed"])
    def test_equilibrium_has_no_regret(self, mode):
        spec = GameSpec(6, 2, 4, F(1, 3), [1, 0, F(5, 2), 2])
        assert exploitability_report(spec, cf.equilibrium_profile(spec), mode) == (0, 0)

    def test_perturbed_schedule(self):
        profile = cf.equilibrium_profile(GAME_312)
        profile.inspector[(3, 1)] += F(1, 10)
        inspector_regret, inspectee_regret = exploitability_report(GAME_312, profile)
        assert inspectee_regret > 0
        assert inspector_regret >= 0

    def test_all_legal_inspectee(self):
        profile = cf.equilibrium_profile(GAME_312)
        for state in profile.inspectee:
            if state[1] > 0:
                profile.inspectee[state] = F(0)
        assert exploitability_report(GAME_312, profile)[1] == 0
