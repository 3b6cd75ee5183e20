import math
from pathlib import Path

import pytest

import stormgrid

DATA = Path(__file__).resolve().parents[2] / "data"


def test_wind_spot_values():
    assert stormgrid.max_wind_radius_km(58, 21.8) == pytest.approx(27.66, abs=0.01)
    assert stormgrid.rain_10min(100) == pytest.approx(433.4, abs=0.1)
    v = stormgrid.radial_wind_speed(50, 30, 60)
    assert v == pytest.approx(50 * 0.5**0.6)


def test_scenarios_sum_to_one():
    probs = stormgrid.scenario_probabilities(DATA / "rts79" / "scenarios.ini", DATA / "rts79" / "typhoon.ini")
    assert len(probs) == 27
    assert math.fsum(p for _, p in probs) == pytest.approx(1.0, abs=1e-9)


def test_coefficient_band():
    model = stormgrid.CorrectionModel([1, 1, 1, 1, 1, 1, 1])
    assert model.k([60, 60, 150, 180, 180, 20, 0]) == pytest.approx(1.4)
    assert model.k([0, 0, -20, 0, 0, 50, 40]) == pytest.approx(0.9)
    assert len(stormgrid.feature_names()) == 7


def test_ahp_two_by_two():
    q, lam, cr = stormgrid.ahp_priority(["a", "b"], [[1, 3], [1 / 3, 1]])
    assert q == pytest.approx([0.75, 0.25])
    assert cr == pytest.approx(0.0)


def test_bottleneck_and_index():
    case = stormgrid.NetworkCase.load(DATA / "toy" / "bus3")
    assert case.corridor_ids == [1, 2, 3]
    assert stormgrid.min_load_shed(case, [3])["total_shed_mw"] == pytest.approx(40.0)
    table = stormgrid.StateEnumeration(case, order=3)
    p = [0.1, 0.2, 0.3]
    brute = 0.0
    for mask in range(8):
        prob = math.prod(p[i] if mask >> i & 1 else 1 - p[i] for i in range(3))
        failed = [i + 1 for i in range(3) if mask >> i & 1]
        brute += prob * stormgrid.min_load_shed(case, failed)["total_shed_mw"]
    assert table.r_sys([p], [1.0]) == pytest.approx(brute, abs=1e-9)


def test_errors_are_value_errors():
    with pytest.raises(stormgrid.StormgridError):
        stormgrid.ahp_priority(["a", "b"], [[1, 3], [0.5, 1]])
    with pytest.raises(ValueError):
        stormgrid.NetworkCase.load(DATA / "missing")


def test_weights_run():
    cfg = stormgrid.RunConfig()
    rts = DATA / "rts79"
    cfg.buses = rts / "buses.csv"
    cfg.generators = rts / "generators.csv"
    cfg.corridors = rts / "corridors.csv"
    cfg.typhoon = rts / "typhoon.ini"
    cfg.schemes = DATA / "reference" / "schemes.csv"
    cfg.pairwise = DATA / "reference" / "pairwise.csv"
    artifacts, code, summary = stormgrid.run("weights", cfg)
    assert code == 0
    assert "Scheme1" in summary
    assert "manifest.txt" in artifacts
