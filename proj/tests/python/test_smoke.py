import json
import math

import pytest

import sappo


def test_coverage_formulas():
    assert sappo.footprint_diameter(2.5, 30.0) == pytest.approx(1.3397, rel=1e-4)
    assert sappo.lens_area(9.0, 9.0) == pytest.approx((2 * math.pi / 3 - math.sqrt(3) / 2) * 81)
    assert sappo.sector_area(9.0, 90.0) == pytest.approx(63.617, rel=1e-4)


def test_solver():
    pts = sappo.bilaterate2((0.0, 0.0), 5.0, (8.0, 0.0), 5.0)
    assert sorted(round(p[1], 9) for p in pts) == [-3.0, 3.0]
    assert sappo.height_correct(1.0, 1.70, 1.45) == pytest.approx(0.968246, rel=1e-6)
    with pytest.raises(sappo.SappoError, match="slant"):
        sappo.height_correct(0.2, 1.70, 1.45)


def test_filters():
    k = sappo.Kalman(1.0, 0.0, 1.0, 0.0)
    k.step(1.0)
    assert k.gain == 0.5
    ema = sappo.Ema(0.5)
    assert [ema.step(0.0), ema.step(10.0)] == [0.0, 5.0]
    ma = sappo.MovingAverage(3)
    assert [ma.step(x) for x in (1, 2, 3, 4)] == [1.0, 1.5, 2.0, 3.0]


def test_error_curve():
    rows = sappo.error_curve("angle", 4.0, 0.0, 15.0, 15)
    assert rows[0][1] == pytest.approx(0.0, abs=1e-12)
    assert rows[-1][1] * 1000 == pytest.approx(2.014, rel=1e-3)


def test_scenario_round_trip_and_errors():
    text = sappo.default_scenario()
    s = json.loads(text)
    assert json.loads(sappo.validate_scenario(text)) == s
    s["beacons"][0]["colour"] = "red"
    with pytest.raises(sappo.SappoError, match=r"beacons\[0\]\.colour"):
        sappo.validate_scenario(json.dumps(s))


def test_simulate_is_deterministic():
    text = sappo.default_scenario()
    a = sappo.simulate(text, cycles=100)
    b = sappo.simulate(text, cycles=100)
    assert a == b
    assert a["summary"]["cycles"] == 100
    assert a["summary"]["cycle_rate_hz"] == pytest.approx(1 / 0.030, rel=1e-3)


def test_coverage_writes_maps(tmp_path):
    areas = sappo.coverage(sappo.default_scenario(), 0.1, str(tmp_path))
    assert set(areas) == {1, 2, 3}
    assert areas[1] >= areas[2] >= areas[3]
    assert (tmp_path / "coverage_min2.pgm").exists()
