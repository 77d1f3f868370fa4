"""Ultrasonic beacon positioning: geometry, solver, filters and simulator."""

import json

from ._sappo import (
    Ema,
    Kalman,
    MovingAverage,
    SappoError,
    battery_life_hours,
    bilaterate2,
    cone_triangle_area,
    coverage,
    default_scenario,
    disc_area,
    error_curve,
    footprint_diameter,
    height_correct,
    lens_area,
    sector_area,
    simulate,
    sound_speed,
    trilaterate3_canonical,
    validate_scenario,
    write_simulation,
)


def load_scenario(path):
    """Reads and validates a scenario file, returning it as a dict."""
    with open(path, encoding="utf-8") as f:
        return json.loads(validate_scenario(f.read()))


def dump_scenario(scenario):
    """Scenario dict to the JSON text the simulator functions take."""
    return json.dumps(scenario)


__all__ = [
    "Ema",
    "Kalman",
    "MovingAverage",
    "SappoError",
    "battery_life_hours",
    "bilaterate2",
    "cone_triangle_area",
    "coverage",
    "default_scenario",
    "disc_area",
    "dump_scenario",
    "error_curve",
    "footprint_diameter",
    "height_correct",
    "lens_area",
    "load_scenario",
    "sector_area",
    "simulate",
    "sound_speed",
    "trilaterate3_canonical",
    "validate_scenario",
    "write_simulation",
]
