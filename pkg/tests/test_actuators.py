import io

import pytest

from fuzzy_hvac.actuators import (
    ActuatorRouter,
    ActuatorState,
    LogSink,
    RecordingSink,
    route,
)
from fuzzy_hvac.controller import HvacState
from fuzzy_hvac.ingestion import load_day_csv
from fuzzy_hvac.simulation import run_simulation


def test_routes():
    assert route(HvacState.COOL_MAX) == ActuatorState(yellow_leds_on=2)
    assert route(HvacState.COOL_NORMAL) == ActuatorState(yellow_leds_on=1)
    assert route(HvacState.OFF) == ActuatorState(blue_led_on=True)
    assert route(HvacState.HEAT_NORMAL) == ActuatorState(red_leds_on=1)
    assert route(HvacState.HEAT_MAX) == ActuatorState(red_leds_on=2)


def test_injective_and_invertible():
    states = {route(s) for s in HvacState}
    assert len(states) == len(HvacState)
    assert all(route(s).hvac_state is s for s in HvacState)


@pytest.mark.parametrize("kwargs", [
    {}, {"yellow_leds_on": 1, "blue_led_on": True}, {"red_leds_on": 3},
])
def test_exactly_one_group(kwargs):
    with pytest.raises(ValueError):
        ActuatorState(**kwargs)


def test_log_sink_format():
    out = io.StringIO()
    sink = LogSink(out)
    assert sink.apply(route(HvacState.COOL_MAX), "20:00") is True
    assert sink.apply(route(HvacState.COOL_MAX), "21:00") is False
    sink.apply(route(HvacState.OFF), "22:00")
    assert out.getvalue().splitlines() == [
        "20:00 CoolMax yellow=2 red=0 blue=0",
        "21:00 CoolMax yellow=2 red=0 blue=0",
        "22:00 Off yellow=0 red=0 blue=1",
    ]


def test_recording_sink_idempotent():
    sink = RecordingSink()
    state = route(HvacState.HEAT_NORMAL)
    assert sink.apply(state) is True
    assert sink.apply(state) is False
    assert sink.current == state


def test_one_state_per_reading():
    readings = load_day_csv()
    sink = RecordingSink()
    report = run_simulation(readings, "baseline", router=ActuatorRouter(sink))
    assert [t for t, _ in sink.history] == [r.timestamp for r in readings]
    assert sink.states == [e.state for e in report.entries]
