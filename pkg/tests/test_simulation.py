import pytest

from fuzzy_hvac.actuators import ActuatorRouter, RecordingSink
from fuzzy_hvac.controller import HvacState
from fuzzy_hvac.errors import DataError
from fuzzy_hvac.ingestion import ClimateReading, load_day_csv
from fuzzy_hvac.simulation import (
    ScheduleEntry,
    ScheduleReport,
    SimulationError,
    compare,
    emit_report,
    format_pct,
    run_simulation,
    saving_pct,
)

DAY = load_day_csv()
H, O, C = HvacState.HEAT_NORMAL, HvacState.OFF, HvacState.COOL_NORMAL


def report(name, heat, cool, hours=24):
    states = [H] * heat + [C] * cool + [O] * (hours - heat - cool)
    return ScheduleReport(name, tuple(ScheduleEntry(f"{i:02d}:00", s, 0.0)
                                      for i, s in enumerate(states)))


def test_baseline_day():
    base = run_simulation(DAY, "baseline")
    assert (base.heating_on, base.heating_max, base.cooling_on, base.cooling_max) == (11, 4, 8, 4)
    assert len(base.entries) == 24


def test_fuzzy_day_never_cool_max():
    fuzzy = run_simulation(DAY, "fuzzy")
    assert fuzzy.cooling_max == 0
    assert all(e.apparent_temp is not None for e in fuzzy.entries)


def test_single_hot_reading():
    reading = ClimateReading("20:00", 42, 28, 26)
    assert run_simulation([reading], "baseline").entries[0].state is HvacState.COOL_MAX


def test_router_sees_every_hour():
    sink = RecordingSink()
    run_simulation(DAY, "baseline", router=ActuatorRouter(sink))
    assert len(sink.states) == 24


def test_empty_and_unknown():
    with pytest.raises(DataError):
        run_simulation([], "baseline")
    with pytest.raises(ValueError):
        run_simulation(DAY, "pid")


def test_bad_reading_names_timestamp():
    with pytest.raises(SimulationError, match="07:00"):
        run_simulation([ClimateReading("07:00", 50, 10, float("nan"))], "fuzzy")


@pytest.mark.parametrize("base, fuzzy, printed", [
    ((11, 8), (8, 3), ("27.27%", "62.5%")),
    ((11, 8), (11, 8), ("0%", "0%")),
    ((0, 8), (0, 3), ("n/a", "62.5%")),
])
def test_compare(base, fuzzy, printed):
    summary = compare(report("baseline", *base), report("fuzzy", *fuzzy))
    assert (format_pct(summary.heating_saving_pct), format_pct(summary.cooling_saving_pct)) == printed


def test_combined_saving():
    summary = compare(report("baseline", 11, 8), report("fuzzy", 8, 3))
    assert summary.combined_saving_pct == pytest.approx(100 * 8 / 19)
    assert summary.heating_on_hours == {"baseline": 11, "fuzzy": 8}


def test_saving_can_be_negative():
    assert saving_pct(4, 5) == -25.0
    assert format_pct(-25.0) == "-25%"


def test_compare_rejects_misaligned():
    base = report("baseline", 1, 1)
    shifted = ScheduleReport("fuzzy", base.entries[1:] + base.entries[:1])
    with pytest.raises(DataError, match="entry 0"):
        compare(base, shifted)
    with pytest.raises(DataError, match="entry 23"):
        compare(base, report("fuzzy", 1, 1, hours=23))


def test_emit_csv():
    base = run_simulation(DAY, "baseline")
    fuzzy = run_simulation(DAY, "fuzzy")
    text = emit_report(compare(base, fuzzy), [base, fuzzy], "csv")
    lines = text.splitlines()
    assert lines[0] == "time,controller,state,action_value"
    assert len(lines) == 49
    assert lines[1] == "00:00,baseline,Off,18<=t<23"
    assert lines[2] == "01:00,baseline,HeatNormal,15<=t<18"
    time, name, state, value = lines[25].split(",")
    assert (time, name) == ("00:00", "fuzzy") and len(value.split(".")[1]) == 3


def test_emit_text():
    base = run_simulation(DAY, "baseline")
    text = emit_report(None, base, "text")
    assert "On-hours" in text and "Savings" not in text
    with pytest.raises(ValueError):
        emit_report(None, base, "xml")
