"""Open-loop replay of a day of readings and on-hour comparison.

Each reading stands for one hour and is scored on its own: commands never
feed back into the recorded indoor temperature.  A non-Off state counts as
one on-hour for its system, and savings are on-hour reductions.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

from .actuators import ActuatorRouter
from .baseline import DEFAULT_THRESHOLDS, ThresholdConfig, baseline_decide
from .controller import ClimateController, ClimateInputs, HvacState
from .errors import DataError, FuzzyHvacError
from .ingestion import ClimateReading

FUZZY = "fuzzy"
BASELINE = "baseline"


@dataclass(frozen=True)
class ScheduleEntry:
    timestamp: str
    state: HvacState
    # Crisp action value for the fuzzy controller, the threshold band for the baseline.
    value: float | str
    apparent_temp: float | None = None


@dataclass(frozen=True)
class ScheduleReport:
    controller: str
    entries: tuple[ScheduleEntry, ...]

    @property
    def timestamps(self) -> list[str]:
        return [e.timestamp for e in self.entries]

    def hours(self, predicate) -> int:
        return sum(1 for e in self.entries if predicate(e.state))

    @property
    def heating_on(self) -> int:
        return self.hours(lambda s: s.heating)

    @property
    def cooling_on(self) -> int:
        return self.hours(lambda s: s.cooling)

    @property
    def heating_max(self) -> int:
        return self.hours(lambda s: s is HvacState.HEAT_MAX)

    @property
    def cooling_max(self) -> int:
        return self.hours(lambda s: s is HvacState.COOL_MAX)

    def state_hours(self) -> dict[HvacState, int]:
        return {state: self.hours(lambda s, t=state: s is t) for state in HvacState}


class FuzzyPolicy:
    name = FUZZY

    def __init__(self, controller: ClimateController | None = None):
        self.controller = controller or ClimateController()

    def decide(self, reading: ClimateReading) -> ScheduleEntry:
        apparent, cmd = self.controller.decide(
            ClimateInputs(reading.outdoor_temp, reading.humidity, reading.indoor_temp))
        return ScheduleEntry(reading.timestamp, cmd.state, cmd.action_value, apparent.crisp)


class BaselinePolicy:
    name = BASELINE

    def __init__(self, thresholds: ThresholdConfig = DEFAULT_THRESHOLDS):
        self.thresholds = thresholds

    def decide(self, reading: ClimateReading) -> ScheduleEntry:
        state = baseline_decide(reading.indoor_temp, self.thresholds)
        return ScheduleEntry(reading.timestamp, state, self.thresholds.band(reading.indoor_temp))


class SimulationError(FuzzyHvacError):
    def __init__(self, timestamp, cause):
        self.timestamp = timestamp
        super().__init__(f"{timestamp}: {cause}")


def run_simulation(readings: Iterable[ClimateReading], controller,
                   router: ActuatorRouter | None = None) -> ScheduleReport:
    """Score every reading with ``controller`` (a policy object or a mode name)."""
    if isinstance(controller, str):
        controller = make_policy(controller)
    entries = []
    for reading in readings:
        try:
            entry = controller.decide(reading)
        except (FuzzyHvacError, ValueError) as exc:
            raise SimulationError(reading.timestamp, exc) from exc
        if router is not None:
            router.dispatch(entry.state, entry.timestamp)
        entries.append(entry)
    if not entries:
        raise DataError("no readings to simulate")
    return ScheduleReport(controller.name, tuple(entries))


def make_policy(mode: str, *, controller=None, thresholds=DEFAULT_THRESHOLDS):
    if mode == FUZZY:
        return FuzzyPolicy(controller)
    if mode == BASELINE:
        return BaselinePolicy(thresholds)
    raise ValueError(f"unknown controller {mode!r}")


def saving_pct(base_on: int, fuzzy_on: int) -> float | None:
    """Percentage of on-hours saved; ``None`` when the baseline never ran."""
    if base_on <= 0:
        return None
    return 100.0 * (base_on - fuzzy_on) / base_on


@dataclass(frozen=True)
class SavingsSummary:
    heating_on_hours: dict[str, int]
    cooling_on_hours: dict[str, int]
    max_power_hours: dict[str, dict[str, int]]  # controller -> system -> hours
    heating_saving_pct: float | None
    cooling_saving_pct: float | None
    combined_saving_pct: float | None


def compare(base: ScheduleReport, fuzzy: ScheduleReport) -> SavingsSummary:
    for i, (a, b) in enumerate(zip(base.timestamps, fuzzy.timestamps)):
        if a != b:
            raise DataError(f"schedules diverge at entry {i}: {a!r} vs {b!r}")
    if len(base.entries) != len(fuzzy.entries):
        i = min(len(base.entries), len(fuzzy.entries))
        raise DataError(
            f"schedules diverge at entry {i}: lengths {len(base.entries)} vs {len(fuzzy.entries)}")
    reports = {base.controller: base, fuzzy.controller: fuzzy}
    return SavingsSummary(
        heating_on_hours={k: r.heating_on for k, r in reports.items()},
        cooling_on_hours={k: r.cooling_on for k, r in reports.items()},
        max_power_hours={k: {"heating": r.heating_max, "cooling": r.cooling_max}
                         for k, r in reports.items()},
        heating_saving_pct=saving_pct(base.heating_on, fuzzy.heating_on),
        cooling_saving_pct=saving_pct(base.cooling_on, fuzzy.cooling_on),
        combined_saving_pct=saving_pct(base.heating_on + base.cooling_on,
                                       fuzzy.heating_on + fuzzy.cooling_on),
    )


def format_pct(pct: float | None) -> str:
    """``27.27%``, ``62.5%``, ``0%``; ``n/a`` when undefined."""
    if pct is None:
        return "n/a"
    text = f"{pct:.2f}".rstrip("0").rstrip(".")
    return f"{'0' if text == '-0' else text}%"


def _value_cell(value) -> str:
    return f"{value:.3f}" if isinstance(value, float) else str(value)


def schedule_csv(schedules: Sequence[ScheduleReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("time", "controller", "state", "action_value"))
    for report in schedules:
        for e in report.entries:
            writer.writerow((e.timestamp, report.controller, e.state, _value_cell(e.value)))
    return buf.getvalue()


def _hours_table(schedules):
    lines = [f"{'controller':<10} {'heating':>8} {'heat max':>9} {'cooling':>8} {'cool max':>9} {'off':>4}"]
    for r in schedules:
        off = len(r.entries) - r.heating_on - r.cooling_on
        lines.append(f"{r.controller:<10} {r.heating_on:>8} {r.heating_max:>9} "
                     f"{r.cooling_on:>8} {r.cooling_max:>9} {off:>4}")
    return lines


def schedule_text(schedules: Sequence[ScheduleReport], summary: SavingsSummary | None = None) -> str:
    lines = []
    stamps = schedules[0].timestamps
    header = f"{'time':<6}" + "".join(f" {r.controller:>22}" for r in schedules)
    lines += [header, "-" * len(header)]
    for i, stamp in enumerate(stamps):
        cells = []
        for r in schedules:
            e = r.entries[i]
            cells.append(f" {str(e.state):>11} {_value_cell(e.value):>10}")
        lines.append(f"{stamp:<6}" + "".join(cells))
    lines += ["", "On-hours"]
    lines += _hours_table(schedules)
    if summary is not None:
        lines += [
            "",
            "Savings (on-hour reduction)",
            f"  heating:  {format_pct(summary.heating_saving_pct)}",
            f"  cooling:  {format_pct(summary.cooling_saving_pct)}",
            f"  combined: {format_pct(summary.combined_saving_pct)}",
        ]
    return "\n".join(lines) + "\n"


def emit_report(summary: SavingsSummary | None, schedule, fmt: str = "text") -> str:
    """Render schedules (one report or several) as ``text`` or ``csv``."""
    schedules = [schedule] if isinstance(schedule, ScheduleReport) else list(schedule)
    if not schedules:
        raise ValueError("nothing to report")
    if fmt == "csv":
        return schedule_csv(schedules)
    if fmt == "text":
        return schedule_text(schedules, summary)
    raise ValueError(f"unknown report format {fmt!r}")
