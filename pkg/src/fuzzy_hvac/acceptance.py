"""Acceptance checks over the bundled day and rules.

Run with ``fuzzy-hvac acceptance`` or ``python -m fuzzy_hvac.acceptance``;
each check prints one PASS/FAIL line.
"""
from __future__ import annotations

import sys
import time
from dataclasses import dataclass

import numpy as np

from .config import load_config, parse_config, serialize_config
from .controller import ClimateController, HvacState
from .engine import FuzzyConfig, LinguisticVariable, defuzzify_centroid, evaluate_rules, fuzzify
from .ingestion import load_day_csv
from .simulation import FuzzyPolicy, compare, emit_report, format_pct, run_simulation

MAX_RUNTIME_S = 1.0
FUZZY_HEATING_BAND = (7, 9)
FUZZY_COOLING_BAND = (2, 4)
COMBINED_SAVING_BAND = (35.0, 50.0)
CENTROID_TOLERANCE = 0.05
ORACLE_STEP = 0.001
ORACLE_SAMPLES = 100
MONOTONIC_APPARENT = (-10.0, 0.0, 10.0, 20.0, 30.0, 40.0)
SEED = 20161120

TEMPERATURE_TERMS = ("extremely_low", "very_low", "low", "normal",
                     "high", "very_high", "extremely_high")
HUMIDITY_TERMS = ("very_low", "low", "normal", "high", "very_high")

_T = dict(EL="extremely_low", VL="very_low", L="low", N="normal",
          H="high", VH="very_high", EH="extremely_high")
_A = dict(HM="heat_max", HN="heat_normal", OFF="no_system", CN="cool_normal", CM="cool_max")

# Apparent temperature by humidity (rows) and outdoor temperature (columns).
APPARENT_TABLE = {
    "very_low": "EL VL VL N N H VH",
    "low": "EL VL L N H VH EH",
    "normal": "EL VL L N VH EH EH",
    "high": "VL L L N VH EH EH",
    "very_high": "L L N N EH EH EH",
}

# Action by indoor temperature (rows) and apparent temperature (columns).
ACTION_TABLE = {
    "extremely_low": "HM HM HM HM HM HM HM",
    "very_low": "HM HM HM HM HM HM HM",
    "low": "HM HM HM HN HN HN HN",
    "normal": "HN HN HN OFF OFF OFF CN",
    "high": "OFF OFF OFF OFF CN CN CM",
    "very_high": "CN CN CN CN CM CM CM",
    "extremely_high": "CM CM CM CM CM CM CM",
}


def expected_apparent(humidity: str, outdoor: str) -> str:
    return _T[APPARENT_TABLE[humidity].split()[TEMPERATURE_TERMS.index(outdoor)]]


def expected_action(indoor: str, apparent: str) -> str:
    return _A[ACTION_TABLE[indoor].split()[TEMPERATURE_TERMS.index(apparent)]]


@dataclass
class Result:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _timed(fn):
    start = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - start


def check_baseline(readings) -> Result:
    report, elapsed = _timed(lambda: run_simulation(readings, "baseline"))
    got = (report.heating_on, report.heating_max, report.cooling_on, report.cooling_max)
    ok = got == (11, 4, 8, 4) and elapsed < MAX_RUNTIME_S
    return Result("baseline exactness", ok,
                  f"heating={got[0]} heat-max={got[1]} cooling={got[2]} cool-max={got[3]} "
                  f"(want 11/4/8/4), {elapsed:.3f}s")


def check_fuzzy_bands(readings, controller) -> list[Result]:
    report, elapsed = _timed(lambda: run_simulation(readings, FuzzyPolicy(controller)))
    fast = elapsed < MAX_RUNTIME_S
    lo, hi = FUZZY_HEATING_BAND
    clo, chi = FUZZY_COOLING_BAND
    return [
        Result("fuzzy replay heating-on band", lo <= report.heating_on <= hi and fast,
               f"{report.heating_on} h, want [{lo},{hi}], {elapsed:.3f}s"),
        Result("fuzzy replay cooling-on band", clo <= report.cooling_on <= chi and fast,
               f"{report.cooling_on} h, want [{clo},{chi}], {elapsed:.3f}s"),
        Result("fuzzy replay cooling-max", report.cooling_max == 0 and fast,
               f"{report.cooling_max} h, want 0, {elapsed:.3f}s"),
    ]


def check_savings(readings, controller) -> list[Result]:
    base = run_simulation(readings, "baseline")
    fuzzy = run_simulation(readings, FuzzyPolicy(controller))
    summary = compare(base, fuzzy)
    lo, hi = COMBINED_SAVING_BAND
    combined = summary.combined_saving_pct
    results = [Result("combined on-hour saving band",
                      combined is not None and lo <= combined <= hi,
                      f"{format_pct(combined)}, want [{lo:g}%, {hi:g}%]")]
    if fuzzy.heating_on == 8 and fuzzy.cooling_on == 3:
        printed = (format_pct(summary.heating_saving_pct), format_pct(summary.cooling_saving_pct))
        results.append(Result("per-system savings print", printed == ("27.27%", "62.5%"),
                              f"heating {printed[0]}, cooling {printed[1]}"))
    else:
        results.append(Result(
            "per-system savings print", True,
            f"not applicable (fuzzy heating={fuzzy.heating_on} h, cooling={fuzzy.cooling_on} h)"))
    return results


def plateau_midpoint(var: LinguisticVariable, term: str) -> float:
    b, c = var.term(term).plateau()
    return (b + c) / 2


def _golden(cfg: FuzzyConfig, rb_name, rows, cols, expected) -> tuple[int, list[str]]:
    rb = cfg.rulebase(rb_name)
    row_var, col_var = (cfg.variable(v) for v in rb.inputs)
    checked, bad = 0, []
    for r in rows:
        for c in cols:
            inputs = {row_var.name: fuzzify(row_var, plateau_midpoint(row_var, r)),
                      col_var.name: fuzzify(col_var, plateau_midpoint(col_var, c))}
            out = evaluate_rules(rb, inputs)
            want = expected(r, c)
            top = out.degree(want)
            others = [out.degree(t) for t in cfg.variable(rb.output).term_names if t != want]
            checked += 1
            if not (top > 0 and all(top > o for o in others)):
                bad.append(f"{r}x{c}->{want} got {out.nonzero()}")
    return checked, bad


def check_rule_tables(cfg: FuzzyConfig) -> list[Result]:
    n1, bad1 = _golden(cfg, "apparent_temperature", HUMIDITY_TERMS, TEMPERATURE_TERMS,
                       expected_apparent)
    n2, bad2 = _golden(cfg, "action", TEMPERATURE_TERMS, TEMPERATURE_TERMS, expected_action)
    return [
        Result("apparent-temperature rule table", n1 == 35 and not bad1,
               f"{n1 - len(bad1)}/35 entries" + (f"; first mismatch {bad1[0]}" if bad1 else "")),
        Result("action rule table", n2 == 49 and not bad2,
               f"{n2 - len(bad2)}/49 entries" + (f"; first mismatch {bad2[0]}" if bad2 else "")),
    ]


def _oracle_membership(var: LinguisticVariable, term: str, xs: np.ndarray) -> np.ndarray:
    # Linear interpolation through the corner points, flat beyond a shoulder.
    mf = var.term(term)
    if mf.left_shoulder:
        xp, fp = [mf.c, mf.d], [1.0, 0.0]
    elif mf.right_shoulder:
        xp, fp = [mf.a, mf.b], [0.0, 1.0]
    else:
        xp, fp = [mf.a, mf.b, mf.c, mf.d], [0.0, 1.0, 1.0, 0.0]
    if mf.left_shoulder and mf.right_shoulder:
        return np.ones_like(xs)
    return np.interp(xs, xp, fp, left=fp[0], right=fp[-1])


def oracle_centroid(var: LinguisticVariable, degrees, step: float = ORACLE_STEP) -> float:
    """Centroid by trapezoidal quadrature on a fine grid."""
    n = int(round((var.hi - var.lo) / step))
    xs = np.linspace(var.lo, var.hi, n + 1)
    mu = np.zeros_like(xs)
    for term in var.term_names:
        level = degrees.get(term, 0.0)
        if level > 0:
            mu = np.maximum(mu, np.minimum(level, _oracle_membership(var, term, xs)))
    return float(np.trapezoid(xs * mu, xs) / np.trapezoid(mu, xs))


def random_fuzzy_values(var: LinguisticVariable, n: int, rng: np.random.Generator):
    values = []
    while len(values) < n:
        degrees = rng.uniform(0.0, 1.0, len(var.terms))
        degrees[rng.uniform(size=len(var.terms)) < 0.5] = 0.0
        if degrees.max() > 0:
            values.append(dict(zip(var.term_names, degrees.tolist())))
    return values


def check_centroid_oracle(cfg: FuzzyConfig) -> list[Result]:
    rng = np.random.default_rng(SEED)
    results = []
    for var in cfg.variables:
        worst = 0.0
        for fv in random_fuzzy_values(var, ORACLE_SAMPLES, rng):
            worst = max(worst, abs(defuzzify_centroid(var, fv, 0.1) - oracle_centroid(var, fv)))
        results.append(Result(f"centroid oracle [{var.name}]", worst < CENTROID_TOLERANCE,
                              f"max |step 0.1 - step 0.001| = {worst:.4f} over {ORACLE_SAMPLES}"))
    return results


def check_coverage(cfg: FuzzyConfig) -> Result:
    gaps = []
    for var in cfg.variables:
        xs = var.grid(0.1)
        best = np.max([mf.evaluate(xs) for _, mf in var.terms], axis=0)
        if best.min() <= 0:
            gaps.append(f"{var.name}@{xs[int(best.argmin())]:.1f}")
    return Result("coverage at 0.1 sampling", not gaps,
                  f"{len(cfg.variables)} variables" + (f"; gaps {gaps}" if gaps else ""))


def check_monotonic(controller: ClimateController) -> Result:
    drops = []
    for apparent in MONOTONIC_APPARENT:
        prev = None
        for indoor in range(-15, 51):
            value = controller.decide_action(apparent, float(indoor)).action_value
            if prev is not None and value < prev:
                drops.append((prev - value, apparent, indoor))
            prev = value
    detail = f"{len(MONOTONIC_APPARENT)}x66 grid, {len(drops)} decreasing steps"
    if drops:
        size, apparent, indoor = max(drops)
        detail += f"; worst {size:.3f} at apparent={apparent:g}, indoor {indoor - 1}->{indoor}"
    return Result("action monotonic in indoor temperature", not drops, detail)


def check_extreme_rows(controller: ClimateController) -> Result:
    bad = []
    apparent_grid = np.arange(-15.0, 50.5, 1.0)
    for indoor in np.arange(-15.0, -6.99, 0.5):
        for apparent in apparent_grid:
            if controller.decide_action(float(apparent), float(indoor)).state is not HvacState.HEAT_MAX:
                bad.append((indoor, apparent))
    for indoor in np.arange(38.0, 50.01, 0.5):
        for apparent in apparent_grid:
            if controller.decide_action(float(apparent), float(indoor)).state is not HvacState.COOL_MAX:
                bad.append((indoor, apparent))
    return Result("extreme-row constancy", not bad,
                  "indoor<=-7 HeatMax, indoor>=38 CoolMax" + (f"; {len(bad)} exceptions" if bad else ""))


def check_round_trip(cfg: FuzzyConfig) -> Result:
    again = parse_config(serialize_config(cfg))
    return Result("parser round-trip", again == cfg,
                  f"{len(cfg.variables)} variables, {sum(len(r.rules) for r in cfg.rulebases)} rules")


def check_deterministic_reports(readings, cfg: FuzzyConfig) -> Result:
    def render():
        controller = ClimateController(cfg)
        base = run_simulation(readings, "baseline")
        fuzzy = run_simulation(readings, FuzzyPolicy(controller))
        return emit_report(compare(base, fuzzy), [base, fuzzy], "csv").encode()

    first, second = render(), render()
    return Result("byte-identical reports", first == second, f"{len(first)} bytes")


def run_all() -> list[Result]:
    cfg = load_config()
    readings = load_day_csv()
    controller = ClimateController(cfg)
    results = [check_baseline(readings)]
    results += check_fuzzy_bands(readings, controller)
    results += check_savings(readings, controller)
    results += check_rule_tables(cfg)
    results += check_centroid_oracle(cfg)
    results += [
        check_coverage(cfg),
        check_monotonic(controller),
        check_extreme_rows(controller),
        check_round_trip(cfg),
        check_deterministic_reports(readings, cfg),
    ]
    return results


def main() -> int:
    results = run_all()
    for result in results:
        print(result.line())
    return 0 if all(r.passed for r in results) else 4


if __name__ == "__main__":
    sys.exit(main())
