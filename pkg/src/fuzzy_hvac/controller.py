"""Two-stage climate controller.

Stage one turns outdoor temperature and humidity into a crisp apparent
temperature.  Stage two combines that value with the indoor temperature and
yields a crisp action value together with one of five discrete HVAC states.
The apparent temperature is handed between the stages as its centroid and
fuzzified again, not chained as a fuzzy set.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .config import load_config
from .engine import (
    DEFAULT_CENTROID_STEP,
    FuzzyConfig,
    FuzzyValue,
    defuzzify_centroid,
    evaluate_rules,
    fuzzify,
)

# A tie between two states only counts when the memberships agree this closely.
TIE_TOLERANCE = 1e-9


class HvacState(enum.Enum):
    HEAT_MAX = "HeatMax"
    HEAT_NORMAL = "HeatNormal"
    OFF = "Off"
    COOL_NORMAL = "CoolNormal"
    COOL_MAX = "CoolMax"

    def __str__(self):
        return self.value

    @property
    def heating(self) -> bool:
        return self in (HvacState.HEAT_MAX, HvacState.HEAT_NORMAL)

    @property
    def cooling(self) -> bool:
        return self in (HvacState.COOL_NORMAL, HvacState.COOL_MAX)

    @property
    def max_power(self) -> bool:
        return self in (HvacState.HEAT_MAX, HvacState.COOL_MAX)


# Action terms of the bundled configuration, in tie-break priority order
# (least energy first).
ACTION_TERMS = {
    "no_system": HvacState.OFF,
    "heat_normal": HvacState.HEAT_NORMAL,
    "cool_normal": HvacState.COOL_NORMAL,
    "heat_max": HvacState.HEAT_MAX,
    "cool_max": HvacState.COOL_MAX,
}


@dataclass(frozen=True)
class ClimateInputs:
    outdoor_temp: float
    outdoor_humidity: float
    indoor_temp: float


@dataclass(frozen=True)
class ApparentTemperature:
    crisp: float
    degrees: FuzzyValue


@dataclass(frozen=True)
class HvacCommand:
    state: HvacState
    action_value: float


class ClimateController:
    """Runs the apparent-temperature and action rule bases of a configuration.

    Args:
        config: validated configuration; defaults to the bundled rules.
        centroid_step: sampling step of the centroid defuzzifier.
    """

    def __init__(self, config: FuzzyConfig | None = None,
                 centroid_step: float = DEFAULT_CENTROID_STEP,
                 apparent_rules="apparent_temperature", action_rules="action"):
        if not centroid_step > 0:
            raise ValueError(f"centroid step must be positive, got {centroid_step}")
        self.config = config if config is not None else load_config()
        self.centroid_step = centroid_step
        self.apparent_rb = self.config.rulebase(apparent_rules)
        self.action_rb = self.config.rulebase(action_rules)
        self.humidity_var, self.outdoor_var = (
            self.config.variable(v) for v in self.apparent_rb.inputs)
        self.apparent_var = self.config.variable(self.apparent_rb.output)
        self.indoor_var, self.apparent_in_var = (
            self.config.variable(v) for v in self.action_rb.inputs)
        self.action_var = self.config.variable(self.action_rb.output)
        unknown = set(self.action_var.term_names) - set(ACTION_TERMS)
        if unknown:
            raise ValueError(f"action variable has unmapped terms: {sorted(unknown)}")

    def compute_apparent_temperature(self, outdoor_temp: float, humidity: float) -> ApparentTemperature:
        _check_finite(outdoor_temp=outdoor_temp, humidity=humidity)
        inputs = {
            self.humidity_var.name: fuzzify(self.humidity_var, humidity),
            self.outdoor_var.name: fuzzify(self.outdoor_var, outdoor_temp),
        }
        degrees = evaluate_rules(self.apparent_rb, inputs)
        crisp = defuzzify_centroid(self.apparent_var, degrees, self.centroid_step)
        return ApparentTemperature(crisp, degrees)

    def decide_action(self, apparent: ApparentTemperature | float, indoor_temp: float) -> HvacCommand:
        crisp = apparent.crisp if isinstance(apparent, ApparentTemperature) else apparent
        _check_finite(apparent=crisp, indoor_temp=indoor_temp)
        inputs = {
            self.indoor_var.name: fuzzify(self.indoor_var, indoor_temp),
            self.apparent_in_var.name: fuzzify(self.apparent_in_var, crisp),
        }
        degrees = evaluate_rules(self.action_rb, inputs)
        value = defuzzify_centroid(self.action_var, degrees, self.centroid_step)
        return HvacCommand(self.command_from_action(value), value)

    def command_from_action(self, action_value: float) -> HvacState:
        """State whose action term has the largest membership at ``action_value``.

        Ties go to the state that spends less energy: Off, then the normal
        power states, then the max power ones.
        """
        best, best_mu = None, -1.0
        for term, state in ACTION_TERMS.items():
            mu = self.action_var.term(term)(action_value)
            if mu > best_mu + TIE_TOLERANCE:
                best, best_mu = state, mu
        return best

    def decide(self, inputs: ClimateInputs) -> tuple[ApparentTemperature, HvacCommand]:
        apparent = self.compute_apparent_temperature(inputs.outdoor_temp, inputs.outdoor_humidity)
        return apparent, self.decide_action(apparent, inputs.indoor_temp)


def _check_finite(**values):
    for name, value in values.items():
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value}")


_default = None


def default_controller() -> ClimateController:
    global _default
    if _default is None:
        _default = ClimateController()
    return _default


def compute_apparent_temperature(outdoor_temp: float, humidity: float) -> ApparentTemperature:
    return default_controller().compute_apparent_temperature(outdoor_temp, humidity)


def decide_action(apparent, indoor_temp: float) -> HvacCommand:
    return default_controller().decide_action(apparent, indoor_temp)


def command_from_action(action_value: float) -> HvacState:
    return default_controller().command_from_action(action_value)
