"""Two-stage threshold thermostat used as the comparison baseline."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

from .controller import HvacState
from .errors import ConfigError


@dataclass(frozen=True)
class ThresholdConfig:
    """Indoor temperature bands in °C.

    The printed bands leave (17, 18) and (22, 23) open; :func:`baseline_decide`
    extends heating at normal power up to the off band and the off band up to
    cooling at normal power.
    """

    heat_max_below: float = 15.0
    heat_normal_range: tuple[float, float] = (15.0, 17.0)
    off_range: tuple[float, float] = (18.0, 22.0)
    cool_normal_range: tuple[float, float] = (23.0, 25.0)
    cool_max_above: float = 25.0

    def __post_init__(self):
        for name in ("heat_normal_range", "off_range", "cool_normal_range"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        edges = (self.heat_max_below, *self.heat_normal_range, *self.off_range,
                 *self.cool_normal_range, self.cool_max_above)
        if not all(math.isfinite(e) for e in edges):
            raise ConfigError("threshold bands must be finite")
        if any(a > b for a, b in zip(edges, edges[1:])):
            raise ConfigError(f"threshold bands are not ordered: {edges}")
        if not (self.heat_normal_range[1] < self.off_range[0]
                and self.off_range[1] < self.cool_normal_range[0]):
            raise ConfigError("threshold bands overlap")

    @classmethod
    def from_json(cls, path) -> "ThresholdConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
            return cls(**data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc

    def to_dict(self) -> dict:
        return asdict(self)

    def band(self, indoor_temp: float) -> str:
        """Human-readable band that ``indoor_temp`` falls into."""
        state = baseline_decide(indoor_temp, self)
        lo_heat, lo_off, lo_cool = self.heat_max_below, self.off_range[0], self.cool_normal_range[0]
        hi_cool = self.cool_max_above
        return {
            HvacState.HEAT_MAX: f"t<{lo_heat:g}",
            HvacState.HEAT_NORMAL: f"{lo_heat:g}<=t<{lo_off:g}",
            HvacState.OFF: f"{lo_off:g}<=t<{lo_cool:g}",
            HvacState.COOL_NORMAL: f"{lo_cool:g}<=t<={hi_cool:g}",
            HvacState.COOL_MAX: f"t>{hi_cool:g}",
        }[state]


DEFAULT_THRESHOLDS = ThresholdConfig()


def baseline_decide(indoor_temp: float, cfg: ThresholdConfig = DEFAULT_THRESHOLDS) -> HvacState:
    if not math.isfinite(indoor_temp):
        raise ValueError(f"indoor temperature must be finite, got {indoor_temp}")
    if indoor_temp < cfg.heat_max_below:
        return HvacState.HEAT_MAX
    if indoor_temp < cfg.off_range[0]:
        return HvacState.HEAT_NORMAL
    if indoor_temp < cfg.cool_normal_range[0]:
        return HvacState.OFF
    if indoor_temp <= cfg.cool_max_above:
        return HvacState.COOL_NORMAL
    return HvacState.COOL_MAX
