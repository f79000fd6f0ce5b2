"""Actuator layer: HVAC states as LED patterns, dispatched to sinks.

Two yellow LEDs mean cooling at max power and one yellow normal power; the
blue LED means both systems are off; one and two red LEDs mirror the yellow
side for heating.
"""
from __future__ import annotations

import logging
import sys
from dataclasses import dataclass
from typing import Protocol, TextIO

from .controller import HvacState

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ActuatorState:
    yellow_leds_on: int = 0
    red_leds_on: int = 0
    blue_led_on: bool = False

    def __post_init__(self):
        if not (0 <= self.yellow_leds_on <= 2 and 0 <= self.red_leds_on <= 2):
            raise ValueError(f"LED counts must be in 0..2: {self}")
        active = (self.yellow_leds_on > 0) + (self.red_leds_on > 0) + bool(self.blue_led_on)
        if active != 1:
            raise ValueError(f"exactly one LED group must be on: {self}")

    @property
    def hvac_state(self) -> HvacState:
        return _BY_LEDS[self]


_ROUTES = {
    HvacState.COOL_MAX: ActuatorState(yellow_leds_on=2),
    HvacState.COOL_NORMAL: ActuatorState(yellow_leds_on=1),
    HvacState.OFF: ActuatorState(blue_led_on=True),
    HvacState.HEAT_NORMAL: ActuatorState(red_leds_on=1),
    HvacState.HEAT_MAX: ActuatorState(red_leds_on=2),
}
_BY_LEDS = {leds: state for state, leds in _ROUTES.items()}


def route(state: HvacState) -> ActuatorState:
    return _ROUTES[HvacState(state)]


def format_log_line(timestamp: str, state: ActuatorState) -> str:
    return (f"{timestamp} {state.hvac_state} yellow={state.yellow_leds_on} "
            f"red={state.red_leds_on} blue={int(state.blue_led_on)}")


class ActuatorSink(Protocol):
    def apply(self, state: ActuatorState, timestamp: str = "") -> bool:
        """Drive the actuators; return whether anything changed."""


class LogSink:
    """Writes one line per applied state."""

    def __init__(self, stream: TextIO | None = None):
        self.stream = stream if stream is not None else sys.stdout
        self.current: ActuatorState | None = None

    def apply(self, state: ActuatorState, timestamp: str = "") -> bool:
        changed = state != self.current
        self.current = state
        print(format_log_line(timestamp, state), file=self.stream, flush=True)
        return changed


class RecordingSink:
    """Keeps every applied ``(timestamp, state)`` pair in memory."""

    def __init__(self):
        self.history: list[tuple[str, ActuatorState]] = []
        self.current: ActuatorState | None = None

    def apply(self, state: ActuatorState, timestamp: str = "") -> bool:
        changed = state != self.current
        self.current = state
        self.history.append((timestamp, state))
        return changed

    @property
    def states(self) -> list[HvacState]:
        return [s.hvac_state for _, s in self.history]


class ActuatorRouter:
    """Routes each decision to every sink, in call order, from one thread."""

    def __init__(self, *sinks: ActuatorSink):
        self.sinks = list(sinks)

    def dispatch(self, state: HvacState, timestamp: str = "") -> ActuatorState:
        leds = route(state)
        for sink in self.sinks:
            if sink.apply(leds, timestamp):
                log.debug("%s: actuators now %s", timestamp, leds)
        return leds
