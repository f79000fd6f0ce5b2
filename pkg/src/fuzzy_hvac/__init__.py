"""Fuzzy-logic HVAC decision engine and day-replay simulator."""

__version__ = "0.1.0"
