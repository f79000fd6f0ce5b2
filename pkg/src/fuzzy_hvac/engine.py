"""Mamdani fuzzy inference primitives.

Membership functions are piecewise-linear trapezoids (triangles and shoulders
are special cases).  Rules use min for AND, implication clips the consequent
set, aggregation takes the pointwise max, and the crisp output is the centroid
of the aggregated set sampled on a regular grid.

Every object here is immutable once built, so a configured engine can be
shared between threads.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import ConfigError, NoRuleFiredError, UnknownReferenceError

log = logging.getLogger(__name__)

DEFAULT_CENTROID_STEP = 0.1


@dataclass(frozen=True)
class PiecewiseLinearMF:
    """Trapezoidal membership function with breakpoints ``a <= b <= c <= d``.

    ``left_shoulder`` keeps the membership at 1 for every ``x <= c`` and
    ``right_shoulder`` keeps it at 1 for every ``x >= b``.  For a shoulder the
    outer breakpoint is stored equal to the inner one (``a == b`` or
    ``c == d``) and names the universe bound.
    """

    a: float
    b: float
    c: float
    d: float
    left_shoulder: bool = False
    right_shoulder: bool = False

    def __post_init__(self):
        for name in "abcd":
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"breakpoint {name} must be finite")
        if not (self.a <= self.b <= self.c <= self.d):
            raise ConfigError(
                f"breakpoints must satisfy a <= b <= c <= d, got "
                f"({self.a}, {self.b}, {self.c}, {self.d})"
            )
        if self.left_shoulder and self.a != self.b:
            raise ConfigError("a left shoulder needs a == b")
        if self.right_shoulder and self.c != self.d:
            raise ConfigError("a right shoulder needs c == d")

    @classmethod
    def left(cls, lo, c, d):
        return cls(lo, lo, c, d, left_shoulder=True)

    @classmethod
    def right(cls, a, b, hi):
        return cls(a, b, hi, hi, right_shoulder=True)

    def __call__(self, x: float) -> float:
        return membership(self, x)

    def evaluate(self, xs: np.ndarray) -> np.ndarray:
        """Vectorised membership over an array of points."""
        xs = np.asarray(xs, dtype=float)
        with np.errstate(over="ignore"):  # tiny slopes saturate, clip handles it
            return self._evaluate(xs)

    def _evaluate(self, xs):
        ones = np.ones_like(xs)
        if self.left_shoulder:
            rise = ones
        elif self.a == self.b:
            rise = np.where(xs >= self.a, 1.0, 0.0)
        else:
            rise = np.clip((xs - self.a) / (self.b - self.a), 0.0, 1.0)
        if self.right_shoulder:
            fall = ones
        elif self.c == self.d:
            fall = np.where(xs <= self.d, 1.0, 0.0)
        else:
            fall = np.clip((self.d - xs) / (self.d - self.c), 0.0, 1.0)
        return np.minimum(rise, fall)

    def support(self) -> tuple[float, float]:
        return self.a, self.d

    def plateau(self) -> tuple[float, float]:
        return self.b, self.c


def membership(mf: PiecewiseLinearMF, x: float) -> float:
    """Degree of truth of ``x`` in ``mf``.

    Degenerate rise or fall segments (``a == b`` or ``c == d``) evaluate to
    the plateau value at the breakpoint itself.
    """
    if x < mf.b:
        if mf.left_shoulder:
            return 1.0
        if x < mf.a or mf.a == mf.b:
            return 0.0
        return (x - mf.a) / (mf.b - mf.a)
    if x > mf.c:
        if mf.right_shoulder:
            return 1.0
        if x > mf.d or mf.c == mf.d:
            return 0.0
        return (mf.d - x) / (mf.d - mf.c)
    return 1.0


@dataclass(frozen=True)
class LinguisticVariable:
    name: str
    lo: float
    hi: float
    terms: tuple[tuple[str, PiecewiseLinearMF], ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.lo < self.hi:
            raise ConfigError(f"variable {self.name!r}: empty universe [{self.lo}, {self.hi}]")
        if not self.terms:
            raise ConfigError(f"variable {self.name!r} has no terms")
        seen = set()
        for term, mf in self.terms:
            if term in seen:
                raise ConfigError(f"variable {self.name!r}: duplicate term {term!r}")
            seen.add(term)
            if mf.a < self.lo or mf.d > self.hi:
                raise ConfigError(
                    f"variable {self.name!r}: term {term!r} support "
                    f"[{mf.a}, {mf.d}] leaves the universe [{self.lo}, {self.hi}]"
                )
        gap = self._coverage_gap()
        if gap is not None:
            raise ConfigError(f"variable {self.name!r}: no term covers x={gap}")

    def _coverage_gap(self):
        # Memberships are linear between consecutive breakpoints, so a gap
        # shows up at a breakpoint or at a midpoint between two of them.
        points = {self.lo, self.hi}
        for _, mf in self.terms:
            points.update(p for p in (mf.a, mf.b, mf.c, mf.d) if self.lo <= p <= self.hi)
        points = sorted(points)
        probes = points + [(p + q) / 2 for p, q in zip(points, points[1:])]
        for x in sorted(probes):
            if max(membership(mf, x) for _, mf in self.terms) <= 0.0:
                return x
        return None

    @property
    def term_names(self) -> tuple[str, ...]:
        return tuple(t for t, _ in self.terms)

    def term(self, name: str) -> PiecewiseLinearMF:
        for term, mf in self.terms:
            if term == name:
                return mf
        raise UnknownReferenceError(
            f"variable {self.name!r} has no term {name!r}", name
        )

    def clamp(self, x: float) -> float:
        if x < self.lo or x > self.hi:
            clamped = min(max(x, self.lo), self.hi)
            log.warning("%s: %s outside [%s, %s], clamped to %s",
                        self.name, x, self.lo, self.hi, clamped)
            return clamped
        return x

    def grid(self, step: float) -> np.ndarray:
        """Evenly spaced samples from ``lo`` to ``hi`` inclusive.

        The spacing is ``step`` rounded so that the last sample lands on ``hi``.
        """
        if not step > 0:
            raise ValueError(f"step must be positive, got {step}")
        n = max(1, int(round((self.hi - self.lo) / step)))
        return np.linspace(self.lo, self.hi, n + 1)


class FuzzyValue(Mapping):
    """Immutable mapping of term name to degree of truth in [0, 1]."""

    __slots__ = ("_degrees",)

    def __init__(self, degrees=None, **kwargs):
        data = dict(degrees or {}, **kwargs)
        for term, degree in data.items():
            if not 0.0 <= degree <= 1.0:
                raise ValueError(f"degree of {term!r} out of [0, 1]: {degree}")
        self._degrees = {t: float(v) for t, v in data.items()}

    def __getitem__(self, term: str) -> float:
        return self._degrees[term]

    def __iter__(self) -> Iterator[str]:
        return iter(self._degrees)

    def __len__(self) -> int:
        return len(self._degrees)

    def __repr__(self):
        inner = ", ".join(f"{t}={v:g}" for t, v in self._degrees.items())
        return f"FuzzyValue({inner})"

    def degree(self, term: str) -> float:
        return self._degrees.get(term, 0.0)

    def top(self) -> str:
        """Name of the term with the highest degree (first one on ties)."""
        return max(self._degrees, key=self._degrees.__getitem__)

    def nonzero(self) -> dict[str, float]:
        return {t: v for t, v in self._degrees.items() if v > 0.0}

    def max_degree(self) -> float:
        return max(self._degrees.values(), default=0.0)


def fuzzify(var: LinguisticVariable, x: float) -> FuzzyValue:
    """Degrees of truth of a crisp value for every term of ``var``.

    Values outside the universe are clamped to it and a warning is logged.
    """
    if not math.isfinite(x):
        raise ValueError(f"{var.name}: cannot fuzzify non-finite value {x}")
    x = var.clamp(x)
    return FuzzyValue({term: membership(mf, x) for term, mf in var.terms})


@dataclass(frozen=True)
class Rule:
    antecedents: tuple[tuple[str, str], ...]
    consequent: tuple[str, str]

    def __post_init__(self):
        object.__setattr__(self, "antecedents", tuple(tuple(a) for a in self.antecedents))
        object.__setattr__(self, "consequent", tuple(self.consequent))
        if not self.antecedents:
            raise ConfigError("a rule needs at least one antecedent")

    def strength(self, inputs: Mapping[str, FuzzyValue]) -> float:
        return min(inputs[var].degree(term) for var, term in self.antecedents)

    def __str__(self):
        cond = " and ".join(f"{v} is {t}" for v, t in self.antecedents)
        return f"if {cond} then {self.consequent[0]} is {self.consequent[1]}"


@dataclass(frozen=True)
class RuleBase:
    name: str
    inputs: tuple[str, ...]
    output: str
    rules: tuple[Rule, ...]
    complete: bool = False

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "rules", tuple(self.rules))
        if not self.inputs:
            raise ConfigError(f"rule base {self.name!r} declares no inputs")
        if len(set(self.inputs)) != len(self.inputs):
            raise ConfigError(f"rule base {self.name!r} repeats an input variable")
        for rule in self.rules:
            for var, _ in rule.antecedents:
                if var not in self.inputs:
                    raise UnknownReferenceError(
                        f"rule base {self.name!r}: {var!r} is not one of its inputs", var
                    )
            if rule.consequent[0] != self.output:
                raise ConfigError(
                    f"rule base {self.name!r}: rule concludes {rule.consequent[0]!r}, "
                    f"expected output {self.output!r}"
                )

    def check_against(self, variables: Mapping[str, LinguisticVariable]):
        """Validate every reference against a variable registry."""
        for var in (*self.inputs, self.output):
            if var not in variables:
                raise UnknownReferenceError(
                    f"rule base {self.name!r}: unknown variable {var!r}", var
                )
        for rule in self.rules:
            for var, term in (*rule.antecedents, rule.consequent):
                if term not in variables[var].term_names:
                    raise UnknownReferenceError(
                        f"rule base {self.name!r}: unknown term {term!r} "
                        f"for variable {var!r}", term
                    )
        if self.complete:
            self._check_complete(variables)

    def _check_complete(self, variables):
        expected = 1
        for var in self.inputs:
            expected *= len(variables[var].terms)
        combos = {}
        for rule in self.rules:
            ante = dict(rule.antecedents)
            if len(ante) != len(self.inputs) or len(rule.antecedents) != len(self.inputs):
                raise ConfigError(
                    f"rule base {self.name!r} is declared complete but a rule "
                    f"does not mention every input: {rule}"
                )
            key = tuple(ante[v] for v in self.inputs)
            if key in combos:
                raise ConfigError(
                    f"rule base {self.name!r}: duplicate rule for {dict(zip(self.inputs, key))}"
                )
            combos[key] = rule
        if len(combos) != expected:
            raise ConfigError(
                f"rule base {self.name!r} is declared complete but has "
                f"{len(combos)} of {expected} input combinations"
            )


def evaluate_rules(rb: RuleBase, inputs: Mapping[str, FuzzyValue]) -> FuzzyValue:
    """Fire every rule with min-AND and combine per consequent term with max.

    Terms that no rule concludes do not appear in the result; read them with
    :meth:`FuzzyValue.degree`, which returns 0.
    """
    missing = [v for v in rb.inputs if v not in inputs]
    if missing:
        raise ConfigError(f"rule base {rb.name!r}: missing input for {', '.join(missing)}")
    out: dict[str, float] = {}
    for rule in rb.rules:
        term = rule.consequent[1]
        out[term] = max(out.get(term, 0.0), rule.strength(inputs))
    return FuzzyValue(out)


def aggregate(var: LinguisticVariable, fv: Mapping[str, float], xs: np.ndarray) -> np.ndarray:
    """Max of the clipped consequent sets, sampled at ``xs``."""
    mu = np.zeros_like(xs, dtype=float)
    for term, mf in var.terms:
        level = fv.get(term, 0.0)
        if level > 0.0:
            np.maximum(mu, np.minimum(level, mf.evaluate(xs)), out=mu)
    return mu


def defuzzify_centroid(var: LinguisticVariable, fv: Mapping[str, float],
                       step: float = DEFAULT_CENTROID_STEP) -> float:
    """Centre of gravity of the aggregated output set on a grid of ``step``.

    Samples are weighted by the trapezoid rule (end samples count half), which
    keeps shoulder sets that sit at full height on a universe bound from
    pulling the result toward that bound.
    """
    xs = var.grid(step)
    mu = aggregate(var, fv, xs)
    w = mu.copy()
    w[0] *= 0.5
    w[-1] *= 0.5
    total = w.sum()
    if total <= 0.0:
        raise NoRuleFiredError(f"{var.name}: no rule fired, nothing to defuzzify")
    return float(np.clip((xs * w).sum() / total, var.lo, var.hi))


@dataclass(frozen=True)
class FuzzyConfig:
    """A validated registry of variables and rule bases."""

    variables: tuple[LinguisticVariable, ...]
    rulebases: tuple[RuleBase, ...]
    _by_name: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "rulebases", tuple(self.rulebases))
        if not self.variables:
            raise ConfigError("no variables declared")
        by_name = {}
        for var in self.variables:
            if var.name in by_name:
                raise ConfigError(f"duplicate variable {var.name!r}")
            by_name[var.name] = var
        names = set()
        for rb in self.rulebases:
            if rb.name in names:
                raise ConfigError(f"duplicate rule base {rb.name!r}")
            names.add(rb.name)
            rb.check_against(by_name)
        object.__setattr__(self, "_by_name", by_name)

    def __iter__(self):
        # Allows ``variables, rulebases = parse_config(text)``.
        return iter((self.variables, self.rulebases))

    def variable(self, name: str) -> LinguisticVariable:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownReferenceError(f"unknown variable {name!r}", name) from None

    def rulebase(self, name: str) -> RuleBase:
        for rb in self.rulebases:
            if rb.name == name:
                return rb
        raise UnknownReferenceError(f"unknown rule base {name!r}", name)
