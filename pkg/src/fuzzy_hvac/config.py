"""Loader for the line-oriented variable / rule configuration format.

    # comment
    variable <name> range <lo> <hi>
      term <name> <a> <b> <c> <d>          # "shoulder" allowed for a or d
    rulebase <name> inputs <v1> [<v2> ...] output <v> [complete]
      if <v1> is <t1> [and <v2> is <t2> ...] then <v> is <t>

``term`` lines attach to the closest preceding ``variable`` and ``if`` lines to
the closest preceding ``rulebase``.  Indentation is cosmetic.
"""
from __future__ import annotations

import math
import re
from importlib import resources
from pathlib import Path

from .engine import FuzzyConfig, LinguisticVariable, PiecewiseLinearMF, Rule, RuleBase
from .errors import ConfigError, ConfigSyntaxError, UnknownReferenceError

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
TOKEN = re.compile(r"\S+")
SHOULDER = "shoulder"

BUNDLED_CONFIG = "climate.rules"


class _Token(str):
    col: int

    def __new__(cls, text, col):
        tok = super().__new__(cls, text)
        tok.col = col
        return tok


def _tokenize(line: str) -> list[_Token]:
    line = line.split("#", 1)[0]
    return [_Token(m.group(), m.start() + 1) for m in TOKEN.finditer(line)]


class _Parser:
    def __init__(self, text):
        self.text = text
        self.lineno = 0
        self.variables: dict[str, LinguisticVariable] = {}
        self.rulebases: list[RuleBase] = []
        self._var = None  # (name, lo, hi, terms, lineno) being collected
        self._rb = None  # (name, inputs, output, complete, rules, lineno)

    def error(self, message, tok=None):
        return ConfigSyntaxError(message, self.lineno, tok.col if tok is not None else 1)

    def ident(self, tok):
        if tok is None:
            raise self.error("unexpected end of line")
        if not IDENT.match(tok):
            raise self.error(f"expected an identifier, got {tok!r}", tok)
        return str(tok)

    def number(self, tok, allow_shoulder=False):
        if tok is None:
            raise self.error("unexpected end of line")
        if allow_shoulder and tok == SHOULDER:
            return None
        try:
            value = float(tok)
        except ValueError:
            raise self.error(f"expected a number, got {tok!r}", tok) from None
        if not math.isfinite(value):
            raise self.error(f"expected a finite number, got {tok!r}", tok)
        return value

    def expect(self, toks, i, word):
        tok = toks[i] if i < len(toks) else None
        if tok != word:
            found = repr(str(tok)) if tok is not None else "end of line"
            raise self.error(f"expected {word!r}, found {found}", tok)

    def run(self) -> FuzzyConfig:
        for self.lineno, line in enumerate(self.text.splitlines(), start=1):
            toks = _tokenize(line)
            if not toks:
                continue
            keyword = toks[0]
            if keyword == "variable":
                self.close()
                self.start_variable(toks)
            elif keyword == "term":
                self.add_term(toks)
            elif keyword == "rulebase":
                self.close()
                self.start_rulebase(toks)
            elif keyword == "if":
                self.add_rule(toks)
            else:
                raise self.error(f"unknown keyword {str(keyword)!r}", keyword)
        self.close()
        if not self.variables:
            raise ConfigError("no variables declared")
        return FuzzyConfig(tuple(self.variables.values()), tuple(self.rulebases))

    def close(self):
        if self._var is not None:
            name, lo, hi, terms, lineno = self._var
            self._var = None
            try:
                self.variables[name] = LinguisticVariable(name, lo, hi, tuple(terms))
            except ConfigError as exc:
                raise ConfigError(f"line {lineno}: {exc}") from exc
        if self._rb is not None:
            name, inputs, output, complete, rules, lineno = self._rb
            self._rb = None
            rb = RuleBase(name, inputs, output, tuple(rules), complete)
            try:
                rb.check_against(self.variables)
            except UnknownReferenceError:
                raise
            except ConfigError as exc:
                raise ConfigError(f"line {lineno}: {exc}") from exc
            self.rulebases.append(rb)

    def start_variable(self, toks):
        if len(toks) != 5:
            raise self.error("expected: variable <name> range <lo> <hi>",
                             toks[5] if len(toks) > 5 else None)
        name = self.ident(toks[1])
        if name in self.variables:
            raise self.error(f"duplicate variable {name!r}", toks[1])
        self.expect(toks, 2, "range")
        lo, hi = self.number(toks[3]), self.number(toks[4])
        if not lo < hi:
            raise self.error(f"empty range [{lo}, {hi}]", toks[3])
        self._var = (name, lo, hi, [], self.lineno)

    def add_term(self, toks):
        if self._var is None:
            raise self.error("'term' outside a variable block", toks[0])
        name_, lo, hi, terms, _ = self._var
        if len(toks) != 6:
            raise self.error("expected: term <name> <a> <b> <c> <d>",
                             toks[6] if len(toks) > 6 else None)
        name = self.ident(toks[1])
        if any(t == name for t, _ in terms):
            raise self.error(f"duplicate term {name!r} in variable {name_!r}", toks[1])
        a = self.number(toks[2], allow_shoulder=True)
        b, c = self.number(toks[3]), self.number(toks[4])
        d = self.number(toks[5], allow_shoulder=True)
        left, right = a is None, d is None
        a = b if left else a
        d = c if right else d
        for tok, value in zip(toks[2:], (a, b, c, d)):
            if value < lo or value > hi:
                raise self.error(
                    f"term {name!r}: breakpoint {value:g} outside the universe "
                    f"[{lo:g}, {hi:g}] of {name_!r}", tok)
        try:
            mf = PiecewiseLinearMF(a, b, c, d, left_shoulder=left, right_shoulder=right)
        except ConfigError as exc:
            raise self.error(f"term {name!r}: {exc}", toks[2]) from exc
        terms.append((name, mf))

    def start_rulebase(self, toks):
        name = self.ident(toks[1] if len(toks) > 1 else None)
        if any(rb.name == name for rb in self.rulebases):
            raise self.error(f"duplicate rule base {name!r}", toks[1])
        self.expect(toks, 2, "inputs")
        i = 3
        inputs = []
        while i < len(toks) and toks[i] != "output":
            inputs.append(self.known_variable(toks[i]))
            i += 1
        if not inputs:
            raise self.error("a rule base needs at least one input",
                             toks[i] if i < len(toks) else None)
        if len(set(inputs)) != len(inputs):
            raise self.error("an input variable is listed twice", toks[3])
        self.expect(toks, i, "output")
        output = self.known_variable(toks[i + 1] if i + 1 < len(toks) else None)
        rest = toks[i + 2:]
        complete = bool(rest) and rest[0] == "complete"
        extra = rest[1:] if complete else rest
        if extra:
            raise self.error(f"unexpected {str(extra[0])!r}", extra[0])
        self._rb = (name, tuple(inputs), output, complete, [], self.lineno)

    def known_variable(self, tok):
        name = self.ident(tok)
        if name not in self.variables:
            raise UnknownReferenceError(
                f"line {self.lineno}, column {tok.col}: unknown variable {name!r}", name)
        return name

    def known_term(self, var, tok):
        name = self.ident(tok)
        if name not in self.variables[var].term_names:
            raise UnknownReferenceError(
                f"line {self.lineno}, column {tok.col}: unknown term {name!r} "
                f"for variable {var!r}", name)
        return name

    def clause(self, toks, i):
        """Parse ``<var> is <term>`` starting at ``toks[i]``."""
        if i + 2 >= len(toks):
            raise self.error("expected '<variable> is <term>'", toks[i] if i < len(toks) else None)
        var = self.known_variable(toks[i])
        self.expect(toks, i + 1, "is")
        term = self.known_term(var, toks[i + 2])
        return (var, term), i + 3

    def add_rule(self, toks):
        if self._rb is None:
            raise self.error("'if' outside a rulebase block", toks[0])
        name, inputs, output, _, rules, _ = self._rb
        antecedents = []
        i = 1
        while True:
            (var, term), i = self.clause(toks, i)
            if var not in inputs:
                raise UnknownReferenceError(
                    f"line {self.lineno}: {var!r} is not an input of rule base {name!r}", var)
            antecedents.append((var, term))
            if i < len(toks) and toks[i] == "and":
                i += 1
                continue
            break
        self.expect(toks, i, "then")
        consequent, i = self.clause(toks, i + 1)
        if consequent[0] != output:
            raise self.error(
                f"rule concludes {consequent[0]!r} but rule base {name!r} outputs {output!r}",
                toks[i - 3])
        if i < len(toks):
            raise self.error(f"unexpected {str(toks[i])!r}", toks[i])
        rules.append(Rule(tuple(antecedents), consequent))


def parse_config(text: str) -> FuzzyConfig:
    """Parse and validate a configuration document.

    The result unpacks as ``variables, rulebases``.
    """
    return _Parser(text).run()


def load_config(path=None) -> FuzzyConfig:
    """Read a configuration file; ``None`` loads the bundled climate rules."""
    if path is None:
        text = resources.files("fuzzy_hvac.data").joinpath(BUNDLED_CONFIG).read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return parse_config(text)


def _num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def serialize_config(cfg: FuzzyConfig) -> str:
    """Render a configuration back to text that :func:`parse_config` accepts."""
    out = []
    for var in cfg.variables:
        out.append(f"variable {var.name} range {_num(var.lo)} {_num(var.hi)}")
        for term, mf in var.terms:
            a = SHOULDER if mf.left_shoulder else _num(mf.a)
            d = SHOULDER if mf.right_shoulder else _num(mf.d)
            out.append(f"  term {term} {a} {_num(mf.b)} {_num(mf.c)} {d}")
        out.append("")
    for rb in cfg.rulebases:
        head = f"rulebase {rb.name} inputs {' '.join(rb.inputs)} output {rb.output}"
        out.append(head + (" complete" if rb.complete else ""))
        out.extend(f"  {rule}" for rule in rb.rules)
        out.append("")
    return "\n".join(out)
