import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzy_hvac.config import load_config, parse_config, serialize_config
from fuzzy_hvac.errors import ConfigError, ConfigSyntaxError, UnknownReferenceError

SMALL = """\
variable t range 0 10
  term cold shoulder 0 3 5
  term warm 3 5 10 shoulder   # right shoulder
variable a range 0 1
  term off 0 0 0.5 1
  term on 0 0.5 1 1
rulebase r inputs t output a complete
  if t is cold then a is on
  if t is warm then a is off
"""


def test_bundled_config():
    variables, rulebases = load_config()
    assert [v.name for v in variables] == ["humidity", "outdoor", "apparent", "indoor", "action"]
    assert [len(v.terms) for v in variables] == [5, 7, 7, 7, 5]
    assert {rb.name: len(rb.rules) for rb in rulebases} == {"apparent_temperature": 35, "action": 49}
    assert all(rb.complete for rb in rulebases)


def test_temperature_variables_share_terms():
    cfg = load_config()
    outdoor = cfg.variable("outdoor")
    assert cfg.variable("apparent").terms == outdoor.terms == cfg.variable("indoor").terms


def test_small_config():
    cfg = parse_config(SMALL)
    t = cfg.variable("t")
    assert t.term("cold").left_shoulder and t.term("warm").right_shoulder
    assert t.term("warm").d == 10
    assert str(cfg.rulebase("r").rules[0]) == "if t is cold then a is on"


@pytest.mark.parametrize("text, match", [
    ("", "no variables declared"),
    ("# only a comment\n\n", "no variables declared"),
])
def test_empty(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(text)


def test_unknown_term():
    text = SMALL.replace("if t is cold", "if t is medium")
    with pytest.raises(UnknownReferenceError, match="medium") as info:
        parse_config(text)
    assert info.value.name == "medium"


def test_unknown_variable():
    with pytest.raises(UnknownReferenceError, match="'x'"):
        parse_config(SMALL.replace("inputs t output", "inputs x output"))


def test_syntax_error_position():
    text = SMALL.replace("term warm 3 5", "term warm 3 five")
    with pytest.raises(ConfigSyntaxError) as info:
        parse_config(text)
    assert (info.value.line, info.value.column) == (3, 15)


def test_unknown_keyword():
    with pytest.raises(ConfigSyntaxError, match="unknown keyword") as info:
        parse_config("varible t range 0 1\n")
    assert info.value.line == 1


def test_universe_violation():
    with pytest.raises(ConfigError, match="outside the universe"):
        parse_config(SMALL.replace("term warm 3 5 10 shoulder", "term warm 3 5 12 shoulder"))


def test_duplicate_term():
    with pytest.raises(ConfigError, match="duplicate term"):
        parse_config(SMALL.replace("term warm", "term cold"))


def test_incomplete_rulebase():
    text = SMALL.replace("  if t is warm then a is off\n", "")
    with pytest.raises(ConfigError, match="1 of 2"):
        parse_config(text)
    # Same rules without the completeness claim are fine.
    parse_config(text.replace(" complete", ""))


def test_rule_must_conclude_output():
    with pytest.raises(ConfigError, match="outputs 'a'"):
        parse_config(SMALL.replace("then a is off", "then t is cold"))


def test_term_outside_variable():
    with pytest.raises(ConfigSyntaxError, match="outside a variable"):
        parse_config("term x 0 1 2 3\n")


def test_round_trip_bundled():
    cfg = load_config()
    text = serialize_config(cfg)
    assert parse_config(text) == cfg
    assert serialize_config(parse_config(text)) == text


@st.composite
def configs(draw):
    n_terms = draw(st.integers(1, 5))
    lo = draw(st.integers(-50, 50))
    width = draw(st.integers(10, 100))
    hi = lo + width
    # Evenly overlapping triangles with shoulders at both ends always cover.
    step = width / (n_terms + 1)
    lines = [f"variable x range {lo} {hi}"]
    names = [f"t{i}" for i in range(n_terms)]
    for i, name in enumerate(names):
        a = "shoulder" if i == 0 else repr(lo + i * step)
        d = "shoulder" if i == n_terms - 1 else repr(lo + (i + 2) * step)
        b = lo if i == 0 else lo + (i + 1) * step
        c = hi if i == n_terms - 1 else lo + (i + 1) * step
        lines.append(f"  term {name} {a} {b!r} {c!r} {d}")
    lines.append("variable y range 0 1")
    lines.append("  term only shoulder 0 1 shoulder")
    lines.append("rulebase r inputs x output y")
    for name in draw(st.lists(st.sampled_from(names), min_size=1)):
        lines.append(f"  if x is {name} then y is only")
    return "\n".join(lines)


@settings(max_examples=50)
@given(configs())
def test_round_trip_generated(text):
    cfg = parse_config(text)
    assert parse_config(serialize_config(cfg)) == cfg
