from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings

from helpers import SIG, polynomials
from qframes.algebra.scalars import QI
from qframes.dsl import SourceDocument, parse, parse_expression, print_document
from qframes.dsl.lexer import tokenize
from qframes.errors import NonClosedCommutator, ParseError
from qframes.models import build_model

SAMPLES = sorted((Path(__file__).parent.parent / "samples").glob("*.qf"))


def test_tokens_carry_positions():
    toks = tokenize("pair q p;\n  constraint C = p;")
    assert [(t.text, t.line, t.col) for t in toks[:4]] == [
        ("pair", 1, 1), ("q", 1, 6), ("p", 1, 8), (";", 1, 9)]
    assert (toks[4].line, toks[4].col) == (2, 3)
    with pytest.raises(ParseError) as e:
        tokenize("pair q p;\n  $")
    assert (e.value.line, e.value.column) == (2, 3)


def test_minimal_document():
    doc = parse("pair q0 p0; pair q1 p1; constraint C = p0 + (1/2)*p1*p1;")
    sig = doc.signature
    assert [g.name for g in sig.generators] == ["q0", "p0", "q1", "p1"]
    assert doc.constraint() == sig.parse("p0 + (1/2)*p1^2")
    assert doc.positions["C"] == (1, 36)


def test_undeclared_generator_is_reported_with_position():
    with pytest.raises(ParseError) as e:
        parse("pair q0 p0; constraint C = p0 + (1/2)*p1*p1;")
    assert "p1" in str(e.value)
    assert (e.value.line, e.value.column) == (1, 39)


def test_missing_constraint_name():
    with pytest.raises(ParseError) as e:
        parse("constraint = ;")
    assert (e.value.line, e.value.column) == (1, 12)


@pytest.mark.parametrize("text,line,col", [
    ("pair q p;\npair q r;", 2, 6),
    ("pair q p;\nparam q real;", 2, 7),
    ("pair q p;\nconstraint q = p;", 2, 12),
    ("pair q p; constraint C = p; constraint C = q;", 1, 40),
    ("pair i p;", 1, 6),
    ("pair q p; invertible x;", 1, 22),
    ("pair q p; function f of x;", 1, 25),
    ("pair q p; constraint C = p +;", 1, 29),
    ("pair q p; constraint C = (p;", 1, 28),
    ("pair q p; constraint C = inv(q);", 1, 26),
    ("pair q p; state { reference: q; } state { reference: q; }", 1, 35),
    ("pair q p; task { tau: 1; tau: 2; }", 1, 26),
])
def test_errors_carry_line_and_column(text, line, col):
    with pytest.raises(ParseError) as e:
        parse(text)
    assert (e.value.line, e.value.column) == (line, col), str(e.value)


def test_non_closed_commutator_is_an_algebra_error():
    text = "hermitian g invertible;\nhermitian w invertible;\ncommutator [g, w] = h;\nhermitian h;\nconstraint C = inv(w)*inv(g);"
    with pytest.raises(NonClosedCommutator) as e:
        parse(text)
    assert e.value.line == 5


def test_clock_network_text_matches_model():
    doc = parse((Path(__file__).parent.parent / "samples" / "clock_network.qf").read_text())
    inst = build_model("clock-network", {"lambda1": "lambda1", "lambda2": "lambda2"})
    assert doc.constraint("C1").render() == inst.constraints["C1"].render()
    assert doc.task["candidates"] == ["qA", "qB", "qC"]


def test_state_section():
    doc = parse((Path(__file__).parent.parent / "samples" / "oscillator.qf").read_text())
    st = doc.state
    sig = doc.signature
    assert st.reference == "t" and st.degree == 4 and st.time == QI(0)
    assert st.means == [("q", QI(1)), ("p", QI(0))]
    q = sig.id_of("q")
    assert ((q, q), QI(Fraction(1, 2))) in [(w, v) for w, v in st.covariance]


@pytest.mark.parametrize("path", SAMPLES, ids=[p.stem for p in SAMPLES])
def test_samples_round_trip(path):
    doc = parse(path.read_text())
    text = print_document(doc)
    again = parse(text)
    assert again == doc
    assert print_document(again) == text


@settings(max_examples=100)
@given(polynomials(max_terms=4))
def test_random_constraints_round_trip(P):
    doc = SourceDocument(SIG, {"C": P})
    again = parse(print_document(doc))
    assert again.constraint("C") == P
    assert again.signature == SIG


@settings(max_examples=100)
@given(polynomials())
def test_expression_render_parse(P):
    assert parse_expression(P.render(), SIG) == P


def test_parse_is_deterministic():
    text = SAMPLES[0].read_text()
    assert print_document(parse(text)) == print_document(parse(text))
