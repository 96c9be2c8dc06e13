from __future__ import annotations

import pytest
from helpers import same_table, structures
from hypothesis import given

from loopoids.constructors import TransversalData, pair_groupoid, phi_projection
from loopoids.lpd import (
    LpdSemanticError,
    LpdSyntaxError,
    format_structure,
    format_transversal,
    parse,
    parse_transversal,
)

MINIMAL = """\
# the one-point group
elements 1
triples
0 0 0
end
"""


def test_minimal_document_infers_maps():
    G = parse(MINIMAL)
    assert G.n == 1 and G.units == {0} and G.alpha == (0,) and G.triples == {(0, 0, 0)}
    assert format_structure(G) == "elements 1\nunits 0\nalpha 0:0\nbeta 0:0\ntriples\n0 0 0\nend\n"


def test_labels_round_trip_and_defaults_are_omitted():
    G = pair_groupoid(2)
    text = format_structure(G)
    assert text.splitlines()[1].startswith("labels (0,0)")
    assert "labels" not in format_structure(G.replace(labels=()))


@given(structures(max_n=5, extra=10))
def test_round_trip(G):
    text = format_structure(G)
    back = parse(text)
    assert same_table(back, G)
    assert format_structure(back) == text


def test_explicit_units_allow_isolated_units():
    text = "elements 2\nunits 0 1\nalpha 0:0 1:1\nbeta 0:0 1:1\ntriples\n0 0 0\n1 1 1\nend\n"
    assert parse(text).units == {0, 1}


@pytest.mark.parametrize(
    "text, error, line, col",
    [
        ("triples\nend\n", LpdSyntaxError, 1, 1),
        ("elements 1\nfoo 1\ntriples\n0 0 0\nend\n", LpdSyntaxError, 2, 1),
        ("elements 1\ntriples\n0 0\nend\n", LpdSyntaxError, 3, 1),
        ("elements 1\ntriples\n0 0 x\nend\n", LpdSyntaxError, 3, 5),
        ("elements 1\ntriples\n0 0 0\n", LpdSyntaxError, 3, 1),
        ("elements 1\ntriples\n0 0 0\nend\n0 0 0\n", LpdSyntaxError, 5, 1),
        ("elements 1\nelements 1\ntriples\nend\n", LpdSyntaxError, 2, 1),
        ("elements 1\nalpha 00\ntriples\n0 0 0\nend\n", LpdSyntaxError, 2, 7),
        ("elements 1\ntriples\n0 0 1\nend\n", LpdSemanticError, 3, 5),
        ("elements 1\ntriples\n0 0 0\n0 0 0\nend\n", LpdSemanticError, 4, 1),
        ("elements 2\nlabels a\ntriples\nend\n", LpdSemanticError, 2, 1),
        ("elements 2\nlabels a a\ntriples\nend\n", LpdSemanticError, 2, 1),
        ("elements 2\nalpha 0:0\nbeta 0:0 1:0\ntriples\nend\n", LpdSemanticError, 2, 1),
        ("elements 2\ntriples\n0 0 0\nend\n", LpdSemanticError, 2, 1),
        ("elements 0\ntriples\nend\n", LpdSemanticError, 1, 10),
    ],
)
def test_diagnostics(text, error, line, col):
    with pytest.raises(error) as info:
        parse(text)
    assert (info.value.line, info.value.col) == (line, col)
    assert str(info.value).startswith(f"line {line}, col {col}: ")


def test_transversal_round_trip():
    T = phi_projection(5, (0, 1, 3, 2, 4))
    text = format_transversal(T)
    assert parse_transversal(text, 625) == T
    assert parse_transversal(text) == T


@pytest.mark.parametrize(
    "text",
    [
        "subset 0\nend\n",
        "subset 0 1\nprojection 0:0 1:0\nend\n",
        "subset 0\nprojection 0:1 1:1\nend\n",
        "subset 0\nprojection 0-0\nend\n",
        "subset 0\nsubset 0\nprojection 0:0\nend\n",
        "bogus\n",
    ],
)
def test_bad_transversals(text):
    with pytest.raises((LpdSyntaxError, LpdSemanticError)):
        parse_transversal(text, 2)


def test_identity_transversal_text():
    assert format_transversal(TransversalData.identity(2)) == "subset 0 1\nprojection 0:0 1:1\nend\n"
