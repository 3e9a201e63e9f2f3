import pytest

from motivica.exceptions import MotivicaParserError
from motivica.expressions import (
    Atom,
    Complement,
    affine,
    atom,
    complement,
    parse_expression,
    point,
)


def test_parse_expression__should_build_nested_nodes():
    # Given
    obj = {
        "kind": "complement",
        "ambient": {"kind": "affine", "n": 1},
        "closed": {"kind": "point"},
    }

    # When
    e = parse_expression(obj)

    # Then
    assert isinstance(e, Complement)
    assert e == complement(affine(1), point())


def test_parse_expression__should_strip_whitespace_around_atom_names():
    e = parse_expression({"kind": "atom", "name": " K3 "})
    assert isinstance(e, Atom)
    assert e.name == "K3"


@pytest.mark.parametrize(
    "obj",
    [
        {"kind": "torus"},
        {"kind": "affine"},
        {"kind": "affine", "n": -1},
        {"kind": "atom", "name": "L"},
        {"kind": "atom", "name": "2fold"},
        {"kind": "point", "color": "red"},
        {"kind": "product", "factors": []},
        {"kind": "proj_bundle", "base": {"kind": "point"}, "rank": 0},
        [],
    ],
)
def test_parse_expression__should_raise_parser_error_on_invalid_input(obj):
    with pytest.raises(MotivicaParserError):
        parse_expression(obj, origin="test input")


def test_parse_expression__should_mention_origin_in_error():
    with pytest.raises(MotivicaParserError, match="Failed to parse variety in x.json"):
        parse_expression({"kind": "torus"}, origin="variety in x.json")


def test_atom__should_keep_optional_dimension():
    assert atom("X", 3).dimension == 3
    assert atom("X").dimension is None
