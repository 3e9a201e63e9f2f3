import pytest

from motivica.abelian import FinAbGroup
from motivica.blowup import check_blowup_exactness
from motivica.complexes import find_contraction
from motivica.demos import cstar
from motivica.exceptions import (
    MotivicaAtlasError,
    MotivicaBlowupError,
    MotivicaComplexError,
    MotivicaParserError,
)
from motivica.motives import MotiveClass, class_of, euler_char, u, v, virtual_hodge
from motivica.parser import (
    load_atlas,
    load_chow_data,
    load_complex,
    load_presentation,
    load_variety,
    read_json,
)
from motivica.weights import weight_table

CSTAR = {
    "kind": "complement",
    "ambient": {"kind": "proj", "n": 1},
    "closed": {"kind": "disjoint_union", "parts": [{"kind": "point"}, {"kind": "point"}]},
}

QUINTIC = {
    "name": "Quintic",
    "dimension": 3,
    "cohomology": {
        "0": {"rank": 1},
        "2": {"rank": 1},
        "3": {"rank": 204},
        "4": {"rank": 1},
        "6": {"rank": 1},
    },
    "hodge": [
        [0, 0, 1],
        [1, 1, 1],
        [2, 2, 1],
        [3, 3, 1],
        [3, 0, 1],
        [0, 3, 1],
        [2, 1, 101],
        [1, 2, 101],
    ],
}

CSTAR_PRESENTATION = {
    "dimension": 1,
    "columns": [["P1"], ["pt", "pt"]],
    "entries": [
        {"column": 0, "from": 0, "to": 0, "sign": -1},
        {"column": 0, "from": 0, "to": 1, "sign": -1},
    ],
}

POINT_LEVEL = {
    "p": 0,
    "x": ["pt"],
    "y": ["pt"],
    "x_blown": ["pt"],
    "y_blown": ["pt"],
    "f": [[1]],
    "g": [[1]],
    "i": [[1]],
    "j": [[1]],
}


def test_read_json__should_report_the_position_of_a_syntax_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"kind": "point",\n}', encoding="utf-8")
    with pytest.raises(MotivicaParserError, match="at line 2, column 1"):
        read_json(path)


def test_read_json__should_fail_when_file_does_not_exist(tmp_path):
    with pytest.raises(MotivicaParserError, match="File not found"):
        read_json(tmp_path / "missing.json")


def test_read_json__should_fail_when_path_is_a_directory(tmp_path):
    with pytest.raises(MotivicaParserError, match="Path points to a directory"):
        read_json(tmp_path)


def test_read_json__should_fail_when_file_is_not_utf8(tmp_path):
    path = tmp_path / "latin1.json"
    path.write_bytes(b'{"kind": "\xe9"}')
    with pytest.raises(MotivicaParserError, match="not valid UTF-8"):
        read_json(path)


def test_load_variety__should_parse_a_nested_expression(write_json):
    expression = load_variety(write_json("cstar.json", CSTAR))
    assert str(class_of(expression)) == "L - 1"


@pytest.mark.parametrize(
    "content",
    [
        {"kind": "torus"},
        {"kind": "proj", "n": -1},
        {"kind": "point", "extra": 1},
        {"kind": "blowup", "ambient": {"kind": "proj", "n": 2}, "codim": 2},
        {"kind": "atom", "name": "L"},
    ],
)
def test_load_variety__should_raise_parser_error_on_invalid_expressions(
    write_json, content
):
    with pytest.raises(MotivicaParserError, match="Failed to parse variety in"):
        load_variety(write_json("variety.json", content))


def test_load_atlas__should_extend_the_builtin_atlas(write_json):
    # Given
    path = write_json("atoms.json", {"atoms": [QUINTIC]})

    # When
    atlas = load_atlas([path])

    # Then
    assert atlas.dimension("Quintic") == 3
    assert atlas.has("K3")
    quintic = MotiveClass.atom("Quintic")
    assert euler_char(quintic, atlas) == -200
    assert virtual_hodge(quintic, atlas).as_expr().subs({u: 1, v: 1}) == 208


def test_load_atlas__should_reject_atoms_with_a_wrong_top_degree(write_json):
    surface = {"name": "Broken", "dimension": 2, "cohomology": {"0": {"rank": 1}}}
    path = write_json("atoms.json", {"atoms": [surface]})
    with pytest.raises(MotivicaAtlasError, match="Atom Broken: H\\^4 must be Z"):
        load_atlas([path])


def test_load_atlas__should_reject_asymmetric_hodge_numbers(write_json):
    quintic = {**QUINTIC, "hodge": [h for h in QUINTIC["hodge"] if h != [1, 2, 101]]}
    path = write_json("atoms.json", {"atoms": [quintic]})
    with pytest.raises(MotivicaAtlasError, match="differs from"):
        load_atlas([path])


def test_load_atlas__should_reject_torsion_orders_below_two(write_json):
    broken = {**QUINTIC, "cohomology": {**QUINTIC["cohomology"], "5": {"torsion": [1]}}}
    path = write_json("atoms.json", {"atoms": [broken]})
    with pytest.raises(MotivicaParserError, match="at least 2"):
        load_atlas([path])


def test_load_atlas__should_load_named_maps_against_declared_atoms(write_json):
    # Given
    double = {"name": "double", "source": "P1", "target": "P1", "degrees": {"2": [[2]]}}
    path = write_json("atoms.json", {"maps": [double]})

    # When
    atlas = load_atlas([path])

    # Then
    assert atlas.resolve_map("double", "P1", "P1").at(2).matrix.data == ((2,),)


def test_load_presentation__should_match_the_builtin_cstar(write_json):
    # When
    presentation, _ = load_presentation(write_json("cstar.json", CSTAR_PRESENTATION))

    # Then
    assert weight_table(presentation) == weight_table(cstar())


def test_load_presentation__should_accept_products_and_declared_atoms(write_json):
    content = {
        "dimension": 4,
        "columns": [[["Elliptic", "Quintic"]]],
        "atoms": [QUINTIC],
    }
    presentation, atlas = load_presentation(write_json("product.json", content))
    table = weight_table(presentation, atlas=atlas)
    # H^0 x H^3 plus H^1 x H^2
    assert table.at(0, 3) == FinAbGroup(204 + 2)


def test_load_presentation__should_reject_unknown_fields(write_json):
    content = {**CSTAR_PRESENTATION, "columns": [["P1"]], "weights": []}
    with pytest.raises(MotivicaParserError, match="Failed to parse presentation in"):
        load_presentation(write_json("presentation.json", content))


def test_load_presentation__should_reject_empty_slots(write_json):
    content = {"dimension": 0, "columns": [[[]]]}
    with pytest.raises(MotivicaParserError, match="at least one atom"):
        load_presentation(write_json("presentation.json", content))


def test_load_chow_data__should_load_an_exact_level(write_json):
    path = write_json("chow.json", {"codim": 2, "pushforwards": [POINT_LEVEL]})
    data = load_chow_data(path)
    assert data.name == "blow-up"
    assert [verdict.exact for verdict in check_blowup_exactness(data)] == [True]


def test_load_chow_data__should_default_missing_matrices_to_zero(write_json):
    level = {"p": 2, "x": ["X"], "x_blown": ["X'"], "f": [[1]]}
    path = write_json("chow.json", {"codim": 2, "pushforwards": [level]})
    data = load_chow_data(path)
    assert data.pushforwards[0].maps.i.shape == (1, 0)
    assert check_blowup_exactness(data)[0].exact


def test_load_chow_data__should_report_the_matrix_with_the_wrong_shape(write_json):
    level = {**POINT_LEVEL, "g": [[1], [0]]}
    path = write_json("chow.json", {"codim": 2, "pushforwards": [level]})
    match = r"pushforward g at p = 0 has shape \(2, 1\)"
    with pytest.raises(MotivicaParserError, match=match):
        load_chow_data(path)


def test_load_chow_data__should_reject_squares_that_do_not_commute(write_json):
    level = {**POINT_LEVEL, "f": [[3]]}
    path = write_json("chow.json", {"codim": 2, "pullbacks": [level]})
    with pytest.raises(MotivicaBlowupError, match="does not commute"):
        load_chow_data(path)


def test_load_complex__should_load_a_contractible_complex(write_json):
    content = {
        "offset": -1,
        "columns": [{"0": {"rank": 1}}, {"0": {"rank": 1}}],
        "differentials": [{"0": [[-1]]}],
    }
    complex_ = load_complex(write_json("complex.json", content))
    assert complex_.start == -1
    assert find_contraction(complex_).found


def test_load_complex__should_leave_torsion_homology_uncontracted(write_json):
    content = {
        "columns": [{"0": {"rank": 1}}, {"0": {"rank": 1}}],
        "differentials": [{"0": [[2]]}],
    }
    result = find_contraction(load_complex(write_json("complex.json", content)))
    assert result.diagnostic == "nonzero homology Z/2 at column 1 in degree 0"


def test_load_complex__should_reject_differentials_that_do_not_square_to_zero(write_json):
    content = {
        "columns": [{"0": {"rank": 1}}] * 3,
        "differentials": [{"0": [[1]]}, {"0": [[1]]}],
    }
    with pytest.raises(MotivicaComplexError, match="Invalid complex in"):
        load_complex(write_json("complex.json", content))


def test_load_complex__should_treat_missing_degrees_as_zero_groups(write_json):
    content = {"columns": [{"2": {"torsion": [2]}}]}
    complex_ = load_complex(write_json("complex.json", content))
    assert complex_.term(0).at(2) == FinAbGroup(0, (2,))
    assert complex_.term(0).at(0) == FinAbGroup()
