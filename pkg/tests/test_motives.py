from fractions import Fraction

import pytest
from sympy import expand

from motivica.abelian import GroupClass
from motivica.exceptions import MotivicaExpressionError, MotivicaParserError
from motivica.expressions import (
    affine,
    atom,
    blowup,
    complement,
    cone,
    disjoint_union,
    empty,
    fibration,
    point,
    proj,
    proj_bundle,
    product,
)
from motivica.formatter import format_polynomial
from motivica.motives import (
    MotiveClass,
    class_of,
    dimension,
    euler_char,
    t,
    torsion_orders,
    u,
    v,
    virtual_betti,
    virtual_group_classes,
    virtual_hodge,
    virtual_poincare,
)

ATLAS_ATOMS = ["Elliptic", "AbelianSurface", "K3", "Enriques", "P1", "P3", "pt"]

L = MotiveClass.tate()


@pytest.mark.parametrize("n", range(7))
def test_class_of__should_return_tate_power_for_affine_space(n):
    assert class_of(affine(n)) == L**n


@pytest.mark.parametrize("n", range(7))
def test_class_of__should_return_geometric_sum_for_projective_space(n):
    expected = MotiveClass.zero()
    for i in range(n + 1):
        expected = expected + L**i
    assert class_of(proj(n)) == expected


@pytest.mark.parametrize("name", ATLAS_ATOMS)
def test_class_of__should_apply_cone_formula_to_every_atom(name):
    y = MotiveClass.atom(name)
    assert class_of(cone(atom(name))) == MotiveClass.one() + y * L - y


def test_class_of__should_print_cstar_as_l_minus_1():
    assert str(class_of(complement(affine(1), point()))) == "L - 1"


def test_class_of__should_apply_blowup_formula():
    # P2 blown up at a point is P2 + L
    assert class_of(blowup(proj(2), point(), 2)) == class_of(proj(2)) + L


def test_class_of__should_raise_when_closed_part_is_bigger_than_ambient():
    with pytest.raises(MotivicaExpressionError):
        class_of(complement(point(), proj(2)))


def test_class_of__should_raise_when_blowup_codimension_is_wrong():
    with pytest.raises(MotivicaExpressionError):
        class_of(blowup(proj(3), point(), 2))


def test_dimension__should_treat_empty_variety_as_none():
    assert dimension(empty()) is None
    assert dimension(product(empty(), proj(2))) is None
    assert dimension(disjoint_union(empty(), affine(3))) == 3
    assert dimension(proj_bundle(atom("K3"), 3)) == 4


def test_dimension__should_reject_atom_declared_with_wrong_dimension():
    with pytest.raises(MotivicaExpressionError):
        dimension(atom("K3", 3))


@pytest.mark.parametrize(
    "text",
    ["L - 1", "K3*L^2 - 16*L + 1", "0", "-16*Enriques*L + Enriques*K3", "-L^3"],
)
def test_parse__should_read_back_printed_classes(text):
    c = MotiveClass.parse(text)
    assert str(c) == text
    assert MotiveClass.parse(str(c)) == c


@pytest.mark.parametrize(
    "text,expression",
    [
        ("P1", proj(1)),
        ("P2 - P1", affine(2)),
        ("pt", point()),
        ("P1*K3", product(proj(1), atom("K3"))),
    ],
)
def test_parse__should_normalize_atom_names_like_class_of(text, expression):
    assert MotiveClass.parse(text) == class_of(expression)


@pytest.mark.parametrize("text", ["L -", "L/2", "L^"])
def test_parse__should_raise_parser_error(text):
    with pytest.raises(MotivicaParserError):
        MotiveClass.parse(text)


def test_virtual_poincare__should_print_p2_polynomial():
    assert format_polynomial(virtual_poincare(class_of(proj(2)))) == "1 + t^2 + t^4"


def test_virtual_hodge__should_return_k3_diamond():
    hodge = virtual_hodge(MotiveClass.atom("K3"))
    expected = 1 + u**2 + 20 * u * v + v**2 + u**2 * v**2
    assert expand(hodge.as_expr() - expected) == 0


def test_virtual_betti__should_drop_cancelled_degrees():
    assert virtual_betti(MotiveClass.parse("K3 - 16*L")) == {0: 1, 2: 6, 4: 1}


def test_euler_char__should_return_24_for_k3():
    assert euler_char(MotiveClass.atom("K3")) == 24


def test_virtual_group_classes__should_see_enriques_torsion():
    classes = virtual_group_classes(MotiveClass.atom("Enriques"))
    assert classes[3] == GroupClass.build(0, {(2, 1): 1})
    orders = torsion_orders(MotiveClass.atom("Enriques"))
    assert orders == {2: Fraction(2), 3: Fraction(2)}


def test_virtual_group_classes__should_apply_kunneth_to_products():
    square = MotiveClass.atom("Enriques") ** 2
    classes = virtual_group_classes(square)
    # H^3 holds Z/2 (x) Z twice and Tor(Z/2, Z/2) from the two H^2 factors
    assert classes[3] == GroupClass.build(0, {(2, 1): 3})


def test_virtual_poincare__should_satisfy_scissor_and_product_rules(
    expression_factory,
):
    for _ in range(500):
        # Given
        a, b = expression_factory(2), expression_factory(2)
        pa, pb = virtual_poincare(class_of(a)), virtual_poincare(class_of(b))
        c, d = disjoint_union(a, point()), disjoint_union(b, point())

        # Then
        assert virtual_poincare(class_of(product(a, b))) == pa * pb
        assert virtual_poincare(class_of(fibration(a, b))) == pa * pb
        assert virtual_poincare(class_of(disjoint_union(a, b))) == pa + pb
        assert virtual_poincare(class_of(complement(c, point()))) == pa
        union = disjoint_union(complement(c, point()), complement(d, point()), point())
        assert class_of(union) == class_of(c) + class_of(d) - MotiveClass.one()
        assert virtual_poincare(class_of(union)) == pa + pb + 1


def test_invariants__should_specialize_consistently(expression_factory):
    for _ in range(500):
        # Given
        c = class_of(expression_factory())

        # When
        poincare = virtual_poincare(c).as_expr()
        hodge = virtual_hodge(c).as_expr()

        # Then
        assert expand(hodge.subs({u: t, v: t}) - poincare) == 0
        assert poincare.subs(t, -1) == euler_char(c)
        assert sum(virtual_betti(c).values()) == poincare.subs(t, 1)
