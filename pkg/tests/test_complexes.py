import pytest

from motivica.abelian import Z, AbMorphism, FinAbGroup, GroupClass
from motivica.complexes import (
    AbComplex,
    Bicomplex,
    ChainMap,
    GradedGroup,
    GradedMorphism,
    GradedSum,
    Homotopy,
    complex_from_rows,
    cone,
    e2_page,
    euler_chi,
    find_contraction,
    homology,
    is_acyclic,
    shift,
    total,
)
from motivica.exceptions import MotivicaComplexError

Z2 = FinAbGroup(0, (2,))


def times(k: int) -> AbComplex:
    """Z --k--> Z in degree 0, columns 0 and 1"""
    return complex_from_rows([{0: Z}, {0: Z}], [{0: [[k]]}])


def test_graded_group__should_drop_zero_degrees_and_sort():
    g = GradedGroup.of({2: Z, 0: FinAbGroup(), 1: Z2})
    assert g.groups == ((1, Z2), (2, Z))
    assert str(g) == "H^1 = Z/2, H^2 = Z"


def test_graded_morphism__should_reject_components_of_the_wrong_shape():
    g = GradedGroup.of({0: Z})
    with pytest.raises(MotivicaComplexError):
        GradedMorphism.of(g, g, {0: AbMorphism.identity(Z2)})


def test_graded_sum__should_inject_and_project_each_summand():
    a, b = GradedGroup.of({0: Z, 2: Z2}), GradedGroup.of({0: Z2})
    s = GradedSum((a, b))
    assert s.group == GradedGroup.of({0: FinAbGroup(1, (2,)), 2: Z2})
    assert s.projection(1) @ s.injection(1) == GradedMorphism.identity(b)


def test_ab_complex__should_reject_differentials_that_do_not_square_to_zero():
    with pytest.raises(MotivicaComplexError):
        complex_from_rows([{0: Z}, {0: Z}, {0: Z}], [{0: [[1]]}, {0: [[1]]}])


def test_ab_complex__should_require_one_differential_less_than_columns():
    with pytest.raises(MotivicaComplexError):
        AbComplex((GradedGroup.of({0: Z}),), (GradedMorphism.identity(GradedGroup()),))


def test_homology__should_return_z2_at_the_right_of_multiplication_by_two():
    assert homology(times(2)) == {0: GradedGroup(), 1: GradedGroup.of({0: Z2})}


def test_homology__should_index_columns_by_true_index():
    c = complex_from_rows([{0: Z}, {0: Z}], [{0: [[2]]}], offset=-3)
    assert set(homology(c)) == {-3, -2}
    assert e2_page(c) == {(-2, 0): Z2}


def test_chain_map__should_reject_maps_that_do_not_commute():
    c = times(1)
    zero_then_identity = (
        GradedMorphism.zero(c.term(0), c.term(0)),
        GradedMorphism.identity(c.term(1)),
    )
    with pytest.raises(MotivicaComplexError):
        ChainMap(c, c, zero_then_identity)


def test_cone__should_be_acyclic_for_identity():
    single = AbComplex.single(GradedGroup.of({0: Z, 3: Z2}))
    c = cone(ChainMap.identity(single))
    assert (c.start, c.end) == (-1, 0)
    assert is_acyclic(c)


def test_cone__should_compute_homology_of_multiplication_map():
    single = AbComplex.single(GradedGroup.of({0: Z}))
    twice = GradedMorphism.identity(single.terms[0]).scale(2)
    double = ChainMap(single, single, (twice,))
    assert e2_page(cone(double)) == {(0, 0): Z2}


def test_shift__should_move_columns_and_flip_sign_on_odd_shift():
    c = times(3)
    shifted = shift(c, 1)
    assert (shifted.start, shifted.end) == (-1, 0)
    assert shifted.d(-1).at(0).matrix.data == ((-3,),)
    assert shift(c, 2).d(-2).at(0).matrix.data == ((3,),)


def test_total__should_sign_vertical_differential_by_column():
    # Given: a square of identities Z -> Z, Z -> Z
    g = GradedGroup.of({0: Z})
    identity = GradedMorphism.identity(g)
    b = Bicomplex(
        {(0, 0): g, (1, 0): g, (0, 1): g, (1, 1): g},
        d_h={(0, 0): identity, (0, 1): identity},
        d_v={(0, 0): identity, (1, 0): identity},
    )

    # When
    c = total(b)

    # Then
    assert (c.start, c.end) == (0, 2)
    assert c.d(0).at(0).matrix.data == ((1,), (1,))
    assert c.d(1).at(0).matrix.data == ((1, -1),)
    assert is_acyclic(c)


def test_bicomplex__should_reject_non_commuting_square():
    g = GradedGroup.of({0: Z})
    identity = GradedMorphism.identity(g)
    with pytest.raises(MotivicaComplexError):
        Bicomplex(
            {(0, 0): g, (1, 0): g, (0, 1): g, (1, 1): g},
            d_h={(0, 0): identity, (0, 1): identity},
            d_v={(0, 0): identity, (1, 0): identity.scale(2)},
        )


def test_euler_chi__should_alternate_column_group_classes():
    c = complex_from_rows([{0: Z, 1: Z2}, {0: Z}], [{0: [[2]]}])
    assert euler_chi(c) == {1: GroupClass.build(0, {(2, 1): 1})}


def difference(
    a: dict[int, GroupClass], b: dict[int, GroupClass]
) -> dict[int, GroupClass]:
    classes = {n: a.get(n, GroupClass()) - b.get(n, GroupClass()) for n in a.keys() | b}
    return {n: c for n, c in sorted(classes.items()) if not c.is_zero()}


def test_euler_chi__should_subtract_the_source_in_a_cone_of_random_maps(
    rng, random_graded_group_factory, random_graded_morphism_factory
):
    for _ in range(100):
        # Given
        column = rng.randint(-1, 2)
        a, b = random_graded_group_factory(2), random_graded_group_factory(2)
        x, y = AbComplex.single(a, column), AbComplex.single(b, column)
        f = ChainMap(x, y, (random_graded_morphism_factory(a, b),))

        # Then
        assert euler_chi(cone(f)) == difference(euler_chi(y), euler_chi(x))


def test_euler_chi__should_subtract_the_source_in_a_cone_of_a_projection(
    rng, random_graded_group_factory, random_graded_morphism_factory
):
    for _ in range(100):
        # Given: X = A --d--> B projected onto its first column A
        column = rng.randint(-1, 2)
        a, b = random_graded_group_factory(2), random_graded_group_factory(2)
        x = AbComplex((a, b), (random_graded_morphism_factory(a, b),), column)
        y = AbComplex.single(a, column)
        projection = GradedMorphism.identity(a)
        f = ChainMap(x, y, (projection, GradedMorphism.zero(b, y.term(column + 1))))

        # Then
        assert euler_chi(cone(f)) == difference(euler_chi(y), euler_chi(x))


def test_find_contraction__should_find_identity_homotopy_for_identity_complex():
    result = find_contraction(times(1))
    assert result.found
    assert result.homotopy is not None
    assert result.homotopy.at(0).at(0).matrix.data == ((1,),)


def test_find_contraction__should_report_nonzero_homology():
    result = find_contraction(times(2))
    assert not result.found
    assert result.diagnostic is not None
    assert result.diagnostic.startswith("nonzero homology Z/2")
    assert result.column == 1


def test_find_contraction__should_detect_acyclic_complex_that_is_not_contractible():
    # Given: 0 -> Z --2--> Z --> Z/2 -> 0
    c = complex_from_rows([{0: Z}, {0: Z}, {0: Z2}], [{0: [[2]]}, {0: [[1]]}])
    assert is_acyclic(c)

    # When
    result = find_contraction(c)

    # Then
    assert not result.found
    assert result.diagnostic is not None
    assert result.diagnostic.startswith("acyclic but not contractible")


def test_find_contraction__should_contract_torsion_identity():
    z4 = FinAbGroup(0, (4,))
    c = complex_from_rows([{2: z4}, {2: z4}], [{2: [[1]]}])
    assert find_contraction(c).found


def test_find_contraction__should_contract_random_contractible_complexes(
    contractible_complex_factory,
):
    for _ in range(200):
        # Given
        c = contractible_complex_factory()

        # When
        result = find_contraction(c)

        # Then
        assert result.found, result.diagnostic
        assert isinstance(result.homotopy, Homotopy)
        assert euler_chi(c) == {}


def test_homotopy__should_reject_maps_that_do_not_contract():
    c = times(1)
    with pytest.raises(MotivicaComplexError):
        Homotopy(c, (GradedMorphism.zero(c.term(1), c.term(0)),))
