import pytest

from motivica.abelian import Z, AbMorphism, FinAbGroup
from motivica.atlas import (
    Atlas,
    AtomRecord,
    NamedMap,
    builtin_atlas,
    curve,
    projective_space,
)
from motivica.complexes import GradedGroup, GradedMorphism
from motivica.exceptions import MotivicaAtlasError


def test_builtin_atlas__should_know_k3_and_enriques(atlas):
    assert atlas.cohomology("K3").betti() == {0: 1, 2: 22, 4: 1}
    assert atlas.cohomology("Enriques").at(3) == FinAbGroup(0, (2,))
    assert atlas.atom("Enriques").hodge_numbers()[(1, 1)] == 10


def test_atom__should_synthesize_projective_spaces_and_curves(atlas):
    assert atlas.dimension("P7") == 7
    assert atlas.atom("pt").dimension == 0
    assert atlas.cohomology("Curve3").betti() == {0: 1, 1: 6, 2: 1}


def test_atom__should_raise_on_unknown_atom(atlas):
    with pytest.raises(MotivicaAtlasError, match="Unknown atom: Torus"):
        atlas.atom("Torus")
    assert not atlas.has("Torus")


def test_atom_record__should_reject_hodge_numbers_that_miss_betti_numbers():
    with pytest.raises(MotivicaAtlasError):
        AtomRecord(
            name="Broken",
            dimension=1,
            cohomology=GradedGroup.free({0: 1, 1: 2, 2: 1}),
            hodge=(((0, 0), 1), ((1, 1), 1)),
        )


def test_atom_record__should_reject_missing_top_class():
    with pytest.raises(MotivicaAtlasError, match="H\\^4 must be Z"):
        AtomRecord("Broken", 2, GradedGroup.free({0: 1, 2: 1}))


def test_resolve_map__should_restrict_projective_spaces(atlas):
    f = atlas.resolve_map("res", "P2", "P1")
    assert f.source == atlas.cohomology("P2")
    assert f.at(0).matrix.data == ((1,),)
    assert f.at(2).matrix.data == ((1,),)
    assert f.at(4).is_zero()


def test_resolve_map__should_send_point_class_to_every_component(atlas):
    record = AtomRecord("TwoPoints", 0, GradedGroup.free({0: 2}), components=2)
    extended = atlas.extend(records=[record])
    f = extended.resolve_map("const", "pt", "TwoPoints")
    assert f.at(0).matrix.data == ((1,), (1,))


def test_resolve_map__should_refuse_identity_between_different_atoms(atlas):
    with pytest.raises(MotivicaAtlasError):
        atlas.resolve_map("id", "P1", "P2")


def test_resolve_map__should_refuse_unknown_restriction(atlas):
    with pytest.raises(MotivicaAtlasError, match="No restriction rule"):
        atlas.resolve_map("res", "K3", "Elliptic")


def double_pullback(atlas: Atlas, name: str = "double") -> NamedMap:
    source, target = atlas.cohomology("P1"), atlas.cohomology("P1")
    morphism = GradedMorphism.of(
        source, target, {0: AbMorphism.identity(Z), 2: AbMorphism.from_rows(Z, Z, [[2]])}
    )
    return NamedMap(name, "P1", "P1", morphism)


def test_extend__should_accept_the_same_map_twice(atlas):
    named_map = double_pullback(atlas)
    extended = atlas.extend(maps=[named_map]).extend(maps=[named_map])
    assert extended.resolve_map("double", "P1", "P1") == named_map.morphism


def test_extend__should_reject_two_different_maps_with_one_name(atlas):
    extended = atlas.extend(maps=[double_pullback(atlas)])
    identity = GradedMorphism.identity(atlas.cohomology("pt"))
    other = NamedMap("double", "pt", "pt", identity)
    with pytest.raises(MotivicaAtlasError, match="defined twice"):
        extended.extend(maps=[other])


def test_extend__should_reject_reserved_map_names(atlas):
    with pytest.raises(MotivicaAtlasError):
        atlas.extend(maps=[double_pullback(atlas, "res")])


def test_resolve_map__should_check_map_endpoints(atlas):
    extended = atlas.extend(maps=[double_pullback(atlas)])
    with pytest.raises(MotivicaAtlasError, match="goes from P1 to P1"):
        extended.resolve_map("double", "P2", "P1")


def test_extend__should_not_modify_the_builtin_atlas(atlas):
    atlas.extend(records=[curve(5, "Quintic")])
    assert not builtin_atlas().has("Quintic")
    assert atlas.extend(records=[curve(5, "Quintic")]).dimension("Quintic") == 1


@pytest.mark.parametrize("name", ["K3", "P5", "Curve2"])
def test_extend__should_reject_atoms_that_redefine_known_names(atlas, name):
    # Given
    record = AtomRecord(name, 2, GradedGroup.free({0: 1, 2: 2, 4: 1}))

    # Then
    with pytest.raises(MotivicaAtlasError, match=f"Atom {name} is already defined"):
        atlas.extend(records=[record])


def test_extend__should_reject_two_different_atoms_with_one_name(atlas):
    with pytest.raises(MotivicaAtlasError, match="Atom Quintic is already defined"):
        atlas.extend(records=[curve(5, "Quintic"), curve(4, "Quintic")])


def test_extend__should_accept_an_atom_identical_to_a_known_one(atlas):
    # When
    known = [atlas.atom("K3"), projective_space(5), curve(2)]
    extended = atlas.extend(records=known + [curve(5, "Quintic")])
    twice = extended.extend(records=[curve(5, "Quintic")])

    # Then
    assert twice.atom("K3") == atlas.atom("K3")
    assert twice.dimension("Quintic") == 1
    assert twice.names() == sorted(atlas.names() + ["Quintic"])
