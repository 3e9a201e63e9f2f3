import json
import random
from math import gcd
from pathlib import Path
from typing import Any, Callable

import pytest

from motivica.abelian import AbMorphism, FinAbGroup
from motivica.atlas import Atlas, builtin_atlas
from motivica.complexes import (
    AbComplex,
    ChainMap,
    GradedGroup,
    GradedMorphism,
    GradedSum,
    cone,
    graded_block_morphism,
)
from motivica.expressions import (
    VarietyExpr,
    affine,
    atom,
    blowup,
    disjoint_union,
    fibration,
    point,
    proj,
    proj_bundle,
    product,
)
from motivica.expressions import complement as complement_expr
from motivica.expressions import cone as cone_expr
from motivica.linalg import IntMatrix
from motivica.motives import dimension

SMALL_ORDERS = [0, 0, 2, 3, 4, 6, 8, 9, 12]
ATOMS = ["Elliptic", "AbelianSurface", "K3", "Enriques", "Curve2"]


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


@pytest.fixture
def atlas() -> Atlas:
    return builtin_atlas()


@pytest.fixture
def write_json(tmp_path) -> Callable[[str, Any], Path]:
    def _write_json(name: str, content: Any) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(content), encoding="utf-8")
        return path

    return _write_json


def random_group(rng: random.Random, max_generators: int = 3) -> FinAbGroup:
    orders = [rng.choice(SMALL_ORDERS) for _ in range(rng.randint(0, max_generators))]
    return FinAbGroup.from_orders(orders)


def random_graded_group(rng: random.Random, max_degree: int = 3) -> GradedGroup:
    return GradedGroup.of({n: random_group(rng) for n in range(max_degree + 1)})


def _random_image(rng: random.Random, source_order: int, target_order: int) -> int:
    """Coordinate of a generator image, killed by the order of the generator"""
    if target_order == 0:
        return rng.randint(-3, 3) if source_order == 0 else 0
    if source_order == 0:
        return rng.randrange(target_order)
    common = gcd(source_order, target_order)
    return target_order // common * rng.randrange(common)


def random_morphism(
    rng: random.Random, source: FinAbGroup, target: FinAbGroup
) -> AbMorphism:
    columns = [
        [_random_image(rng, d, o) for o in target.orders] for d in source.orders
    ]
    return AbMorphism(source, target, IntMatrix.from_columns(columns, target.ngens))


def random_graded_morphism(
    rng: random.Random, source: GradedGroup, target: GradedGroup
) -> GradedMorphism:
    degrees = set(source.degrees()) | set(target.degrees())
    return GradedMorphism.of(
        source,
        target,
        {n: random_morphism(rng, source.at(n), target.at(n)) for n in degrees},
    )


@pytest.fixture
def random_morphism_factory(rng) -> Callable[[FinAbGroup, FinAbGroup], AbMorphism]:
    def _random_morphism_factory(source: FinAbGroup, target: FinAbGroup) -> AbMorphism:
        return random_morphism(rng, source, target)

    return _random_morphism_factory


@pytest.fixture
def random_graded_morphism_factory(
    rng,
) -> Callable[[GradedGroup, GradedGroup], GradedMorphism]:
    def _random_graded_morphism_factory(
        source: GradedGroup, target: GradedGroup
    ) -> GradedMorphism:
        return random_graded_morphism(rng, source, target)

    return _random_graded_morphism_factory


@pytest.fixture
def random_graded_group_factory(rng) -> Callable[..., GradedGroup]:
    def _random_graded_group_factory(max_degree: int = 3) -> GradedGroup:
        return random_graded_group(rng, max_degree)

    return _random_graded_group_factory


def direct_sum_complex(complexes: list[AbComplex]) -> AbComplex:
    start = min(c.start for c in complexes)
    end = max(c.end for c in complexes)
    sums = [GradedSum(tuple(c.term(i) for c in complexes)) for i in range(start, end + 1)]
    differentials = []
    for k in range(len(sums) - 1):
        blocks = {(j, j): c.d(start + k) for j, c in enumerate(complexes)}
        differentials.append(graded_block_morphism(sums[k], sums[k + 1], blocks))
    return AbComplex(tuple(s.group for s in sums), tuple(differentials), start)


@pytest.fixture
def contractible_complex_factory(rng) -> Callable[[], AbComplex]:
    """Direct sums of cones of identities, at random offsets"""

    def _contractible_complex_factory() -> AbComplex:
        pieces = []
        for _ in range(rng.randint(1, 3)):
            single = AbComplex.single(random_graded_group(rng, 2), rng.randint(-1, 2))
            pieces.append(cone(ChainMap.identity(single)))
        return direct_sum_complex(pieces)

    return _contractible_complex_factory


def _random_leaf(rng: random.Random) -> VarietyExpr:
    choice = rng.randrange(4)
    if choice == 0:
        return point()
    if choice == 1:
        return affine(rng.randint(0, 3))
    if choice == 2:
        return proj(rng.randint(0, 3))
    return atom(rng.choice(ATOMS))


def random_expression(rng: random.Random, depth: int = 3) -> VarietyExpr:
    if depth == 0 or rng.random() < 0.3:
        return _random_leaf(rng)
    choice = rng.randrange(7)
    a = random_expression(rng, depth - 1)
    if choice == 0:
        return disjoint_union(a, random_expression(rng, depth - 1))
    if choice == 1:
        return product(a, random_expression(rng, depth - 1))
    if choice == 2:
        return fibration(a, random_expression(rng, depth - 1))
    if choice == 3:
        return proj_bundle(a, rng.randint(1, 3))
    if choice == 4:
        return cone_expr(a)
    da = dimension(a)
    if choice == 5 and da:
        k = rng.randint(0, da - 1)
        return blowup(a, proj(k), da - k)
    closed = random_expression(rng, depth - 1)
    dc = dimension(closed)
    if da is not None and dc is not None and dc <= da:
        return complement_expr(a, closed)
    return complement_expr(a, point()) if da is not None else a


@pytest.fixture
def expression_factory(rng) -> Callable[..., VarietyExpr]:
    def _expression_factory(depth: int = 3) -> VarietyExpr:
        return random_expression(rng, depth)

    return _expression_factory
