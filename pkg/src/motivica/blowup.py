"""
Projective bundle and blow-up formulas.

For the blow-up X' of X along a smooth center Y of codimension d, with
exceptional divisor Y' = P(N) over Y, the square

    Y' --j--> X'
    |g        |f
    Y  --i--> X

gives the short sequences checked here, pushforwards on cycles of
dimension p and pullbacks on classes of codimension p:

    0 -> A_p(Y') -> A_p(Y) + A_p(X') -> A_p(X) -> 0
         a -> (g_* a, -j_* a),  (y, x) -> i_* y + f_* x

    0 -> A^p(X) -> A^p(Y) + A^p(X') -> A^p(Y') -> 0
         x -> (i^* x, -f^* x),  (y, x) -> g^* y + j^* x

and the same pullback complex on integral cohomology, which is
contractible.
"""

from dataclasses import dataclass

from motivica import logger
from motivica.abelian import AbMorphism, FinAbGroup, cokernel, homology_at
from motivica.complexes import (
    AbComplex,
    ContractionResult,
    GradedGroup,
    GradedMorphism,
    GradedSum,
    find_contraction,
    graded_block_morphism,
)
from motivica.exceptions import MotivicaBlowupError, MotivicaValidationError
from motivica.linalg import IntMatrix

PUSHFORWARD = "pushforward"
PULLBACK = "pullback"


def projective_bundle(base: GradedGroup, rank: int) -> GradedGroup:
    """H^m(P(N)) = sum over i < rank of H^(m - 2i)(Y)"""
    if rank < 1:
        raise MotivicaValidationError(f"Bundle rank must be at least 1, got {rank}")
    result = GradedGroup()
    for i in range(rank):
        result = result + base.shift_degrees(2 * i)
    return result


def blowup_cohomology(x: GradedGroup, y: GradedGroup, codim: int) -> GradedGroup:
    """H(X') = H(X) + sum over 1 <= i < codim of H(Y) shifted by 2i"""
    if codim < 1:
        raise MotivicaValidationError(f"Codimension must be at least 1, got {codim}")
    result = x
    for i in range(1, codim):
        result = result + y.shift_degrees(2 * i)
    return result


@dataclass(frozen=True)
class ChowGroups:
    """Basis names of the free groups of X, Y, X' and Y' at one index"""

    x: tuple[str, ...] = ()
    y: tuple[str, ...] = ()
    x_blown: tuple[str, ...] = ()
    y_blown: tuple[str, ...] = ()


@dataclass(frozen=True)
class SquareMaps:
    f: IntMatrix
    g: IntMatrix
    i: IntMatrix
    j: IntMatrix


@dataclass(frozen=True)
class ChowLevel:
    p: int
    groups: ChowGroups
    maps: SquareMaps


def expected_shapes(groups: ChowGroups, direction: str) -> dict[str, tuple[int, int]]:
    x, y = len(groups.x), len(groups.y)
    xb, yb = len(groups.x_blown), len(groups.y_blown)
    if direction == PUSHFORWARD:
        return {"f": (x, xb), "g": (y, yb), "i": (x, y), "j": (xb, yb)}
    return {"f": (xb, x), "g": (yb, y), "i": (y, x), "j": (yb, xb)}


def validate_level(level: ChowLevel, direction: str) -> None:
    for name, shape in expected_shapes(level.groups, direction).items():
        matrix: IntMatrix = getattr(level.maps, name)
        if matrix.shape != shape:
            raise MotivicaBlowupError(
                f"{direction.capitalize()} {name} at p = {level.p} has shape "
                f"{matrix.shape}, expected {shape}"
            )
    m = level.maps
    if direction == PUSHFORWARD:
        commutes = m.i @ m.g == m.f @ m.j
        square = "i_* g_* = f_* j_*"
    else:
        commutes = m.g @ m.i == m.j @ m.f
        square = "g^* i^* = j^* f^*"
    if not commutes:
        raise MotivicaBlowupError(f"Square {square} does not commute at p = {level.p}")


@dataclass(frozen=True)
class ChowData:
    name: str
    codim: int
    pushforwards: tuple[ChowLevel, ...]
    pullbacks: tuple[ChowLevel, ...] = ()

    def __post_init__(self) -> None:
        if self.codim < 1:
            raise MotivicaBlowupError(f"Codimension must be at least 1, got {self.codim}")
        for direction, levels in self.directions():
            indices = [level.p for level in levels]
            if len(set(indices)) != len(indices):
                raise MotivicaBlowupError(f"{direction.capitalize()} index listed twice")
            for level in levels:
                validate_level(level, direction)

    def directions(self) -> list[tuple[str, tuple[ChowLevel, ...]]]:
        return [(PUSHFORWARD, self.pushforwards), (PULLBACK, self.pullbacks)]


@dataclass(frozen=True)
class ExactnessVerdict:
    direction: str
    p: int
    failures: tuple[str, ...] = ()

    @property
    def exact(self) -> bool:
        return not self.failures


def _free(n: int) -> FinAbGroup:
    return FinAbGroup(n)


def short_sequence_failures(alpha: IntMatrix, beta: IntMatrix) -> tuple[str, ...]:
    """Positions where 0 -> A -> B -> C -> 0 fails to be exact, A, B, C free"""
    a, b, c = _free(alpha.cols), _free(alpha.rows), _free(beta.rows)
    first = AbMorphism(a, b, alpha)
    second = AbMorphism(b, c, beta)
    if not (second @ first).is_zero():
        return ("composition",)
    failures = []
    if not homology_at(AbMorphism.zero(FinAbGroup(), a), first).is_zero():
        failures.append("injectivity")
    if not homology_at(first, second).is_zero():
        failures.append("middle")
    if not cokernel(second).is_zero():
        failures.append("surjectivity")
    return tuple(failures)


def sequence_matrices(level: ChowLevel, direction: str) -> tuple[IntMatrix, IntMatrix]:
    m = level.maps
    if direction == PUSHFORWARD:
        alpha = m.g.vstack(-m.j)
        beta = m.i.hstack(m.f)
    else:
        alpha = m.i.vstack(-m.f)
        beta = m.g.hstack(m.j)
    return alpha, beta


def check_blowup_exactness(cd: ChowData) -> list[ExactnessVerdict]:
    """One verdict per index and direction, pushforwards first"""
    verdicts = []
    for direction, levels in cd.directions():
        for level in sorted(levels, key=lambda lv: lv.p):
            alpha, beta = sequence_matrices(level, direction)
            failures = short_sequence_failures(alpha, beta)
            logger.debug(f"{cd.name}: {direction} sequence at p = {level.p}: {failures}")
            verdicts.append(ExactnessVerdict(direction, level.p, failures))
    return verdicts


@dataclass(frozen=True)
class BlowupSquare:
    """Integral cohomology of the blow-up square with its pullbacks"""

    x: GradedGroup
    y: GradedGroup
    x_blown: GradedGroup
    y_blown: GradedGroup
    i: GradedMorphism
    f: GradedMorphism
    g: GradedMorphism
    j: GradedMorphism

    def __post_init__(self) -> None:
        shapes = {
            "i": (self.x, self.y),
            "f": (self.x, self.x_blown),
            "g": (self.y, self.y_blown),
            "j": (self.x_blown, self.y_blown),
        }
        for name, (source, target) in shapes.items():
            morphism: GradedMorphism = getattr(self, name)
            if morphism.source != source or morphism.target != target:
                raise MotivicaBlowupError(
                    f"Pullback {name} has the wrong source or target"
                )


def motive_complex(square: BlowupSquare) -> AbComplex:
    """H(X) -> H(Y) + H(X') -> H(Y'), with maps (i^*, -f^*) and g^* + j^*"""
    x, middle, y_blown = (
        GradedSum((square.x,)),
        GradedSum((square.y, square.x_blown)),
        GradedSum((square.y_blown,)),
    )
    d0 = graded_block_morphism(x, middle, {(0, 0): square.i, (1, 0): -square.f})
    d1 = graded_block_morphism(middle, y_blown, {(0, 0): square.g, (0, 1): square.j})
    return AbComplex((x.group, middle.group, y_blown.group), (d0, d1))


def check_motive_contractible(square: BlowupSquare) -> ContractionResult:
    return find_contraction(motive_complex(square))


def _m(rows: list[list[int]], cols: int) -> IntMatrix:
    return IntMatrix.from_rows(rows, cols)


def _one() -> IntMatrix:
    return IntMatrix.identity(1)


def _zeros(rows: int, cols: int) -> IntMatrix:
    return IntMatrix.zeros(rows, cols)


def p2_point() -> ChowData:
    """P^2 blown up at a point: E is a line, X' has lines l and e"""
    point = ChowGroups(("pt",), ("pt",), ("pt",), ("pt",))
    everything_one = SquareMaps(_one(), _one(), _one(), _one())
    return ChowData(
        name="P2 blown up at a point",
        codim=2,
        pushforwards=(
            ChowLevel(0, point, everything_one),
            ChowLevel(
                1,
                ChowGroups(("l",), (), ("l", "e"), ("E",)),
                SquareMaps(
                    f=_m([[1, 0]], 2), g=_zeros(0, 1), i=_zeros(1, 0), j=_m([[0], [1]], 1)
                ),
            ),
            ChowLevel(
                2,
                ChowGroups(("X",), (), ("X'",), ()),
                SquareMaps(f=_one(), g=_zeros(0, 0), i=_zeros(1, 0), j=_zeros(1, 0)),
            ),
        ),
        pullbacks=(
            ChowLevel(0, ChowGroups(("1",), ("1",), ("1",), ("1",)), everything_one),
            ChowLevel(
                1,
                ChowGroups(("h",), (), ("h", "e"), ("pt",)),
                SquareMaps(
                    f=_m([[1], [0]], 1),
                    g=_zeros(1, 0),
                    i=_zeros(0, 1),
                    j=_m([[0, -1]], 2),
                ),
            ),
            ChowLevel(
                2,
                ChowGroups(("pt",), (), ("pt",), ()),
                SquareMaps(f=_one(), g=_zeros(0, 0), i=_zeros(0, 1), j=_zeros(0, 1)),
            ),
        ),
    )


def p3_line() -> ChowData:
    """P^3 blown up along a line: E is a ruled surface with fiber f and section s"""
    point = ChowGroups(("pt",), ("pt",), ("pt",), ("pt",))
    return ChowData(
        name="P3 blown up along a line",
        codim=2,
        pushforwards=(
            ChowLevel(0, point, SquareMaps(_one(), _one(), _one(), _one())),
            ChowLevel(
                1,
                ChowGroups(("l",), ("Y",), ("l", "f"), ("f", "s")),
                SquareMaps(
                    f=_m([[1, 0]], 2),
                    g=_m([[0, 1]], 2),
                    i=_one(),
                    j=_m([[0, 1], [1, 0]], 2),
                ),
            ),
            ChowLevel(
                2,
                ChowGroups(("H",), (), ("H", "E"), ("E",)),
                SquareMaps(
                    f=_m([[1, 0]], 2), g=_zeros(0, 1), i=_zeros(1, 0), j=_m([[0], [1]], 1)
                ),
            ),
            ChowLevel(
                3,
                ChowGroups(("X",), (), ("X'",), ()),
                SquareMaps(f=_one(), g=_zeros(0, 0), i=_zeros(1, 0), j=_zeros(1, 0)),
            ),
        ),
    )


def p2_point_square() -> BlowupSquare:
    """Cohomology pullbacks for P^2 blown up at a point, E being a line"""
    x = GradedGroup.free({0: 1, 2: 1, 4: 1})
    y = GradedGroup.free({0: 1})
    x_blown = blowup_cohomology(x, y, 2)
    y_blown = projective_bundle(y, 2)

    def degree_maps(
        source: GradedGroup, target: GradedGroup, rows: dict[int, list[list[int]]]
    ) -> GradedMorphism:
        return GradedMorphism.of(
            source,
            target,
            {
                n: AbMorphism.from_rows(source.at(n), target.at(n), r)
                for n, r in rows.items()
            },
        )

    return BlowupSquare(
        x=x,
        y=y,
        x_blown=x_blown,
        y_blown=y_blown,
        i=degree_maps(x, y, {0: [[1]]}),
        f=degree_maps(x, x_blown, {0: [[1]], 2: [[1], [0]], 4: [[1]]}),
        g=degree_maps(y, y_blown, {0: [[1]]}),
        j=degree_maps(x_blown, y_blown, {0: [[1]], 2: [[0, -1]]}),
    )
