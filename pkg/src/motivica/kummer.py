"""
Kummer surface dataset.

The sixteen nodes of a Kummer surface sit at the 2-torsion points of an
abelian surface, i.e. at the points of F_2^4. The primitive closure of the
lattice spanned by the sixteen exceptional curves contains half the sum of
the curves over every codeword of the first order Reed-Muller code RM(1,4)
(affine functions on F_2^4). Dually, the restriction of H^2 of the
resolution to the exceptional curves has image

    {y in Z^16 : y mod 2 lies in the dual code of RM(1,4)}

which has index 2^5 in Z^16. Codewords are bitmasks over the 16 points,
point x having bit x.
"""

from functools import lru_cache

from sympy import ZZ
from sympy.polys.matrices import DM
from sympy.polys.matrices.normalforms import hermite_normal_form

from motivica import logger
from motivica.abelian import AbMorphism, FinAbGroup, cokernel_of_relations
from motivica.atlas import NamedMap, builtin_atlas
from motivica.complexes import GradedMorphism
from motivica.exceptions import MotivicaAtlasError
from motivica.linalg import IntMatrix
from motivica.weights import DescentPresentation, MotiveTerm, PresentationEntry

POINTS = 16
EXCEPTIONAL_RANK = 22
RESOLUTION = "K3"


def _weight(mask: int) -> int:
    return bin(mask).count("1")


def reed_muller_code() -> list[int]:
    """All codewords of RM(1,4): the values of x -> a.x + b over F_2^4"""
    words = set()
    for a in range(POINTS):
        for b in (0, 1):
            word = 0
            for x in range(POINTS):
                if (_weight(a & x) + b) % 2:
                    word |= 1 << x
            words.add(word)
    return sorted(words)


def dual_code(code: list[int]) -> list[int]:
    """Brute force over F_2^16: words with even overlap with every codeword"""
    basis = f2_basis(code)
    return [
        y for y in range(1 << POINTS) if all(_weight(y & c) % 2 == 0 for c in basis)
    ]


def f2_basis(words: list[int]) -> list[int]:
    """Greedy basis of the span of words over F_2"""
    basis: list[int] = []
    span = {0}
    for word in words:
        if word in span:
            continue
        basis.append(word)
        span |= {s ^ word for s in span}
    return basis


def code_dimension(words: list[int]) -> int:
    return len(f2_basis(words))


def bits(word: int) -> list[int]:
    return [(word >> x) & 1 for x in range(POINTS)]


@lru_cache(maxsize=1)
def restriction_lattice() -> IntMatrix:
    """
    Hermite basis (16 x 16) of the image of H^2 of the resolution in
    the cohomology of the sixteen exceptional curves.
    """
    code = reed_muller_code()
    dual = dual_code(code)
    if code_dimension(code) != 5 or code_dimension(dual) != 11:
        raise MotivicaAtlasError("Reed-Muller code RM(1,4) has the wrong dimension")
    generators = [[2 if x == i else 0 for x in range(POINTS)] for i in range(POINTS)]
    generators += [bits(word) for word in f2_basis(dual)]
    rows = [[column[x] for column in generators] for x in range(POINTS)]
    hnf = hermite_normal_form(DM(rows, ZZ)).to_Matrix()
    if hnf.shape != (POINTS, POINTS):
        raise MotivicaAtlasError(f"Kummer lattice basis has shape {hnf.shape}")
    lattice = IntMatrix.from_rows([[int(x) for x in row] for row in hnf.tolist()])
    quotient = cokernel_of_relations(lattice)
    if quotient != FinAbGroup(0, (2,) * 5):
        raise MotivicaAtlasError(f"Kummer lattice quotient is {quotient}, not (Z/2)^5")
    logger.debug(f"Kummer lattice assembled from {len(generators)} generators")
    return lattice


def lattice_quotient() -> FinAbGroup:
    """Quotient of Z^16 by the restriction image, dual to the primitive closure"""
    return cokernel_of_relations(restriction_lattice())


def lattice_index() -> int:
    return lattice_quotient().order() or 0


def restriction_map(i: int) -> NamedMap:
    """Pullback from the resolution to the i-th exceptional curve"""
    atlas = builtin_atlas()
    source, target = atlas.cohomology(RESOLUTION), atlas.cohomology("P1")
    lattice = restriction_lattice()
    h2_row = list(lattice.row(i)) + [0] * (EXCEPTIONAL_RANK - POINTS)
    morphism = GradedMorphism.of(
        source,
        target,
        {
            0: AbMorphism.from_rows(source.at(0), target.at(0), [[1]]),
            2: AbMorphism.from_rows(source.at(2), target.at(2), [h2_row]),
        },
    )
    return NamedMap(f"kummer:res{i}", RESOLUTION, "P1", morphism)


@lru_cache(maxsize=1)
def kummer_presentation() -> DescentPresentation:
    """
    Resolution plus sixteen nodes in column 0, sixteen exceptional curves
    in column 1. Each curve receives the resolution with sign + and its
    node with sign -.
    """
    column_0 = MotiveTerm(((RESOLUTION,),) + (("pt",),) * POINTS)
    column_1 = MotiveTerm((("P1",),) * POINTS)
    entries = []
    for i in range(POINTS):
        entries.append(PresentationEntry(0, 0, i, 1, (f"kummer:res{i}",)))
        entries.append(PresentationEntry(0, 1 + i, i, -1, ("const",)))
    return DescentPresentation(
        dimension=2,
        columns=(column_0, column_1),
        entries=tuple(entries),
        maps=tuple(restriction_map(i) for i in range(POINTS)),
    )
