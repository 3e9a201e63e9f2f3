"""
Classes of varieties in a free model of the Grothendieck group of motives.

A class is an integer polynomial in the Tate class L and in opaque atom
symbols. Points and projective spaces are rewritten into L, every other
atom stays a free variable.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import sympy
from sympy import Poly, Symbol, expand
from sympy.polys.polyerrors import CoercionFailed
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

from motivica.abelian import GroupClass, group_class
from motivica.atlas import PROJECTIVE_RE, Atlas, builtin_atlas
from motivica.complexes import GradedGroup
from motivica.exceptions import (
    MotivicaAtlasError,
    MotivicaExpressionError,
    MotivicaParserError,
)
from motivica.expressions import (
    Affine,
    Atom,
    Blowup,
    Complement,
    Cone,
    DisjointUnion,
    Empty,
    Fibration,
    Point,
    Product,
    Proj,
    ProjBundle,
    VarietyExpr,
)
from motivica.formatter import format_motive_class
from motivica.kunneth import kunneth

L = Symbol("L")
t, u, v = sympy.symbols("t u v")

IDENTIFIER_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


def projective_class(n: int) -> sympy.Expr:
    return sum((L**i for i in range(n + 1)), sympy.Integer(0))


@dataclass(frozen=True)
class MotiveClass:
    expr: sympy.Expr

    def __post_init__(self) -> None:
        object.__setattr__(self, "expr", expand(self.expr))

    @classmethod
    def zero(cls) -> "MotiveClass":
        return cls(sympy.Integer(0))

    @classmethod
    def one(cls) -> "MotiveClass":
        return cls(sympy.Integer(1))

    @classmethod
    def tate(cls, power: int = 1) -> "MotiveClass":
        return cls(L**power)

    @classmethod
    def atom(cls, name: str) -> "MotiveClass":
        if name == "pt":
            return cls.one()
        if (match := PROJECTIVE_RE.match(name)) is not None:
            return cls(projective_class(int(match.group(1))))
        return cls(Symbol(name))

    @classmethod
    def parse(cls, text: str) -> "MotiveClass":
        """
        Read back a printed class such as `K3*L^2 - 16*L + 1`. Atom names
        are normalized like in class_of, so `P1` reads as `L + 1`.
        """
        names = set(IDENTIFIER_RE.findall(text))
        local_dict = {name: cls.atom(name).expr for name in names}
        try:
            expr = parse_expr(
                text,
                local_dict=local_dict,
                transformations=standard_transformations + (convert_xor,),
                evaluate=True,
            )
            symbols = sorted(expr.free_symbols, key=str) or [L]
            Poly(expr, *symbols, domain=sympy.ZZ)
        except (SyntaxError, TypeError, sympy.SympifyError, sympy.PolynomialError) as e:
            raise MotivicaParserError(f"Failed to parse motive class '{text}': {e}")
        except CoercionFailed as e:
            raise MotivicaParserError(
                f"Motive class '{text}' does not have integer coefficients: {e}"
            )
        return cls(expr)

    def generators(self) -> list[Symbol]:
        """L first, then atom symbols by name"""
        atoms = sorted((s for s in self.expr.free_symbols if s != L), key=str)
        return [L] + atoms

    def atoms(self) -> list[str]:
        return [str(s) for s in self.generators()[1:]]

    def poly(self) -> Poly:
        return Poly(self.expr, *self.generators(), domain=sympy.ZZ)

    def terms(self) -> list[tuple[tuple[int, ...], int]]:
        """Monomials by decreasing total degree, then graded lexicographic"""
        return [(m, int(c)) for m, c in self.poly().terms(order="grlex") if c]

    def __add__(self, other: "MotiveClass") -> "MotiveClass":
        return MotiveClass(self.expr + other.expr)

    def __sub__(self, other: "MotiveClass") -> "MotiveClass":
        return MotiveClass(self.expr - other.expr)

    def __neg__(self) -> "MotiveClass":
        return MotiveClass(-self.expr)

    def __mul__(self, other: "MotiveClass") -> "MotiveClass":
        return MotiveClass(self.expr * other.expr)

    def __pow__(self, power: int) -> "MotiveClass":
        return MotiveClass(self.expr**power)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MotiveClass):
            return NotImplemented
        return bool(expand(self.expr - other.expr) == 0)

    def __hash__(self) -> int:
        return hash(self.expr)

    def __str__(self) -> str:
        return format_motive_class(self)


def dimension(e: VarietyExpr, atlas: Atlas | None = None) -> int | None:
    """Dimension of an expression, None standing for the empty variety"""
    atlas = atlas or builtin_atlas()
    match e:
        case Empty():
            return None
        case Point():
            return 0
        case Affine(n=n) | Proj(n=n):
            return n
        case Atom():
            return _atom_dimension(e, atlas)
        case DisjointUnion(parts=parts):
            dims = [d for d in (dimension(p, atlas) for p in parts) if d is not None]
            return max(dims) if dims else None
        case Product(factors=factors):
            dims = [dimension(f, atlas) for f in factors]
            return None if any(d is None for d in dims) else sum(d for d in dims if d)
        case Fibration(fiber=fiber, base=base):
            df, db = dimension(fiber, atlas), dimension(base, atlas)
            return None if df is None or db is None else df + db
        case Complement(ambient=ambient, closed=closed):
            da, dc = dimension(ambient, atlas), dimension(closed, atlas)
            if dc is not None and (da is None or dc > da):
                raise MotivicaExpressionError(
                    f"Closed part of dimension {dc} does not fit in an ambient "
                    f"variety of dimension {da}"
                )
            return da
        case Cone(base=base):
            db = dimension(base, atlas)
            return 0 if db is None else db + 1
        case ProjBundle(base=base, rank=rank):
            db = dimension(base, atlas)
            return None if db is None else db + rank - 1
        case Blowup(ambient=ambient, center=center, codim=codim):
            da, dc = dimension(ambient, atlas), dimension(center, atlas)
            if dc is not None and (da is None or dc != da - codim):
                raise MotivicaExpressionError(
                    f"Blow-up center of dimension {dc} is not of codimension {codim} "
                    f"in an ambient variety of dimension {da}"
                )
            return da
    raise MotivicaExpressionError(f"Unknown expression node {e!r}")


def _atom_dimension(e: Atom, atlas: Atlas) -> int:
    known = atlas.dimension(e.name) if atlas.has(e.name) else None
    if e.dimension is not None and known is not None and e.dimension != known:
        raise MotivicaExpressionError(
            f"Atom {e.name} is declared of dimension {e.dimension}, "
            f"the atlas says {known}"
        )
    if e.dimension is None and known is None:
        raise MotivicaExpressionError(f"Dimension of atom {e.name} is unknown")
    return e.dimension if e.dimension is not None else known  # type: ignore[return-value]


def _class(e: VarietyExpr) -> MotiveClass:
    match e:
        case Empty():
            return MotiveClass.zero()
        case Point():
            return MotiveClass.one()
        case Affine(n=n):
            return MotiveClass.tate(n)
        case Proj(n=n):
            return MotiveClass(projective_class(n))
        case Atom(name=name):
            return MotiveClass.atom(name)
        case DisjointUnion(parts=parts):
            return reduce(lambda a, b: a + b, map(_class, parts), MotiveClass.zero())
        case Product(factors=factors):
            return reduce(lambda a, b: a * b, map(_class, factors), MotiveClass.one())
        case Fibration(fiber=fiber, base=base):
            return _class(fiber) * _class(base)
        case Complement(ambient=ambient, closed=closed):
            return _class(ambient) - _class(closed)
        case Cone(base=base):
            y = _class(base)
            return MotiveClass.one() + y * MotiveClass.tate() - y
        case ProjBundle(base=base, rank=rank):
            return _class(base) * MotiveClass(projective_class(rank - 1))
        case Blowup(ambient=ambient, center=center, codim=codim):
            y = _class(center)
            return _class(ambient) - y + y * MotiveClass(projective_class(codim - 1))
    raise MotivicaExpressionError(f"Unknown expression node {e!r}")


def class_of(e: VarietyExpr, atlas: Atlas | None = None) -> MotiveClass:
    """Class of an expression by scissor, product and bundle rules"""
    dimension(e, atlas)
    return _class(e)


def _substitute(
    c: MotiveClass, values: dict[Symbol, sympy.Expr], gens: list[Symbol]
) -> Poly:
    return Poly(expand(c.expr.xreplace(values)), *gens, domain=sympy.ZZ)


def poincare_of(cohomology: GradedGroup) -> sympy.Expr:
    return sum((g.rank * t**n for n, g in cohomology.groups), sympy.Integer(0))


def virtual_poincare(c: MotiveClass, atlas: Atlas | None = None) -> Poly:
    atlas = atlas or builtin_atlas()
    values: dict[Symbol, sympy.Expr] = {L: t**2}
    for name in c.atoms():
        values[Symbol(name)] = poincare_of(atlas.cohomology(name))
    return _substitute(c, values, [t])


def virtual_hodge(c: MotiveClass, atlas: Atlas | None = None) -> Poly:
    atlas = atlas or builtin_atlas()
    values: dict[Symbol, sympy.Expr] = {L: u * v}
    for name in c.atoms():
        record = atlas.atom(name)
        if record.hodge is None:
            raise MotivicaAtlasError(f"Atom {name} has no Hodge numbers")
        values[Symbol(name)] = sum(
            (h * u**p * v**q for (p, q), h in record.hodge), sympy.Integer(0)
        )
    return _substitute(c, values, [u, v])


def euler_char(c: MotiveClass, atlas: Atlas | None = None) -> int:
    return int(virtual_poincare(c, atlas).eval(-1))


def virtual_betti(c: MotiveClass, atlas: Atlas | None = None) -> dict[int, int]:
    """Coefficient of t^n for every n where it is nonzero"""
    return {m[0]: int(k) for m, k in virtual_poincare(c, atlas).terms() if k}


def monomial_cohomology(
    exponents: tuple[int, ...], atoms: list[str], atlas: Atlas
) -> GradedGroup:
    """Cohomology of L^a times a product of atoms, through Künneth"""
    tate_power, atom_powers = exponents[0], exponents[1:]
    result = GradedGroup.free({2 * tate_power: 1})
    for name, power in zip(atoms, atom_powers):
        for _ in range(power):
            result = kunneth(result, atlas.cohomology(name))
    return result


def virtual_group_classes(
    c: MotiveClass, atlas: Atlas | None = None
) -> dict[int, GroupClass]:
    """Per degree n, the additive extension of the class of H^n in groups"""
    atlas = atlas or builtin_atlas()
    atoms = c.atoms()
    result: dict[int, GroupClass] = {}
    for exponents, coefficient in c.terms():
        for n, group in monomial_cohomology(exponents, atoms, atlas).groups:
            scaled = group_class(group).scale(coefficient)
            result[n] = result.get(n, GroupClass()) + scaled
    return {n: cls for n, cls in sorted(result.items()) if not cls.is_zero()}


def torsion_orders(c: MotiveClass, atlas: Atlas | None = None) -> dict[int, Fraction]:
    """Order of the torsion of H^n extended to classes, as a rational number"""
    return {
        n: cls.torsion_cardinality()
        for n, cls in virtual_group_classes(c, atlas).items()
        if cls.primary
    }
