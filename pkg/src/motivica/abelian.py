"""
Finitely generated abelian groups, their homomorphisms and group classes.

A group is stored by isomorphism type: a free rank followed by invariant
factors. Its canonical generators are the free ones first, then the
torsion ones by increasing invariant factor; morphism matrices act on
that generator list.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import prod
from typing import Sequence

from sympy import factorint

from motivica.exceptions import (
    MotivicaComplexError,
    MotivicaMorphismError,
    MotivicaValidationError,
)
from motivica.linalg import IntMatrix, kernel_basis, smith, solve_integer_columns


@dataclass(frozen=True, order=True)
class FinAbGroup:
    rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.rank < 0:
            raise MotivicaValidationError("Group rank must be non-negative")
        if any(d < 2 for d in self.torsion):
            raise MotivicaValidationError(
                f"Invariant factors must be at least 2, got {list(self.torsion)}"
            )
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise MotivicaValidationError(
                    f"Invariant factors {list(self.torsion)} do not form "
                    "a divisibility chain"
                )

    @classmethod
    def free(cls, rank: int) -> "FinAbGroup":
        return cls(rank)

    @classmethod
    def cyclic(cls, order: int) -> "FinAbGroup":
        """Cyclic group of the given order, 0 meaning infinite"""
        return normalize_cyclic([order])[0]

    @classmethod
    def from_orders(cls, orders: Sequence[int]) -> "FinAbGroup":
        return normalize_cyclic(orders)[0]

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion)

    @property
    def orders(self) -> tuple[int, ...]:
        """Order of each canonical generator, 0 for free generators"""
        return (0,) * self.rank + self.torsion

    def is_zero(self) -> bool:
        return self.ngens == 0

    def is_free(self) -> bool:
        return not self.torsion

    def order(self) -> int | None:
        return prod(self.torsion) if self.rank == 0 else None

    def relations(self) -> IntMatrix:
        """Columns generate the relation lattice of the canonical generators"""
        columns = []
        for k, d in enumerate(self.torsion):
            column = [0] * self.ngens
            column[self.rank + k] = d
            columns.append(column)
        return IntMatrix.from_columns(columns, self.ngens)

    def __add__(self, other: "FinAbGroup") -> "FinAbGroup":
        return normalize_cyclic(self.orders + other.orders)[0]

    def __str__(self) -> str:
        parts: list[str] = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        for d in sorted(set(self.torsion)):
            count = self.torsion.count(d)
            parts.append(f"Z/{d}" if count == 1 else f"(Z/{d})^{count}")
        return " + ".join(parts) if parts else "0"


ZERO = FinAbGroup()
Z = FinAbGroup(1)


def _reduce_rows(matrix: IntMatrix, target: FinAbGroup) -> IntMatrix:
    orders = target.orders
    return IntMatrix.from_rows(
        [[x % o for x in r] if o else r for r, o in zip(matrix.data, orders)],
        matrix.cols,
    )


@dataclass(frozen=True)
class AbMorphism:
    source: FinAbGroup
    target: FinAbGroup
    matrix: IntMatrix

    def __post_init__(self) -> None:
        if self.matrix.shape != (self.target.ngens, self.source.ngens):
            raise MotivicaMorphismError(
                f"Matrix of shape {self.matrix.shape} cannot map {self.source} "
                f"({self.source.ngens} generators) to {self.target} "
                f"({self.target.ngens} generators)"
            )
        target_orders = self.target.orders
        for j, d in enumerate(self.source.orders):
            if d == 0:
                continue
            for i, o in enumerate(target_orders):
                if (d * self.matrix[i, j]) % o if o else self.matrix[i, j]:
                    raise MotivicaMorphismError(
                        f"Generator {j} of order {d} in {self.source} is sent to an "
                        f"element of {self.target} whose order does not divide {d}"
                    )
        object.__setattr__(self, "matrix", _reduce_rows(self.matrix, self.target))

    @classmethod
    def from_rows(
        cls, source: FinAbGroup, target: FinAbGroup, rows: Sequence[Sequence[int]]
    ) -> "AbMorphism":
        return cls(source, target, IntMatrix.from_rows(rows, source.ngens))

    @classmethod
    def identity(cls, group: FinAbGroup) -> "AbMorphism":
        return cls(group, group, IntMatrix.identity(group.ngens))

    @classmethod
    def zero(cls, source: FinAbGroup, target: FinAbGroup) -> "AbMorphism":
        return cls(source, target, IntMatrix.zeros(target.ngens, source.ngens))

    def __matmul__(self, other: "AbMorphism") -> "AbMorphism":
        """Composition self after other"""
        if other.target != self.source:
            raise MotivicaMorphismError(
                f"Cannot compose {self.source} <- ... with a map into {other.target}"
            )
        return AbMorphism(other.source, self.target, self.matrix @ other.matrix)

    def __add__(self, other: "AbMorphism") -> "AbMorphism":
        self._check_parallel(other)
        return AbMorphism(self.source, self.target, self.matrix + other.matrix)

    def __sub__(self, other: "AbMorphism") -> "AbMorphism":
        return self + (-other)

    def __neg__(self) -> "AbMorphism":
        return AbMorphism(self.source, self.target, -self.matrix)

    def scale(self, factor: int) -> "AbMorphism":
        return AbMorphism(self.source, self.target, self.matrix.scale(factor))

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def _check_parallel(self, other: "AbMorphism") -> None:
        if (self.source, self.target) != (other.source, other.target):
            raise MotivicaMorphismError("Morphisms do not share source and target")


def normalize_cyclic(
    orders: Sequence[int],
) -> tuple[FinAbGroup, IntMatrix, IntMatrix]:
    """
    Canonical form of a direct sum of cyclic groups (0 meaning Z).

    Returns the canonical group together with matrices of the isomorphism
    to it and of its inverse, both acting on generator coordinates.
    """
    n = len(orders)
    if any(o < 0 for o in orders):
        raise MotivicaValidationError(f"Cyclic orders must be non-negative: {orders}")
    kept = [k for k, o in enumerate(orders) if o != 1]
    kept.sort(key=lambda k: (orders[k] != 0, orders[k]))
    torsion = [orders[k] for k in kept if orders[k]]
    if all(b % a == 0 for a, b in zip(torsion, torsion[1:])):
        group = FinAbGroup(len(kept) - len(torsion), tuple(torsion))
        to_canonical = IntMatrix.from_rows(
            [[int(j == k) for j in range(n)] for k in kept], n
        )
        return group, to_canonical, to_canonical.transpose()

    snf = smith(IntMatrix.diagonal(list(orders)))
    free = [i for i, d in enumerate(snf.D) if d == 0]
    torsion_rows = [i for i, d in enumerate(snf.D) if d > 1]
    selected = free + torsion_rows
    group = FinAbGroup(len(free), tuple(snf.D[i] for i in torsion_rows))
    to_canonical = snf.U.submatrix(selected, range(n))
    from_canonical = snf.U_inv.submatrix(range(n), selected)
    return group, to_canonical, from_canonical


@dataclass(frozen=True)
class DirectSum:
    """Canonical direct sum of groups with its injections and projections"""

    summands: tuple[FinAbGroup, ...]
    group: FinAbGroup = field(init=False)
    to_canonical: IntMatrix = field(init=False, repr=False)
    from_canonical: IntMatrix = field(init=False, repr=False)

    def __post_init__(self) -> None:
        orders = [o for g in self.summands for o in g.orders]
        group, to_canonical, from_canonical = normalize_cyclic(orders)
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "to_canonical", to_canonical)
        object.__setattr__(self, "from_canonical", from_canonical)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        offsets = [0]
        for g in self.summands:
            offsets.append(offsets[-1] + g.ngens)
        return tuple(offsets)

    def _block(self, k: int) -> range:
        return range(self.offsets[k], self.offsets[k + 1])

    def injection(self, k: int) -> AbMorphism:
        columns = list(self._block(k))
        matrix = self.to_canonical.submatrix(range(self.group.ngens), columns)
        return AbMorphism(self.summands[k], self.group, matrix)

    def projection(self, k: int) -> AbMorphism:
        rows = list(self._block(k))
        matrix = self.from_canonical.submatrix(rows, range(self.group.ngens))
        return AbMorphism(self.group, self.summands[k], matrix)

    def embed_vector(self, k: int, vector: Sequence[int]) -> tuple[int, ...]:
        raw = [0] * self.offsets[-1]
        raw[self.offsets[k] : self.offsets[k + 1]] = vector
        return self.to_canonical.apply(raw)


def block_morphism(
    source: DirectSum,
    target: DirectSum,
    blocks: dict[tuple[int, int], AbMorphism],
) -> AbMorphism:
    """
    Morphism between two direct sums given by its blocks, keyed by
    (target summand, source summand); missing blocks are zero.
    """
    raw = [[0] * source.offsets[-1] for _ in range(target.offsets[-1])]
    for (i, j), morphism in blocks.items():
        if morphism.source != source.summands[j] or morphism.target != target.summands[i]:
            raise MotivicaMorphismError(
                f"Block ({i}, {j}) maps {morphism.source} to {morphism.target}, "
                f"expected {source.summands[j]} to {target.summands[i]}"
            )
        r0, c0 = target.offsets[i], source.offsets[j]
        for r, row in enumerate(morphism.matrix.data):
            raw[r0 + r][c0 : c0 + len(row)] = row
    matrix = IntMatrix.from_rows(raw, source.offsets[-1])
    return AbMorphism(
        source.group, target.group, target.to_canonical @ matrix @ source.from_canonical
    )


def cokernel_of_relations(relations: IntMatrix) -> FinAbGroup:
    """Isomorphism type of Z^rows modulo the span of the columns"""
    snf = smith(relations)
    torsion = tuple(d for d in snf.D if d > 1)
    return FinAbGroup(relations.rows - snf.rank, torsion)


def cokernel(f: AbMorphism) -> FinAbGroup:
    return cokernel_of_relations(f.matrix.hstack(f.target.relations()))


def kernel_lattice(f: AbMorphism) -> IntMatrix:
    """
    Basis (as columns) of the lattice of generator coordinates x with
    f(x) = 0 in the target.
    """
    n = f.source.ngens
    stacked = f.matrix.hstack(-f.target.relations())
    basis = kernel_basis(stacked)
    return basis.submatrix(range(n), range(basis.cols))


def homology_at(g: AbMorphism, f: AbMorphism) -> FinAbGroup:
    """Isomorphism type of ker f / im g for composable g, f with f after g zero"""
    if g.target != f.source:
        raise MotivicaComplexError(
            f"Maps are not composable: {g.target} is not {f.source}"
        )
    if not (f @ g).is_zero():
        raise MotivicaComplexError("Composition of consecutive maps is not zero")
    middle = g.target
    lattice = kernel_lattice(f)
    if lattice.cols == 0:
        return FinAbGroup()
    boundaries = g.matrix.hstack(middle.relations())
    if boundaries.cols == 0:
        return FinAbGroup(lattice.cols)
    coordinates = solve_integer_columns(lattice, boundaries)
    assert coordinates is not None, "boundaries must lie in the kernel"
    return cokernel_of_relations(coordinates)


@dataclass(frozen=True)
class GroupClass:
    """
    Class of a group in the Grothendieck group of finitely generated abelian
    groups under direct sum: a rank and, per prime power p^n, a multiplicity.
    """

    rank: int = 0
    primary: tuple[tuple[tuple[int, int], int], ...] = ()

    @classmethod
    def build(cls, rank: int, primary: dict[tuple[int, int], int]) -> "GroupClass":
        return cls(rank, tuple(sorted((k, v) for k, v in primary.items() if v != 0)))

    def phi(self, p: int) -> dict[int, int]:
        return {n: count for (q, n), count in self.primary if q == p}

    def __add__(self, other: "GroupClass") -> "GroupClass":
        primary = dict(self.primary)
        for key, count in other.primary:
            primary[key] = primary.get(key, 0) + count
        return GroupClass.build(self.rank + other.rank, primary)

    def __neg__(self) -> "GroupClass":
        return self.scale(-1)

    def __sub__(self, other: "GroupClass") -> "GroupClass":
        return self + (-other)

    def scale(self, factor: int) -> "GroupClass":
        return GroupClass.build(
            factor * self.rank, {k: factor * v for k, v in self.primary}
        )

    def is_zero(self) -> bool:
        return self.rank == 0 and not self.primary

    def is_effective(self) -> bool:
        return self.rank >= 0 and all(v > 0 for _, v in self.primary)

    def torsion_cardinality(self) -> Fraction:
        """Order of the torsion subgroup, extended multiplicatively to classes"""
        result = Fraction(1)
        for (p, n), count in self.primary:
            result *= Fraction(p) ** (n * count)
        return result

    def to_group(self) -> FinAbGroup:
        if not self.is_effective():
            raise MotivicaValidationError(f"Class {self} is not the class of a group")
        orders = [p**n for (p, n), count in self.primary for _ in range(count)]
        return FinAbGroup.from_orders([0] * self.rank + orders)

    def __str__(self) -> str:
        parts = [f"rank {self.rank}"] + [
            f"{count:+d}*Z/{p**n}" for (p, n), count in self.primary
        ]
        return " ".join(parts)


def group_class(group: FinAbGroup) -> GroupClass:
    primary: dict[tuple[int, int], int] = {}
    for d in group.torsion:
        for p, n in factorint(d).items():
            primary[(int(p), int(n))] = primary.get((int(p), int(n)), 0) + 1
    return GroupClass.build(group.rank, primary)
