"""
Bounded cochain complexes of graded abelian groups.

Columns carry a true index: column k of `terms` sits at index
`offset + k`. Every morphism is degree preserving, so each cohomological
degree n gives an ordinary complex of abelian groups (the degree-n row).
"""

from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Iterable, Mapping, Sequence

from motivica import logger
from motivica.abelian import (
    ZERO,
    AbMorphism,
    DirectSum,
    FinAbGroup,
    GroupClass,
    block_morphism,
    group_class,
    homology_at,
)
from motivica.exceptions import MotivicaComplexError
from motivica.linalg import IntMatrix, solve_integer, solve_integer_columns


@dataclass(frozen=True)
class GradedGroup:
    groups: tuple[tuple[int, FinAbGroup], ...] = ()

    def __post_init__(self) -> None:
        cleaned = tuple(sorted((n, g) for n, g in self.groups if not g.is_zero()))
        if len({n for n, _ in cleaned}) != len(cleaned):
            raise MotivicaComplexError("Graded group lists a degree twice")
        object.__setattr__(self, "groups", cleaned)

    @classmethod
    def of(cls, groups: Mapping[int, FinAbGroup]) -> "GradedGroup":
        return cls(tuple(groups.items()))

    @classmethod
    def free(cls, ranks: Mapping[int, int]) -> "GradedGroup":
        return cls(tuple((n, FinAbGroup(r)) for n, r in ranks.items()))

    def at(self, degree: int) -> FinAbGroup:
        for n, g in self.groups:
            if n == degree:
                return g
        return ZERO

    def degrees(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.groups)

    def is_zero(self) -> bool:
        return not self.groups

    def betti(self) -> dict[int, int]:
        return {n: g.rank for n, g in self.groups if g.rank}

    def shift_degrees(self, k: int) -> "GradedGroup":
        return GradedGroup(tuple((n + k, g) for n, g in self.groups))

    def __add__(self, other: "GradedGroup") -> "GradedGroup":
        degrees = sorted(set(self.degrees()) | set(other.degrees()))
        return GradedGroup(tuple((n, self.at(n) + other.at(n)) for n in degrees))

    def __str__(self) -> str:
        if not self.groups:
            return "0"
        return ", ".join(f"H^{n} = {g}" for n, g in self.groups)


EMPTY = GradedGroup()


@dataclass(frozen=True)
class GradedMorphism:
    source: GradedGroup
    target: GradedGroup
    maps: tuple[tuple[int, AbMorphism], ...] = ()

    def __post_init__(self) -> None:
        kept = []
        for n, f in sorted(self.maps, key=lambda item: item[0]):
            if f.source != self.source.at(n) or f.target != self.target.at(n):
                raise MotivicaComplexError(
                    f"Degree {n} component maps {f.source} to {f.target}, expected "
                    f"{self.source.at(n)} to {self.target.at(n)}"
                )
            if not f.is_zero():
                kept.append((n, f))
        object.__setattr__(self, "maps", tuple(kept))

    @classmethod
    def of(
        cls, source: GradedGroup, target: GradedGroup, maps: Mapping[int, AbMorphism]
    ) -> "GradedMorphism":
        return cls(source, target, tuple(maps.items()))

    @classmethod
    def identity(cls, group: GradedGroup) -> "GradedMorphism":
        return cls(
            group, group, tuple((n, AbMorphism.identity(g)) for n, g in group.groups)
        )

    @classmethod
    def zero(cls, source: GradedGroup, target: GradedGroup) -> "GradedMorphism":
        return cls(source, target)

    def at(self, degree: int) -> AbMorphism:
        for n, f in self.maps:
            if n == degree:
                return f
        return AbMorphism.zero(self.source.at(degree), self.target.at(degree))

    def degrees(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.source.degrees()) | set(self.target.degrees())))

    def is_zero(self) -> bool:
        return not self.maps

    def __matmul__(self, other: "GradedMorphism") -> "GradedMorphism":
        if other.target != self.source:
            raise MotivicaComplexError("Graded morphisms are not composable")
        degrees = set(other.source.degrees()) & set(self.target.degrees())
        return GradedMorphism(
            other.source,
            self.target,
            tuple((n, self.at(n) @ other.at(n)) for n in sorted(degrees)),
        )

    def __add__(self, other: "GradedMorphism") -> "GradedMorphism":
        if (self.source, self.target) != (other.source, other.target):
            raise MotivicaComplexError("Graded morphisms are not parallel")
        degrees = set(self.degrees())
        return GradedMorphism(
            self.source,
            self.target,
            tuple((n, self.at(n) + other.at(n)) for n in sorted(degrees)),
        )

    def __neg__(self) -> "GradedMorphism":
        return self.scale(-1)

    def __sub__(self, other: "GradedMorphism") -> "GradedMorphism":
        return self + (-other)

    def scale(self, factor: int) -> "GradedMorphism":
        return GradedMorphism(
            self.source, self.target, tuple((n, f.scale(factor)) for n, f in self.maps)
        )


@dataclass(frozen=True)
class GradedSum:
    """Degreewise canonical direct sum of graded groups"""

    summands: tuple[GradedGroup, ...]

    @cached_property
    def sums(self) -> dict[int, DirectSum]:
        degrees = sorted({n for g in self.summands for n in g.degrees()})
        return {n: DirectSum(tuple(g.at(n) for g in self.summands)) for n in degrees}

    @cached_property
    def group(self) -> GradedGroup:
        return GradedGroup(tuple((n, s.group) for n, s in self.sums.items()))

    def injection(self, k: int) -> GradedMorphism:
        return GradedMorphism(
            self.summands[k],
            self.group,
            tuple((n, s.injection(k)) for n, s in self.sums.items()),
        )

    def projection(self, k: int) -> GradedMorphism:
        return GradedMorphism(
            self.group,
            self.summands[k],
            tuple((n, s.projection(k)) for n, s in self.sums.items()),
        )


def graded_block_morphism(
    source: GradedSum,
    target: GradedSum,
    blocks: Mapping[tuple[int, int], GradedMorphism],
) -> GradedMorphism:
    """Assemble a morphism of graded sums from (target, source) keyed blocks"""
    maps = []
    for n in sorted(set(source.sums) & set(target.sums)):
        degree_blocks = {key: b.at(n) for key, b in blocks.items()}
        maps.append((n, block_morphism(source.sums[n], target.sums[n], degree_blocks)))
    return GradedMorphism(source.group, target.group, tuple(maps))


@dataclass(frozen=True)
class AbComplex:
    terms: tuple[GradedGroup, ...]
    differentials: tuple[GradedMorphism, ...]
    offset: int = 0

    def __post_init__(self) -> None:
        if not self.terms:
            raise MotivicaComplexError("A complex needs at least one column")
        if len(self.differentials) != len(self.terms) - 1:
            raise MotivicaComplexError(
                f"{len(self.terms)} columns need {len(self.terms) - 1} differentials, "
                f"got {len(self.differentials)}"
            )
        for k, d in enumerate(self.differentials):
            if d.source != self.terms[k] or d.target != self.terms[k + 1]:
                raise MotivicaComplexError(
                    f"Differential out of column {self.offset + k} has the wrong "
                    "source or target"
                )
        for k in range(len(self.differentials) - 1):
            dd = self.differentials[k + 1] @ self.differentials[k]
            if dd.maps:
                raise MotivicaComplexError(
                    f"d o d is not zero out of column {self.offset + k} "
                    f"in degree {dd.maps[0][0]}"
                )

    @classmethod
    def single(cls, term: GradedGroup, offset: int = 0) -> "AbComplex":
        return cls((term,), (), offset)

    @property
    def start(self) -> int:
        return self.offset

    @property
    def end(self) -> int:
        """True index of the last column"""
        return self.offset + len(self.terms) - 1

    @property
    def length(self) -> int:
        return len(self.terms)

    def term(self, i: int) -> GradedGroup:
        """Column at true index i, zero outside the support"""
        if self.start <= i <= self.end:
            return self.terms[i - self.offset]
        return EMPTY

    def d(self, i: int) -> GradedMorphism:
        """Differential out of the column at true index i"""
        if self.start <= i < self.end:
            return self.differentials[i - self.offset]
        return GradedMorphism.zero(self.term(i), self.term(i + 1))

    def degrees(self) -> tuple[int, ...]:
        return tuple(sorted({n for t in self.terms for n in t.degrees()}))

    def trimmed(self) -> "AbComplex":
        """Drop zero columns at both ends, keeping true indices"""
        nonzero = [k for k, t in enumerate(self.terms) if not t.is_zero()]
        if not nonzero:
            return AbComplex.single(EMPTY, self.offset)
        a, b = nonzero[0], nonzero[-1]
        return AbComplex(self.terms[a : b + 1], self.differentials[a:b], self.offset + a)


@dataclass(frozen=True)
class ChainMap:
    """Components indexed by true column index over the source's support"""

    source: AbComplex
    target: AbComplex
    components: tuple[GradedMorphism, ...]

    def __post_init__(self) -> None:
        if len(self.components) != self.source.length:
            raise MotivicaComplexError("Chain map needs one component per source column")
        for k, f in enumerate(self.components):
            i = self.source.offset + k
            if f.source != self.source.term(i) or f.target != self.target.term(i):
                raise MotivicaComplexError(f"Chain map component {i} has the wrong shape")
        lo = min(self.source.start, self.target.start) - 1
        hi = max(self.source.end, self.target.end)
        for i in range(lo, hi + 1):
            left = self.at(i + 1) @ self.source.d(i)
            right = self.target.d(i) @ self.at(i)
            if not (left - right).is_zero():
                raise MotivicaComplexError(
                    f"Map does not commute with differentials out of column {i}"
                )

    def at(self, i: int) -> GradedMorphism:
        if self.source.start <= i <= self.source.end:
            return self.components[i - self.source.offset]
        return GradedMorphism.zero(self.source.term(i), self.target.term(i))

    @classmethod
    def identity(cls, complex_: AbComplex) -> "ChainMap":
        return cls(
            complex_, complex_, tuple(GradedMorphism.identity(t) for t in complex_.terms)
        )

    @classmethod
    def zero(cls, source: AbComplex, target: AbComplex) -> "ChainMap":
        return cls(
            source,
            target,
            tuple(
                GradedMorphism.zero(source.term(i), target.term(i))
                for i in range(source.start, source.end + 1)
            ),
        )


def _assemble(
    start: int,
    sums: Sequence[GradedSum],
    blocks: Sequence[Mapping[tuple[int, int], GradedMorphism]],
) -> AbComplex:
    differentials = tuple(
        graded_block_morphism(sums[k], sums[k + 1], blocks[k])
        for k in range(len(sums) - 1)
    )
    return AbComplex(tuple(s.group for s in sums), differentials, start)


def cone(f: ChainMap) -> AbComplex:
    """
    Mapping cone: column n is X^{n+1} + Y^n with differential
    (x, y) -> (-d x, f(x) + d y).
    """
    x, y = f.source, f.target
    start = min(x.start - 1, y.start)
    end = max(x.end - 1, y.end)
    sums = [GradedSum((x.term(n + 1), y.term(n))) for n in range(start, end + 1)]
    blocks = [
        {
            (0, 0): -x.d(n + 1),
            (1, 0): f.at(n + 1),
            (1, 1): y.d(n),
        }
        for n in range(start, end)
    ]
    return _assemble(start, sums, blocks)


def shift(c: AbComplex, k: int) -> AbComplex:
    """Column i of the result is column i + k of c, with sign (-1)^k on d"""
    sign = -1 if k % 2 else 1
    return AbComplex(
        c.terms, tuple(d.scale(sign) for d in c.differentials), c.offset - k
    )


@dataclass(frozen=True)
class Bicomplex:
    """
    Terms B[i, j] with horizontal d_h: (i, j) -> (i + 1, j) and vertical
    d_v: (i, j) -> (i, j + 1). Both square to zero and the squares commute.
    """

    terms: Mapping[tuple[int, int], GradedGroup]
    d_h: Mapping[tuple[int, int], GradedMorphism] = field(default_factory=dict)
    d_v: Mapping[tuple[int, int], GradedMorphism] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.terms:
            raise MotivicaComplexError("A bicomplex needs at least one term")
        for name, maps, step in ("horizontal", self.d_h, (1, 0)), (
            "vertical",
            self.d_v,
            (0, 1),
        ):
            for (i, j), f in maps.items():
                target = (i + step[0], j + step[1])
                if f.source != self.term(i, j) or f.target != self.term(*target):
                    raise MotivicaComplexError(
                        f"{name} differential at ({i}, {j}) has the wrong shape"
                    )
        for i, j in self.terms:
            if not (self.h(i + 1, j) @ self.h(i, j)).is_zero():
                raise MotivicaComplexError(f"d_h o d_h is not zero at ({i}, {j})")
            if not (self.v(i, j + 1) @ self.v(i, j)).is_zero():
                raise MotivicaComplexError(f"d_v o d_v is not zero at ({i}, {j})")
            square = self.v(i + 1, j) @ self.h(i, j) - self.h(i, j + 1) @ self.v(i, j)
            if not square.is_zero():
                raise MotivicaComplexError(f"Square at ({i}, {j}) does not commute")

    def term(self, i: int, j: int) -> GradedGroup:
        return self.terms.get((i, j), EMPTY)

    def h(self, i: int, j: int) -> GradedMorphism:
        if (i, j) in self.d_h:
            return self.d_h[(i, j)]
        return GradedMorphism.zero(self.term(i, j), self.term(i + 1, j))

    def v(self, i: int, j: int) -> GradedMorphism:
        if (i, j) in self.d_v:
            return self.d_v[(i, j)]
        return GradedMorphism.zero(self.term(i, j), self.term(i, j + 1))


def total(b: Bicomplex) -> AbComplex:
    """Column m sums B[i, j] over i + j = m by increasing i; d = d_h + (-1)^i d_v"""
    keys = sorted(b.terms)
    start = min(i + j for i, j in keys)
    end = max(i + j for i, j in keys)
    i_lo = min(i for i, _ in keys)
    i_hi = max(i for i, _ in keys)
    layout = [[(i, m - i) for i in range(i_lo, i_hi + 1)] for m in range(start, end + 1)]
    sums = [GradedSum(tuple(b.term(*key) for key in keys_m)) for keys_m in layout]
    blocks = []
    for m in range(start, end):
        here, there = layout[m - start], layout[m + 1 - start]
        entries: dict[tuple[int, int], GradedMorphism] = {}
        for a, (i, j) in enumerate(here):
            if (i + 1, j) in there:
                entries[(there.index((i + 1, j)), a)] = b.h(i, j)
            sign = -1 if i % 2 else 1
            entries[(there.index((i, j + 1)), a)] = b.v(i, j).scale(sign)
        blocks.append({k: f for k, f in entries.items() if not f.is_zero()})
    return _assemble(start, sums, blocks)


def row(c: AbComplex, degree: int) -> list[AbMorphism]:
    """Degree-n row: the maps between consecutive columns, source column first"""
    return [c.d(i).at(degree) for i in range(c.start, c.end)]


def homology(c: AbComplex) -> dict[int, GradedGroup]:
    """Homology per true column index, as a graded group per column"""
    result: dict[int, dict[int, FinAbGroup]] = {i: {} for i in range(c.start, c.end + 1)}
    for n in c.degrees():
        for i in range(c.start, c.end + 1):
            incoming = c.d(i - 1).at(n)
            outgoing = c.d(i).at(n)
            result[i][n] = homology_at(incoming, outgoing)
    logger.debug(f"Computed homology of a {c.length} column complex")
    return {i: GradedGroup.of(groups) for i, groups in result.items()}


def e2_page(c: AbComplex) -> dict[tuple[int, int], FinAbGroup]:
    """Nonzero entries (i, n): homology at column i of the degree-n row"""
    table = {}
    for i, graded in homology(c).items():
        for n, g in graded.groups:
            table[(i, n)] = g
    return dict(sorted(table.items()))


def is_acyclic(c: AbComplex) -> bool:
    return all(g.is_zero() for g in homology(c).values())


def euler_chi(c: AbComplex) -> dict[int, GroupClass]:
    """Alternating sum of column group classes, per cohomological degree"""
    result: dict[int, GroupClass] = {}
    for i in range(c.start, c.end + 1):
        sign = -1 if i % 2 else 1
        for n, g in c.term(i).groups:
            result[n] = result.get(n, GroupClass()) + group_class(g).scale(sign)
    return {n: cls for n, cls in sorted(result.items()) if not cls.is_zero()}


@dataclass(frozen=True)
class Homotopy:
    """Maps h_i from column i + 1 to column i with d h + h d = identity"""

    complex: AbComplex
    maps: tuple[GradedMorphism, ...]

    def __post_init__(self) -> None:
        c = self.complex
        if len(self.maps) != c.length - 1:
            raise MotivicaComplexError("A homotopy needs one map per differential")
        for i in range(c.start, c.end + 1):
            total_map = c.d(i - 1) @ self.at(i - 1) + self.at(i) @ c.d(i)
            if not (total_map - GradedMorphism.identity(c.term(i))).is_zero():
                raise MotivicaComplexError(f"d h + h d is not the identity at column {i}")

    def at(self, i: int) -> GradedMorphism:
        """Map from column i + 1 to column i"""
        c = self.complex
        if c.start <= i < c.end:
            return self.maps[i - c.offset]
        return GradedMorphism.zero(c.term(i + 1), c.term(i))


@dataclass(frozen=True)
class ContractionResult:
    homotopy: Homotopy | None
    diagnostic: str | None = None
    column: int | None = None

    @property
    def found(self) -> bool:
        return self.homotopy is not None


def _homotopy_steps(source_order: int, target_order: int) -> int:
    """Smallest multiplier keeping a generator image compatible with orders"""
    if source_order == 0:
        return 1
    if target_order == 0:
        return 0
    return target_order // gcd(target_order, source_order)


def _solve_column(
    d_out: AbMorphism, residual: AbMorphism
) -> AbMorphism | None:
    """Find a valid h: target(d_out) -> source(d_out) with h d_out = residual"""
    here, there = d_out.source, d_out.target
    rows_by_order: dict[int, list[int]] = {}
    for r, o in enumerate(here.orders):
        rows_by_order.setdefault(o, []).append(r)
    h = [[0] * there.ngens for _ in range(here.ngens)]
    for o, rows in rows_by_order.items():
        steps = [_homotopy_steps(q, o) for q in there.orders]
        variables = [t for t, s in enumerate(steps) if s]
        columns = [
            [steps[t] * d_out.matrix[t, c] for c in range(here.ngens)] for t in variables
        ]
        if o:
            columns += [
                [-o * int(c == k) for c in range(here.ngens)] for k in range(here.ngens)
            ]
        system = IntMatrix.from_columns(columns, here.ngens)
        rhs = IntMatrix.from_columns([residual.matrix.row(r) for r in rows], here.ngens)
        solution = solve_integer_columns(system, rhs)
        if solution is None:
            return None
        for col, r in enumerate(rows):
            for k, t in enumerate(variables):
                h[r][t] = steps[t] * solution[k, col]
    return AbMorphism.from_rows(there, here, h)


def _greedy_row(maps: Sequence[AbMorphism]) -> tuple[list[AbMorphism] | None, int]:
    previous_d: AbMorphism | None = None
    previous_h: AbMorphism | None = None
    found: list[AbMorphism] = []
    for k, d in enumerate(maps):
        residual = AbMorphism.identity(d.source)
        if previous_d is not None and previous_h is not None:
            residual = residual - previous_d @ previous_h
        h = _solve_column(d, residual)
        if h is None:
            return None, k
        found.append(h)
        previous_d, previous_h = d, h
    if previous_d is not None and previous_h is not None:
        last = AbMorphism.identity(previous_d.target) - previous_d @ previous_h
        if not last.is_zero():
            return None, len(maps)
    return found, -1


def _joint_row(maps: Sequence[AbMorphism]) -> list[AbMorphism] | None:
    """Solve every column of d h + h d = identity at once"""
    groups = [maps[0].source] + [d.target for d in maps]
    variables: list[tuple[int, int, int, int]] = []
    for k in range(len(maps)):
        here, there = groups[k], groups[k + 1]
        for r, o in enumerate(here.orders):
            for t, q in enumerate(there.orders):
                if step := _homotopy_steps(q, o):
                    variables.append((k, r, t, step))
    equations: list[tuple[int, int, int]] = [
        (k, r, c)
        for k, g in enumerate(groups)
        for r in range(g.ngens)
        for c in range(g.ngens)
    ]
    index = {eq: e for e, eq in enumerate(equations)}
    slack = [(k, r, c) for k, r, c in equations if groups[k].orders[r]]
    columns: list[list[int]] = []
    for k, r, t, step in variables:
        column = [0] * len(equations)
        # h_k d_k lands in column k, d_k h_k in column k + 1
        for c in range(groups[k].ngens):
            column[index[(k, r, c)]] += step * maps[k].matrix[t, c]
        for u in range(groups[k + 1].ngens):
            column[index[(k + 1, u, t)]] += maps[k].matrix[u, r] * step
        columns.append(column)
    for k, r, c in slack:
        column = [0] * len(equations)
        column[index[(k, r, c)]] = -groups[k].orders[r]
        columns.append(column)
    system = IntMatrix.from_columns(columns, len(equations))
    rhs = [int(r == c) for _, r, c in equations]
    solution = solve_integer(system, rhs)
    if solution is None:
        return None
    h = [
        [[0] * groups[k + 1].ngens for _ in range(groups[k].ngens)]
        for k in range(len(maps))
    ]
    for value, (k, r, t, step) in zip(solution, variables):
        h[k][r][t] = step * value
    return [
        AbMorphism.from_rows(groups[k + 1], groups[k], h[k]) for k in range(len(maps))
    ]


def find_contraction(c: AbComplex) -> ContractionResult:
    """
    Look for h with d h + h d = identity by solving, column after column,
    h_i d_i = 1 - d_{i-1} h_{i-1}; a row falls back to solving all columns
    jointly before it is declared not contractible.
    """
    for i, graded in homology(c).items():
        for n, g in graded.groups:
            return ContractionResult(
                None, f"nonzero homology {g} at column {i} in degree {n}", i
            )
    if c.length == 1:
        return ContractionResult(Homotopy(c, ()))

    per_degree: dict[int, list[AbMorphism]] = {}
    for n in c.degrees():
        maps = row(c, n)
        found, failed = _greedy_row(maps)
        if found is None:
            logger.debug(f"Column by column solve failed in degree {n}, solving jointly")
            found = _joint_row(maps)
            if found is None:
                column = c.start + failed
                return ContractionResult(
                    None,
                    f"acyclic but not contractible: no integer solution at column "
                    f"{column} in degree {n}",
                    column,
                )
        per_degree[n] = found

    homotopy_maps = tuple(
        GradedMorphism(
            c.terms[k + 1],
            c.terms[k],
            tuple((n, maps[k]) for n, maps in per_degree.items()),
        )
        for k in range(c.length - 1)
    )
    return ContractionResult(Homotopy(c, homotopy_maps))


def complex_from_rows(
    columns: Sequence[Mapping[int, FinAbGroup]],
    differentials: Sequence[Mapping[int, Iterable[Iterable[int]]]],
    offset: int = 0,
) -> AbComplex:
    """Convenience builder from per-degree groups and per-degree matrix rows"""
    terms = tuple(GradedGroup.of(column) for column in columns)
    maps = []
    for k, rows_by_degree in enumerate(differentials):
        source, target = terms[k], terms[k + 1]
        maps.append(
            GradedMorphism.of(
                source,
                target,
                {
                    n: AbMorphism.from_rows(
                        source.at(n), target.at(n), [list(r) for r in rows]
                    )
                    for n, rows in rows_by_degree.items()
                },
            )
        )
    return AbComplex(terms, tuple(maps), offset)
