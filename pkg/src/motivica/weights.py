"""
Descent presentations of weight complexes and their integral weight tables.

A presentation is a bounded complex of formal motive terms. Each slot of a
column is a product of atoms; each differential entry is a signed tuple of
named pullbacks, one per factor. Realizing a presentation substitutes the
atlas cohomology (folded with Künneth) and yields an AbComplex whose E2
page is the weight table.
"""

import re
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from sympy import isprime

from motivica import logger
from motivica.abelian import FinAbGroup, GroupClass
from motivica.atlas import Atlas, NamedMap, builtin_atlas
from motivica.complexes import (
    AbComplex,
    ChainMap,
    GradedGroup,
    GradedMorphism,
    GradedSum,
    e2_page,
    euler_chi,
    graded_block_morphism,
)
from motivica.exceptions import (
    MotivicaComplexError,
    MotivicaParserError,
    MotivicaPresentationError,
    MotivicaValidationError,
)
from motivica.kunneth import kunneth, kunneth_map, with_coefficients
from motivica.motives import MotiveClass, virtual_betti, virtual_group_classes

Slot = tuple[str, ...]

COEFFICIENTS_RE = re.compile(r"^(Z|Q|Z/(\d+))$")


@dataclass(frozen=True)
class MotiveTerm:
    """Formal direct sum of slots; a slot is a product of atoms"""

    slots: tuple[Slot, ...] = ()

    def multiplicities(self) -> Counter[Slot]:
        return Counter(self.slots)

    def __len__(self) -> int:
        return len(self.slots)

    def __str__(self) -> str:
        if not self.slots:
            return "0"
        parts = []
        for slot, count in self.multiplicities().items():
            name = "x".join(slot)
            parts.append(name if count == 1 else f"{count}*{name}")
        return " + ".join(parts)


@dataclass(frozen=True)
class PresentationEntry:
    """Signed pullback from slot `source` of a column to slot `target` of the next"""

    column: int
    source: int
    target: int
    sign: int
    maps: tuple[str, ...]


@dataclass(frozen=True)
class DescentPresentation:
    dimension: int
    columns: tuple[MotiveTerm, ...]
    entries: tuple[PresentationEntry, ...] = ()
    maps: tuple[NamedMap, ...] = ()
    labels: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self) -> None:
        for entry in self.entries:
            if not 0 <= entry.column < len(self.columns) - 1:
                raise MotivicaPresentationError(
                    f"Entry out of column {entry.column} has no target column"
                )
            source_column = self.columns[entry.column]
            target_column = self.columns[entry.column + 1]
            if not (
                0 <= entry.source < len(source_column)
                and 0 <= entry.target < len(target_column)
            ):
                raise MotivicaPresentationError(
                    f"Entry out of column {entry.column} refers to a missing slot"
                )
            source, target = source_column.slots[entry.source], target_column.slots[
                entry.target
            ]
            if len(entry.maps) != len(source) or len(source) != len(target):
                raise MotivicaPresentationError(
                    f"Entry out of column {entry.column} needs one map per factor "
                    f"between {'x'.join(source)} and {'x'.join(target)}"
                )
            if entry.sign not in (-1, 1):
                raise MotivicaPresentationError("Entry signs must be +1 or -1")

    @property
    def length(self) -> int:
        return len(self.columns)

    def atlas_for(self, atlas: Atlas | None = None) -> Atlas:
        atlas = atlas or builtin_atlas()
        return atlas.extend(maps=self.maps) if self.maps else atlas

    def slot_dimension(self, slot: Slot, atlas: Atlas) -> int:
        return sum(atlas.dimension(name) for name in slot)

    def ladder_violations(self, atlas: Atlas | None = None) -> list[str]:
        """Columns whose atoms are too big for their position"""
        atlas = atlas or builtin_atlas()
        violations = []
        if self.length > self.dimension + 1:
            violations.append(
                f"{self.length} columns exceed dimension {self.dimension} + 1"
            )
        for i, column in enumerate(self.columns):
            for slot in column.slots:
                if (d := self.slot_dimension(slot, atlas)) > self.dimension - i:
                    violations.append(
                        f"column {i} holds {'x'.join(slot)} of dimension {d}, "
                        f"at most {self.dimension - i} allowed"
                    )
        return violations

    def label(self, column: int, slot: int) -> str:
        if self.labels is not None:
            return self.labels[column][slot]
        return "x".join(self.columns[column].slots[slot])

    def realize(self, atlas: Atlas | None = None) -> AbComplex:
        atlas = self.atlas_for(atlas)
        if not self.columns:
            return AbComplex.single(GradedGroup())
        sums = [
            GradedSum(tuple(slot_cohomology(slot, atlas) for slot in column.slots))
            for column in self.columns
        ]
        blocks = _entry_blocks(
            self.entries, self.columns, self.columns[1:], self.length - 1, atlas
        )
        differentials = [
            graded_block_morphism(sums[k], sums[k + 1], blocks[k])
            for k in range(self.length - 1)
        ]
        self._check_square_zero(sums, differentials)
        return AbComplex(tuple(s.group for s in sums), tuple(differentials))

    def _check_square_zero(
        self, sums: Sequence[GradedSum], differentials: Sequence[GradedMorphism]
    ) -> None:
        for k in range(len(differentials) - 1):
            dd = differentials[k + 1] @ differentials[k]
            if dd.is_zero():
                continue
            for slot in range(len(self.columns[k])):
                composite = dd @ sums[k].injection(slot)
                if not composite.is_zero():
                    degree = composite.maps[0][0]
                    raise MotivicaPresentationError(
                        f"Realized d o d is not zero on {self.label(k, slot)} "
                        f"in column {k}, degree {degree}"
                    )


def slot_cohomology(slot: Slot, atlas: Atlas) -> GradedGroup:
    result = atlas.cohomology(slot[0])
    for name in slot[1:]:
        result = kunneth(result, atlas.cohomology(name))
    return result


def slot_map(
    maps: Sequence[str], source: Slot, target: Slot, atlas: Atlas
) -> GradedMorphism:
    result = atlas.resolve_map(maps[0], source[0], target[0])
    for name, a, b in zip(maps[1:], source[1:], target[1:]):
        result = kunneth_map(result, atlas.resolve_map(name, a, b))
    return result


@dataclass(frozen=True)
class PresentationMap:
    """Columnwise map between presentations, entries keyed by source column"""

    source: DescentPresentation
    target: DescentPresentation
    entries: tuple[PresentationEntry, ...]

    def __post_init__(self) -> None:
        shared = min(self.source.length, self.target.length)
        for entry in self.entries:
            if not 0 <= entry.column < shared:
                raise MotivicaPresentationError(
                    f"Map entry in column {entry.column} has no target column"
                )
            a_column = self.source.columns[entry.column]
            b_column = self.target.columns[entry.column]
            source_ok = 0 <= entry.source < len(a_column)
            target_ok = 0 <= entry.target < len(b_column)
            if not (source_ok and target_ok):
                raise MotivicaPresentationError(
                    f"Map entry in column {entry.column} refers to a missing slot"
                )
            a, b = a_column.slots[entry.source], b_column.slots[entry.target]
            if len(entry.maps) != len(a) or len(a) != len(b):
                raise MotivicaPresentationError(
                    f"Map entry in column {entry.column} needs one map per factor"
                )

    def realize(self, atlas: Atlas | None = None) -> ChainMap:
        atlas = self.source.atlas_for(self.target.atlas_for(atlas))
        x, y = self.source.realize(atlas), self.target.realize(atlas)
        if not self.source.columns:
            return ChainMap.zero(x, y)
        x_sums = [_column_sum(self.source, i, atlas) for i in range(self.source.length)]
        y_sums = [_column_sum(self.target, i, atlas) for i in range(self.target.length)]
        blocks = _entry_blocks(
            self.entries,
            self.source.columns,
            self.target.columns,
            self.source.length,
            atlas,
        )
        components = []
        for i in range(self.source.length):
            if i < self.target.length:
                components.append(graded_block_morphism(x_sums[i], y_sums[i], blocks[i]))
            else:
                components.append(GradedMorphism.zero(x.term(i), GradedGroup()))
        return ChainMap(x, y, tuple(components))


def _entry_blocks(
    entries: Iterable[PresentationEntry],
    sources: Sequence[MotiveTerm],
    targets: Sequence[MotiveTerm],
    count: int,
    atlas: Atlas,
) -> list[dict[tuple[int, int], GradedMorphism]]:
    """Per column, the realized blocks keyed by (target slot, source slot)"""
    blocks: list[dict[tuple[int, int], GradedMorphism]] = [{} for _ in range(count)]
    for entry in entries:
        source = sources[entry.column].slots[entry.source]
        target = targets[entry.column].slots[entry.target]
        morphism = slot_map(entry.maps, source, target, atlas).scale(entry.sign)
        key = (entry.target, entry.source)
        column_blocks = blocks[entry.column]
        column_blocks[key] = (
            column_blocks[key] + morphism if key in column_blocks else morphism
        )
    return blocks


def _column_sum(p: DescentPresentation, i: int, atlas: Atlas) -> GradedSum:
    return GradedSum(tuple(slot_cohomology(s, atlas) for s in p.columns[i].slots))


def empty_presentation(dimension: int = 0) -> DescentPresentation:
    return DescentPresentation(dimension, ())


def single_atom(name: str, atlas: Atlas | None = None) -> DescentPresentation:
    """Presentation of a smooth projective atom: one column, one slot"""
    atlas = atlas or builtin_atlas()
    return DescentPresentation(atlas.dimension(name), (MotiveTerm(((name,),)),))


@dataclass(frozen=True)
class NCConfiguration:
    """
    Smooth compactification with a normal crossing boundary: the ambient
    atom, the number of boundary components and an atom (or None for an
    empty intersection) for each nonempty subset of components.
    """

    ambient: str
    components: int
    strata: Mapping[tuple[int, ...], str | None]
    face_maps: Mapping[tuple[tuple[int, ...], tuple[int, ...]], str] = field(
        default_factory=dict
    )

    def stratum(self, subset: tuple[int, ...]) -> str | None:
        if not subset:
            return self.ambient
        return self.strata.get(subset)


def build_from_ncc(
    cfg: NCConfiguration, atlas: Atlas | None = None
) -> DescentPresentation:
    """
    Strata complex: column r sums Y_I over |I| = r in lexicographic order,
    the entry from I minus its k-th element to I carrying the sign (-1)^k.
    """
    atlas = atlas or builtin_atlas()
    dim = atlas.dimension(cfg.ambient)
    for subset, name in cfg.strata.items():
        if list(subset) != sorted(set(subset)) or not all(
            1 <= i <= cfg.components for i in subset
        ):
            raise MotivicaPresentationError(f"Invalid stratum index {subset}")
        if name is not None and atlas.dimension(name) != dim - len(subset):
            raise MotivicaPresentationError(
                f"Stratum Y_{_subset_label(subset)} = {name} should have dimension "
                f"{dim - len(subset)}"
            )

    layout: list[list[tuple[int, ...]]] = []
    for r in range(cfg.components + 1):
        column = [
            subset
            for subset in combinations(range(1, cfg.components + 1), r)
            if cfg.stratum(subset) is not None
        ]
        layout.append(column)
    while len(layout) > 1 and not layout[-1]:
        layout.pop()

    entries = []
    for r in range(1, len(layout)):
        for target, subset in enumerate(layout[r]):
            for k in range(1, r + 1):
                face = subset[: k - 1] + subset[k:]
                if face not in layout[r - 1]:
                    continue
                name = cfg.face_maps.get((face, subset), "res")
                entries.append(
                    PresentationEntry(
                        r - 1, layout[r - 1].index(face), target, (-1) ** k, (name,)
                    )
                )

    presentation = DescentPresentation(
        dimension=dim,
        columns=tuple(
            MotiveTerm(tuple((str(cfg.stratum(s)),) for s in column)) for column in layout
        ),
        entries=tuple(entries),
        labels=tuple(tuple(f"Y_{_subset_label(s)}" for s in column) for column in layout),
    )
    presentation.realize(atlas)
    logger.debug(f"Built strata complex with {presentation.length} columns")
    return presentation


def _subset_label(subset: tuple[int, ...]) -> str:
    return "{" + ",".join(str(i) for i in subset) + "}"


def _merged_maps(*presentations: DescentPresentation) -> tuple[NamedMap, ...]:
    merged: dict[str, NamedMap] = {}
    for p in presentations:
        for named_map in p.maps:
            if named_map.name in merged and merged[named_map.name] != named_map:
                raise MotivicaPresentationError(
                    f"Presentations define map {named_map.name} differently"
                )
            merged[named_map.name] = named_map
    return tuple(merged.values())


def _cone_presentation(
    dimension: int,
    complete: DescentPresentation,
    closed: DescentPresentation,
    f_entries: Iterable[PresentationEntry],
) -> DescentPresentation:
    """Column i holds X^i then T^(i-1); (x, t) goes to (d x, -f x - d t)"""
    length = max(complete.length, closed.length + 1)
    x_sizes = [
        len(complete.columns[i]) if i < complete.length else 0 for i in range(length)
    ]
    columns = []
    for i in range(length):
        x_slots = complete.columns[i].slots if i < complete.length else ()
        t_slots = closed.columns[i - 1].slots if 0 < i <= closed.length else ()
        columns.append(MotiveTerm(x_slots + t_slots))
    entries = list(complete.entries)
    for e in f_entries:
        entries.append(
            PresentationEntry(
                e.column, e.source, x_sizes[e.column + 1] + e.target, -e.sign, e.maps
            )
        )
    for e in closed.entries:
        entries.append(
            PresentationEntry(
                e.column + 1,
                x_sizes[e.column + 1] + e.source,
                x_sizes[e.column + 2] + e.target,
                -e.sign,
                e.maps,
            )
        )
    return DescentPresentation(
        dimension,
        tuple(columns),
        tuple(entries),
        _merged_maps(complete, closed),
    )


def open_closed(
    complete: DescentPresentation,
    closed: DescentPresentation,
    restriction: PresentationMap,
    atlas: Atlas | None = None,
) -> DescentPresentation:
    """Weight complex of the open complement: the restriction cone shifted by -1"""
    if not closed.columns:
        return complete
    restriction.realize(atlas)
    result = _cone_presentation(complete.dimension, complete, closed, restriction.entries)
    result.realize(atlas)
    return result


def direct_sum_presentation(
    a: DescentPresentation, b: DescentPresentation
) -> tuple[DescentPresentation, list[int]]:
    """Columnwise concatenation, with the slot offset of b in each column"""
    length = max(a.length, b.length)
    offsets = [len(a.columns[i]) if i < a.length else 0 for i in range(length)]
    columns = []
    for i in range(length):
        a_slots = a.columns[i].slots if i < a.length else ()
        b_slots = b.columns[i].slots if i < b.length else ()
        columns.append(MotiveTerm(a_slots + b_slots))
    entries = list(a.entries) + [
        PresentationEntry(
            e.column, offsets[e.column] + e.source, offsets[e.column + 1] + e.target,
            e.sign, e.maps,
        )
        for e in b.entries
    ]
    presentation = DescentPresentation(
        max(a.dimension, b.dimension), tuple(columns), tuple(entries), _merged_maps(a, b)
    )
    return presentation, offsets


def mayer_vietoris_closed(
    w_a: DescentPresentation,
    w_b: DescentPresentation,
    w_ab: DescentPresentation,
    r_a: PresentationMap,
    r_b: PresentationMap,
    atlas: Atlas | None = None,
) -> DescentPresentation:
    """
    Weight complex of A union B for closed A, B: the shifted cone of
    (r_A, -r_B) from W(A) + W(B) to W(A n B).
    """
    r_a.realize(atlas)
    r_b.realize(atlas)
    sum_ab, offsets = direct_sum_presentation(w_a, w_b)
    entries = list(r_a.entries) + [
        PresentationEntry(
            e.column, offsets[e.column] + e.source, e.target, -e.sign, e.maps
        )
        for e in r_b.entries
    ]
    result = _cone_presentation(
        max(w_a.dimension, w_b.dimension), sum_ab, w_ab, entries
    )
    result.realize(atlas)
    return result


def product(w_x: DescentPresentation, w_y: DescentPresentation) -> DescentPresentation:
    """
    Tensor product of presentations: column m holds the slot products a x b
    for a in column i of X and b in column m - i of Y, by increasing i.
    """
    if not w_x.columns or not w_y.columns:
        return empty_presentation(w_x.dimension + w_y.dimension)
    length = w_x.length + w_y.length - 1
    index: dict[tuple[int, int, int, int], int] = {}
    columns = []
    for m in range(length):
        slots: list[Slot] = []
        for i in range(w_x.length):
            j = m - i
            if not 0 <= j < w_y.length:
                continue
            for a, x_slot in enumerate(w_x.columns[i].slots):
                for b, y_slot in enumerate(w_y.columns[j].slots):
                    index[(i, a, j, b)] = len(slots)
                    slots.append(x_slot + y_slot)
        columns.append(MotiveTerm(tuple(slots)))
    entries = []
    for e in w_x.entries:
        i = e.column
        for j in range(w_y.length):
            for b, y_slot in enumerate(w_y.columns[j].slots):
                entries.append(
                    PresentationEntry(
                        i + j,
                        index[(i, e.source, j, b)],
                        index[(i + 1, e.target, j, b)],
                        e.sign,
                        e.maps + ("id",) * len(y_slot),
                    )
                )
    for e in w_y.entries:
        j = e.column
        for i in range(w_x.length):
            sign = -1 if i % 2 else 1
            for a, x_slot in enumerate(w_x.columns[i].slots):
                entries.append(
                    PresentationEntry(
                        i + j,
                        index[(i, a, j, e.source)],
                        index[(i, a, j + 1, e.target)],
                        sign * e.sign,
                        ("id",) * len(x_slot) + e.maps,
                    )
                )
    return DescentPresentation(
        w_x.dimension + w_y.dimension,
        tuple(columns),
        tuple(entries),
        _merged_maps(w_x, w_y),
    )


@dataclass(frozen=True)
class Coefficients:
    ring: str
    modulus: int | None = None

    def __str__(self) -> str:
        return f"Z/{self.modulus}" if self.modulus else self.ring

    @property
    def has_dimensions(self) -> bool:
        """False for Z/m with m composite, where E2 entries have no dimension"""
        return self.modulus is None or bool(isprime(self.modulus))

    def dimension(self, group: FinAbGroup) -> int:
        """Rank over Z and Q, dimension over the prime field Z/p"""
        if self.modulus is None:
            return group.rank
        if not self.has_dimensions:
            raise MotivicaValidationError(f"{self} is not a field")
        return group.rank + sum(1 for d in group.torsion if d % self.modulus == 0)


def parse_coefficients(text: str) -> Coefficients:
    if (match := COEFFICIENTS_RE.match(text.strip())) is None:
        raise MotivicaParserError(f"Coefficients must be Z, Q or Z/m, got '{text}'")
    if match.group(2) is None:
        return Coefficients(match.group(1))
    if (modulus := int(match.group(2))) < 2:
        raise MotivicaParserError(
            f"Coefficient modulus must be at least 2, got {modulus}"
        )
    return Coefficients("Z/m", modulus)


INTEGERS = Coefficients("Z")
RATIONALS = Coefficients("Q")


@dataclass(frozen=True)
class WeightTable:
    coefficients: Coefficients
    dimension: int
    length: int
    entries: tuple[tuple[tuple[int, int], FinAbGroup], ...]
    degenerate: bool

    def at(self, i: int, n: int) -> FinAbGroup:
        return dict(self.entries).get((i, n), FinAbGroup())

    def filtration_length(self) -> int:
        columns = {i for (i, _), _ in self.entries}
        return max(columns) + 1 if columns else 0

    def out_of_range(self) -> list[tuple[int, int]]:
        return [(i, n) for (i, n), _ in self.entries if not 0 <= i <= self.dimension]

    def graded_pieces(self) -> dict[int, list[tuple[int, FinAbGroup]]]:
        """For each total degree k, the pieces gr_n H^k_c = E2^(k - n, n)"""
        pieces: dict[int, list[tuple[int, FinAbGroup]]] = {}
        for (i, n), g in self.entries:
            pieces.setdefault(i + n, []).append((n, g))
        return {k: sorted(v, reverse=True) for k, v in sorted(pieces.items())}

    def total_degree_sums(self) -> dict[int, FinAbGroup]:
        sums: dict[int, FinAbGroup] = {}
        for k, pieces in self.graded_pieces().items():
            for _, g in pieces:
                sums[k] = sums.get(k, FinAbGroup()) + g
        return sums

    def weight_euler(self) -> dict[int, int]:
        """Per weight n, the alternating sum of E2^(i, n) ranks or dimensions"""
        result: dict[int, int] = {}
        for (i, n), g in self.entries:
            result[n] = result.get(n, 0) + (-1) ** i * self.coefficients.dimension(g)
        return {n: x for n, x in sorted(result.items()) if x}

    def compact_euler(self) -> int:
        return sum((-1) ** n * x for n, x in self.weight_euler().items())


def weight_table(
    w: DescentPresentation,
    coefficients: Coefficients = INTEGERS,
    atlas: Atlas | None = None,
) -> WeightTable:
    complex_ = w.realize(atlas)
    if coefficients.modulus is not None:
        complex_ = with_coefficients(complex_, coefficients.modulus)
    page = e2_page(complex_)
    if coefficients.ring == "Q":
        page = {key: FinAbGroup(g.rank) for key, g in page.items() if g.rank}
    table = WeightTable(
        coefficients=coefficients,
        dimension=w.dimension,
        length=w.length,
        entries=tuple(sorted(page.items())),
        degenerate=coefficients.ring == "Q" or w.length <= 2,
    )
    if bad := table.out_of_range():
        logger.warning(f"Weight table has entries outside 0..{w.dimension}: {bad}")
    return table


@dataclass(frozen=True)
class ConsistencyVerdict:
    ok: bool
    mismatches: tuple[tuple[int, str, str], ...] = ()


def virtual_betti_consistency(
    w: DescentPresentation, c: MotiveClass, atlas: Atlas | None = None
) -> ConsistencyVerdict:
    """Compare virtual Betti numbers of c with alternating ranks of the E2 rows"""
    atlas = w.atlas_for(atlas)
    expected = virtual_betti(c, atlas)
    found = weight_table(w, RATIONALS, atlas).weight_euler()
    mismatches = tuple(
        (n, str(expected.get(n, 0)), str(found.get(n, 0)))
        for n in sorted(set(expected) | set(found))
        if expected.get(n, 0) != found.get(n, 0)
    )
    return ConsistencyVerdict(not mismatches, mismatches)


def virtual_group_consistency(
    w: DescentPresentation, c: MotiveClass, atlas: Atlas | None = None
) -> ConsistencyVerdict:
    """Compare group classes of c with the alternating sum of realized columns"""
    atlas = w.atlas_for(atlas)
    expected = virtual_group_classes(c, atlas)
    found = euler_chi(w.realize(atlas))
    mismatches = tuple(
        (n, str(expected.get(n, GroupClass())), str(found.get(n, GroupClass())))
        for n in sorted(set(expected) | set(found))
        if expected.get(n, GroupClass()) != found.get(n, GroupClass())
    )
    return ConsistencyVerdict(not mismatches, mismatches)


def restriction_map(
    source: DescentPresentation,
    target: DescentPresentation,
    entries: Iterable[tuple[int, int, int, int, str | tuple[str, ...]]],
) -> PresentationMap:
    """Shorthand: entries as (column, source slot, target slot, sign, maps)"""
    built = []
    for column, a, b, sign, maps in entries:
        built.append(
            PresentationEntry(
                column, a, b, sign, (maps,) if isinstance(maps, str) else maps
            )
        )
    try:
        return PresentationMap(source, target, tuple(built))
    except MotivicaComplexError as e:
        raise MotivicaPresentationError(str(e))
