"""
Built-in realization data for smooth projective atoms.

Each atom carries its integral cohomology and its Hodge numbers. Named maps
are pullbacks in cohomology between atoms: custom ones carry explicit
matrices, and a few generic names are resolved by rule:

  id     identity of an atom
  res    restriction to a point or to a linear subspace of a projective space
  const  pullback along the constant map from an atom to a point
"""

import re
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping

from motivica import logger
from motivica.abelian import AbMorphism, FinAbGroup
from motivica.complexes import GradedGroup, GradedMorphism
from motivica.exceptions import MotivicaAtlasError, MotivicaValidationError
from motivica.linalg import IntMatrix

PROJECTIVE_RE = re.compile(r"^P(\d+)$")
CURVE_RE = re.compile(r"^Curve(\d+)$")

Hodge = tuple[tuple[tuple[int, int], int], ...]


@dataclass(frozen=True)
class AtomRecord:
    name: str
    dimension: int
    cohomology: GradedGroup
    hodge: Hodge | None = None
    components: int = 1

    def __post_init__(self) -> None:
        try:
            self._validate()
        except MotivicaValidationError as e:
            raise MotivicaAtlasError(f"Atom {self.name}: {e}")

    def _validate(self) -> None:
        if self.dimension < 0 or self.components < 1:
            raise MotivicaValidationError("dimension and component count are invalid")
        top = 2 * self.dimension
        connected = FinAbGroup(self.components)
        if self.cohomology.at(0) != connected:
            raise MotivicaValidationError(f"H^0 must be {connected}")
        if self.cohomology.at(top) != connected:
            raise MotivicaValidationError(f"H^{top} must be {connected}")
        if any(n < 0 or n > top for n in self.cohomology.degrees()):
            raise MotivicaValidationError(f"cohomology must live in degrees 0..{top}")
        if self.hodge is None:
            return
        table = self.hodge_numbers()
        for (p, q), h in table.items():
            if not (0 <= p <= self.dimension and 0 <= q <= self.dimension) or h < 0:
                raise MotivicaValidationError(f"invalid Hodge number h^{p},{q} = {h}")
            if table.get((q, p), 0) != h:
                raise MotivicaValidationError(f"h^{p},{q} differs from h^{q},{p}")
        for n in range(top + 1):
            total = sum(h for (p, q), h in table.items() if p + q == n)
            if total != self.cohomology.at(n).rank:
                raise MotivicaValidationError(
                    f"Hodge numbers in degree {n} sum to {total}, "
                    f"rank of H^{n} is {self.cohomology.at(n).rank}"
                )

    def hodge_numbers(self) -> dict[tuple[int, int], int]:
        return dict(self.hodge or ())

    def betti(self) -> dict[int, int]:
        return self.cohomology.betti()


@dataclass(frozen=True)
class NamedMap:
    """Pullback in cohomology from the source atom to the target atom"""

    name: str
    source: str
    target: str
    morphism: GradedMorphism


def _hodge(numbers: Mapping[tuple[int, int], int]) -> Hodge:
    return tuple(sorted((k, v) for k, v in numbers.items() if v))


def projective_space(n: int) -> AtomRecord:
    return AtomRecord(
        name="pt" if n == 0 else f"P{n}",
        dimension=n,
        cohomology=GradedGroup.free({2 * k: 1 for k in range(n + 1)}),
        hodge=_hodge({(k, k): 1 for k in range(n + 1)}),
    )


def curve(genus: int, name: str | None = None) -> AtomRecord:
    return AtomRecord(
        name=name or f"Curve{genus}",
        dimension=1,
        cohomology=GradedGroup.free({0: 1, 1: 2 * genus, 2: 1}),
        hodge=_hodge({(0, 0): 1, (1, 0): genus, (0, 1): genus, (1, 1): 1}),
    )


def _builtin_records() -> list[AtomRecord]:
    records = [projective_space(n) for n in range(5)]
    records.append(curve(1, "Elliptic"))
    records.append(
        AtomRecord(
            name="AbelianSurface",
            dimension=2,
            cohomology=GradedGroup.free({n: comb(4, n) for n in range(5)}),
            hodge=_hodge(
                {(p, q): comb(2, p) * comb(2, q) for p in range(3) for q in range(3)}
            ),
        )
    )
    records.append(
        AtomRecord(
            name="K3",
            dimension=2,
            cohomology=GradedGroup.free({0: 1, 2: 22, 4: 1}),
            hodge=_hodge({(0, 0): 1, (2, 0): 1, (1, 1): 20, (0, 2): 1, (2, 2): 1}),
        )
    )
    records.append(
        AtomRecord(
            name="Enriques",
            dimension=2,
            cohomology=GradedGroup.of(
                {
                    0: FinAbGroup(1),
                    2: FinAbGroup(10, (2,)),
                    3: FinAbGroup(0, (2,)),
                    4: FinAbGroup(1),
                }
            ),
            hodge=_hodge({(0, 0): 1, (1, 1): 10, (2, 2): 1}),
        )
    )
    return records


class Atlas:
    def __init__(self, records: Iterable[AtomRecord] = (), maps: Iterable[NamedMap] = ()):
        self._records: dict[str, AtomRecord] = {}
        self._maps: dict[str, NamedMap] = {}
        for record in records:
            if record.name in self._records:
                raise MotivicaAtlasError(f"Atom {record.name} is defined twice")
            self._records[record.name] = record
        for named_map in maps:
            self._add_map(named_map)

    def _add_map(self, named_map: NamedMap) -> None:
        if self._maps.get(named_map.name) == named_map:
            return
        if named_map.name in self._maps or named_map.name in ("id", "res", "const"):
            raise MotivicaAtlasError(f"Map {named_map.name} is defined twice")
        source, target = self.atom(named_map.source), self.atom(named_map.target)
        morphism = named_map.morphism
        if morphism.source != source.cohomology or morphism.target != target.cohomology:
            raise MotivicaAtlasError(
                f"Map {named_map.name} does not match the cohomology of "
                f"{named_map.source} and {named_map.target}"
            )
        self._maps[named_map.name] = named_map

    def extend(
        self, records: Iterable[AtomRecord] = (), maps: Iterable[NamedMap] = ()
    ) -> "Atlas":
        added: list[AtomRecord] = []
        for record in records:
            known = self.has(record.name)
            if record in added or (known and self.atom(record.name) == record):
                continue
            if known or record.name in {r.name for r in added}:
                raise MotivicaAtlasError(
                    f"Atom {record.name} is already defined with different data"
                )
            added.append(record)
        extended = Atlas(list(self._records.values()) + added)
        for named_map in list(self._maps.values()) + list(maps):
            extended._add_map(named_map)
        if added:
            logger.debug(f"Atlas extended with atoms {', '.join(r.name for r in added)}")
        return extended

    def names(self) -> list[str]:
        return sorted(self._records)

    def has(self, name: str) -> bool:
        try:
            self.atom(name)
        except MotivicaAtlasError:
            return False
        return True

    def atom(self, name: str) -> AtomRecord:
        if (record := self._records.get(name)) is not None:
            return record
        if (match := PROJECTIVE_RE.match(name)) is not None:
            return projective_space(int(match.group(1)))
        if (match := CURVE_RE.match(name)) is not None:
            return curve(int(match.group(1)))
        raise MotivicaAtlasError(f"Unknown atom: {name}")

    def cohomology(self, name: str) -> GradedGroup:
        return self.atom(name).cohomology

    def dimension(self, name: str) -> int:
        return self.atom(name).dimension

    def named_map(self, name: str) -> NamedMap:
        if (named_map := self._maps.get(name)) is None:
            raise MotivicaAtlasError(f"Unknown map: {name}")
        return named_map

    def resolve_map(self, name: str, source: str, target: str) -> GradedMorphism:
        """Pullback called `name` from the cohomology of source to that of target"""
        if name == "id":
            if source != target:
                raise MotivicaAtlasError(f"Map id cannot go from {source} to {target}")
            return GradedMorphism.identity(self.cohomology(source))
        if name == "res":
            return self._restriction(source, target)
        if name == "const":
            return self._constant(source, target)
        named_map = self.named_map(name)
        if (named_map.source, named_map.target) != (source, target):
            raise MotivicaAtlasError(
                f"Map {name} goes from {named_map.source} to {named_map.target}, "
                f"not from {source} to {target}"
            )
        return named_map.morphism

    def _restriction(self, source: str, target: str) -> GradedMorphism:
        x, y = self.atom(source), self.atom(target)
        if source == target:
            return GradedMorphism.identity(x.cohomology)
        if y.dimension == 0 and y.components == 1 and x.components == 1:
            return _degree_zero_map(x.cohomology, y.cohomology, [[1]])
        big, small = PROJECTIVE_RE.match(x.name), PROJECTIVE_RE.match(y.name)
        if big and small and y.dimension <= x.dimension:
            return GradedMorphism.of(
                x.cohomology,
                y.cohomology,
                {
                    n: AbMorphism.identity(y.cohomology.at(n))
                    for n in y.cohomology.degrees()
                },
            )
        raise MotivicaAtlasError(f"No restriction rule from {source} to {target}")

    def _constant(self, source: str, target: str) -> GradedMorphism:
        x, y = self.atom(source), self.atom(target)
        if x.dimension != 0 or x.components != 1:
            raise MotivicaAtlasError(f"Map const needs a point as source, got {source}")
        return _degree_zero_map(x.cohomology, y.cohomology, [[1]] * y.components)


def _degree_zero_map(
    source: GradedGroup, target: GradedGroup, rows: list[list[int]]
) -> GradedMorphism:
    morphism = AbMorphism(source.at(0), target.at(0), IntMatrix.from_rows(rows))
    return GradedMorphism.of(source, target, {0: morphism})


@lru_cache(maxsize=1)
def builtin_atlas() -> Atlas:
    return Atlas(_builtin_records())
