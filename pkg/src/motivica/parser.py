import json
from pathlib import Path
from typing import Any, Iterable, Literal, TypeVar

from pydantic import BaseModel, Field, ValidationError, field_validator

from motivica import logger
from motivica.abelian import AbMorphism, FinAbGroup
from motivica.atlas import Atlas, AtomRecord, NamedMap, builtin_atlas
from motivica.blowup import (
    PULLBACK,
    PUSHFORWARD,
    ChowData,
    ChowGroups,
    ChowLevel,
    SquareMaps,
    expected_shapes,
)
from motivica.complexes import (
    AbComplex,
    GradedGroup,
    GradedMorphism,
    complex_from_rows,
)
from motivica.exceptions import MotivicaComplexError, MotivicaParserError
from motivica.expressions import Base, VarietyExpr, parse_expression, validate_atom_name
from motivica.linalg import IntMatrix
from motivica.weights import DescentPresentation, MotiveTerm, PresentationEntry

ModelT = TypeVar("ModelT", bound=BaseModel)


class GroupSpec(Base):
    rank: int = Field(0, ge=0, description="Rank of the free part")
    torsion: list[int] = Field(
        default_factory=list, description="Orders of cyclic torsion summands"
    )

    @field_validator("torsion")
    def _orders_are_at_least_two(cls, value: list[int]) -> list[int]:
        if any(d < 2 for d in value):
            raise ValueError("torsion orders must be at least 2")
        return value

    def to_group(self) -> FinAbGroup:
        return FinAbGroup.from_orders([0] * self.rank + self.torsion)


class AtomSpec(Base):
    name: str = Field(..., description="Atom name, used in expressions and presentations")
    dimension: int = Field(..., ge=0)
    cohomology: dict[int, GroupSpec] = Field(..., description="Integral cohomology")
    hodge: list[tuple[int, int, int]] | None = Field(
        None, description="Hodge numbers as [p, q, h] triples"
    )
    components: int = Field(1, ge=1, description="Number of connected components")

    check_name = field_validator("name")(validate_atom_name)

    def to_record(self) -> AtomRecord:
        return AtomRecord(
            name=self.name,
            dimension=self.dimension,
            cohomology=GradedGroup.of(
                {n: g.to_group() for n, g in self.cohomology.items()}
            ),
            hodge=(
                tuple(sorted(((p, q), h) for p, q, h in self.hodge if h))
                if self.hodge is not None
                else None
            ),
            components=self.components,
        )


class MapSpec(Base):
    name: str = Field(..., description="Name used by presentation entries")
    source: str = Field(..., description="Atom the classes are pulled back from")
    target: str = Field(..., description="Atom the classes are pulled back to")
    degrees: dict[int, list[list[int]]] = Field(
        ..., description="Per degree, matrix rows on canonical generators"
    )

    def to_named_map(self, atlas: Atlas) -> NamedMap:
        source, target = atlas.cohomology(self.source), atlas.cohomology(self.target)
        morphism = GradedMorphism.of(
            source,
            target,
            {
                n: AbMorphism.from_rows(source.at(n), target.at(n), rows)
                for n, rows in self.degrees.items()
            },
        )
        return NamedMap(self.name, self.source, self.target, morphism)


class AtomFile(Base):
    atoms: list[AtomSpec] = Field(default_factory=list)
    maps: list[MapSpec] = Field(default_factory=list)


class EntrySpec(Base):
    column: int = Field(..., ge=0, description="Source column")
    from_: int = Field(..., alias="from", ge=0, description="Slot in the source column")
    to: int = Field(..., ge=0, description="Slot in the next column")
    sign: Literal[-1, 1] = 1
    map: str | list[str] = Field("res", description="Named map, one per factor")


class PresentationFile(Base):
    dimension: int = Field(..., ge=0, description="Dimension of the presented variety")
    columns: list[list[str | list[str]]] = Field(
        ..., min_length=1, description="Per column, slots as atoms or atom products"
    )
    entries: list[EntrySpec] = Field(default_factory=list)
    atoms: list[AtomSpec] = Field(default_factory=list)
    maps: list[MapSpec] = Field(default_factory=list)


class ChowLevelSpec(Base):
    p: int = Field(..., ge=0)
    x: list[str] = Field(default_factory=list, description="Basis of the ambient group")
    y: list[str] = Field(default_factory=list, description="Basis of the center group")
    x_blown: list[str] = Field(default_factory=list)
    y_blown: list[str] = Field(default_factory=list)
    f: list[list[int]] | None = None
    g: list[list[int]] | None = None
    i: list[list[int]] | None = None
    j: list[list[int]] | None = None


class ChowFile(Base):
    name: str = "blow-up"
    codim: int = Field(..., ge=1, description="Codimension of the center")
    pushforwards: list[ChowLevelSpec] = Field(default_factory=list)
    pullbacks: list[ChowLevelSpec] = Field(default_factory=list)


class ComplexFile(Base):
    offset: int = Field(0, description="True index of the first column")
    columns: list[dict[int, GroupSpec]] = Field(..., min_length=1)
    differentials: list[dict[int, list[list[int]]]] = Field(default_factory=list)


def read_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise MotivicaParserError(
            f"Failed to parse {path} at line {e.lineno}, column {e.colno}: {e.msg}"
        )
    except UnicodeDecodeError:
        raise MotivicaParserError(f"File is not valid UTF-8: {path}")
    except FileNotFoundError:
        raise MotivicaParserError(f"File not found: {path}")
    except IsADirectoryError:
        raise MotivicaParserError(f"Path points to a directory: {path}")


def _validate(model: type[ModelT], obj: Any, what: str, path: Path) -> ModelT:
    try:
        return model.model_validate(obj)
    except ValidationError as e:
        raise MotivicaParserError(f"Failed to parse {what} in {path}.\n{e}")


def load_variety(path: Path) -> VarietyExpr:
    return parse_expression(read_json(path), origin=f"variety in {path}")


def extend_atlas(
    atlas: Atlas, atoms: Iterable[AtomSpec], maps: Iterable[MapSpec]
) -> Atlas:
    atlas = atlas.extend(records=[a.to_record() for a in atoms])
    return atlas.extend(maps=[m.to_named_map(atlas) for m in maps])


def load_atlas(paths: Iterable[Path], atlas: Atlas | None = None) -> Atlas:
    atlas = atlas or builtin_atlas()
    for path in paths:
        atom_file = _validate(AtomFile, read_json(path), "atom file", path)
        atlas = extend_atlas(atlas, atom_file.atoms, atom_file.maps)
        logger.debug(f"Loaded {len(atom_file.atoms)} atom(s) from {path}")
    return atlas


def _slot(slot: str | list[str]) -> tuple[str, ...]:
    factors = (slot,) if isinstance(slot, str) else tuple(slot)
    if not factors:
        raise MotivicaParserError("A slot needs at least one atom")
    return factors


def load_presentation(
    path: Path, atlas: Atlas | None = None
) -> tuple[DescentPresentation, Atlas]:
    """Presentation from a file, with the atlas extended by the atoms it declares"""
    document = _validate(PresentationFile, read_json(path), "presentation", path)
    atlas = extend_atlas(atlas or builtin_atlas(), document.atoms, [])
    presentation = DescentPresentation(
        dimension=document.dimension,
        columns=tuple(
            MotiveTerm(tuple(_slot(s) for s in column)) for column in document.columns
        ),
        entries=tuple(
            PresentationEntry(
                column=e.column,
                source=e.from_,
                target=e.to,
                sign=e.sign,
                maps=(e.map,) if isinstance(e.map, str) else tuple(e.map),
            )
            for e in document.entries
        ),
        maps=tuple(m.to_named_map(atlas) for m in document.maps),
    )
    return presentation, atlas


def _matrix(
    rows: list[list[int]] | None, shape: tuple[int, int], where: str
) -> IntMatrix:
    if rows is None:
        return IntMatrix.zeros(*shape)
    try:
        matrix = IntMatrix.from_rows(rows, shape[1])
    except ValueError as e:
        raise MotivicaParserError(f"Matrix {where}: {e}")
    if matrix.shape != shape:
        raise MotivicaParserError(
            f"Matrix {where} has shape {matrix.shape}, expected {shape}"
        )
    return matrix


def _level(entry: ChowLevelSpec, direction: str) -> ChowLevel:
    groups = ChowGroups(
        tuple(entry.x), tuple(entry.y), tuple(entry.x_blown), tuple(entry.y_blown)
    )
    shapes = expected_shapes(groups, direction)
    maps = {
        name: _matrix(getattr(entry, name), shape, f"{direction} {name} at p = {entry.p}")
        for name, shape in shapes.items()
    }
    return ChowLevel(entry.p, groups, SquareMaps(**maps))


def load_chow_data(path: Path) -> ChowData:
    document = _validate(ChowFile, read_json(path), "Chow data", path)
    return ChowData(
        name=document.name,
        codim=document.codim,
        pushforwards=tuple(_level(level, PUSHFORWARD) for level in document.pushforwards),
        pullbacks=tuple(_level(level, PULLBACK) for level in document.pullbacks),
    )


def load_complex(path: Path) -> AbComplex:
    document = _validate(ComplexFile, read_json(path), "complex", path)
    try:
        return complex_from_rows(
            [{n: g.to_group() for n, g in column.items()} for column in document.columns],
            document.differentials,
            document.offset,
        )
    except MotivicaComplexError as e:
        raise MotivicaComplexError(f"Invalid complex in {path}: {e}")
