import re
from typing import Annotated, Any, Literal, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    TypeAdapter,
    ValidationError,
    field_validator,
)

from motivica.exceptions import MotivicaParserError

ATOM_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
RESERVED_NAMES = {"L", "t", "u", "v"}


class Base(BaseModel):
    model_config = ConfigDict(
        extra="forbid",
        str_strip_whitespace=True,
        frozen=True,
    )


def validate_atom_name(name: str) -> str:
    if not ATOM_NAME_RE.match(name):
        raise ValueError(f"'{name}' is not a valid atom name")
    if name in RESERVED_NAMES:
        raise ValueError(f"'{name}' is reserved for polynomial variables")
    return name


class Atom(Base):
    kind: Literal["atom"]
    name: str = Field(..., description="Name of a smooth projective atom")
    dimension: int | None = Field(
        None, ge=0, description="Dimension, looked up in the atlas when omitted"
    )

    check_name = field_validator("name")(validate_atom_name)


class Empty(Base):
    kind: Literal["empty"]


class Point(Base):
    kind: Literal["point"]


class Affine(Base):
    kind: Literal["affine"]
    n: int = Field(..., ge=0, description="Dimension of the affine space")


class Proj(Base):
    kind: Literal["proj"]
    n: int = Field(..., ge=0, description="Dimension of the projective space")


class DisjointUnion(Base):
    kind: Literal["disjoint_union"]
    parts: list["VarietyExpr"] = Field(..., min_length=1)


class Product(Base):
    kind: Literal["product"]
    factors: list["VarietyExpr"] = Field(..., min_length=1)


class Complement(Base):
    kind: Literal["complement"]
    ambient: "VarietyExpr"
    closed: "VarietyExpr" = Field(..., description="Closed part, trusted to be closed")


class Cone(Base):
    kind: Literal["cone"]
    base: "VarietyExpr" = Field(..., description="Projective base of the affine cone")


class ProjBundle(Base):
    kind: Literal["proj_bundle"]
    base: "VarietyExpr"
    rank: int = Field(..., ge=1, description="Rank of the vector bundle")


class Blowup(Base):
    kind: Literal["blowup"]
    ambient: "VarietyExpr"
    center: "VarietyExpr"
    codim: int = Field(..., ge=1, description="Codimension of the smooth center")


class Fibration(Base):
    kind: Literal["fibration"]
    fiber: "VarietyExpr"
    base: "VarietyExpr"


VarietyExpr = Annotated[
    Union[
        Atom,
        Empty,
        Point,
        Affine,
        Proj,
        DisjointUnion,
        Product,
        Complement,
        Cone,
        ProjBundle,
        Blowup,
        Fibration,
    ],
    Field(discriminator="kind"),
]

for _model in DisjointUnion, Product, Complement, Cone, ProjBundle, Blowup, Fibration:
    _model.model_rebuild()

expression_adapter: TypeAdapter[VarietyExpr] = TypeAdapter(VarietyExpr)


def parse_expression(obj: Any, origin: str = "expression") -> VarietyExpr:
    try:
        return expression_adapter.validate_python(obj)
    except ValidationError as e:
        raise MotivicaParserError(f"Failed to parse {origin}.\n{e}")


def atom(name: str, dimension: int | None = None) -> Atom:
    return Atom(kind="atom", name=name, dimension=dimension)


def empty() -> Empty:
    return Empty(kind="empty")


def point() -> Point:
    return Point(kind="point")


def affine(n: int) -> Affine:
    return Affine(kind="affine", n=n)


def proj(n: int) -> Proj:
    return Proj(kind="proj", n=n)


def disjoint_union(*parts: VarietyExpr) -> DisjointUnion:
    return DisjointUnion(kind="disjoint_union", parts=list(parts))


def product(*factors: VarietyExpr) -> Product:
    return Product(kind="product", factors=list(factors))


def complement(ambient: VarietyExpr, closed: VarietyExpr) -> Complement:
    return Complement(kind="complement", ambient=ambient, closed=closed)


def cone(base: VarietyExpr) -> Cone:
    return Cone(kind="cone", base=base)


def proj_bundle(base: VarietyExpr, rank: int) -> ProjBundle:
    return ProjBundle(kind="proj_bundle", base=base, rank=rank)


def blowup(ambient: VarietyExpr, center: VarietyExpr, codim: int) -> Blowup:
    return Blowup(kind="blowup", ambient=ambient, center=center, codim=codim)


def fibration(fiber: VarietyExpr, base: VarietyExpr) -> Fibration:
    return Fibration(kind="fibration", fiber=fiber, base=base)
