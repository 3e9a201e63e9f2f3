from typing import TYPE_CHECKING, Iterable, Sequence

from pydantic import BaseModel
from rich.console import Console
from rich.table import Table
from sympy import Poly

from motivica.abelian import FinAbGroup

if TYPE_CHECKING:
    from motivica.motives import MotiveClass
    from motivica.weights import WeightTable


class Record(BaseModel):
    command: str
    key: str
    value: str


def _power(name: str, exponent: int) -> str:
    return name if exponent == 1 else f"{name}^{exponent}"


def _join_terms(terms: Iterable[tuple[int, str]]) -> str:
    """Signed sum of coefficient and monomial pairs, an empty monomial being 1"""
    text = ""
    for coefficient, monomial in terms:
        magnitude = abs(coefficient)
        if not monomial:
            body = str(magnitude)
        elif magnitude == 1:
            body = monomial
        else:
            body = f"{magnitude}*{monomial}"
        if not text:
            text = f"-{body}" if coefficient < 0 else body
        else:
            text += f" - {body}" if coefficient < 0 else f" + {body}"
    return text or "0"


def format_motive_class(c: "MotiveClass") -> str:
    """Highest degree first, atoms before L inside a monomial: K3*L^2 - 16*L + 1"""
    names = [str(g) for g in c.generators()]
    terms = []
    for exponents, coefficient in c.terms():
        factors = [_power(names[k], e) for k, e in enumerate(exponents) if e and k]
        if exponents[0]:
            factors.append(_power(names[0], exponents[0]))
        terms.append((coefficient, "*".join(factors)))
    return _join_terms(terms)


def format_polynomial(poly: Poly) -> str:
    """Lowest degree first: 1 + t^2 + t^4, or 1 + 2*u + u*v for two variables"""
    names = [str(g) for g in poly.gens]
    monomials = sorted(
        ((m, int(k)) for m, k in poly.terms() if k),
        key=lambda item: (sum(item[0]), tuple(-e for e in item[0])),
    )
    terms = []
    for exponents, coefficient in monomials:
        factors = [_power(names[k], e) for k, e in enumerate(exponents) if e]
        terms.append((coefficient, "*".join(factors)))
    return _join_terms(terms)


def format_group(group: FinAbGroup, ring: str = "Z") -> str:
    if ring == "Q":
        return "0" if not group.rank else _power("Q", group.rank)
    return str(group)


def format_betti(numbers: dict[int, int]) -> str:
    return ", ".join(f"h^{n} = {x}" for n, x in sorted(numbers.items())) or "0"


def weight_lines(table: "WeightTable") -> list[tuple[str, str]]:
    """Key and value pairs describing a weight table, in a fixed order"""
    ring = table.coefficients.ring
    lines = [
        (f"E2[{i},{n}]", format_group(group, ring)) for (i, n), group in table.entries
    ]
    if table.degenerate:
        for k, pieces in table.graded_pieces().items():
            for n, group in pieces:
                lines.append((f"grW_{n} H^{k}_c", format_group(group, ring)))
    else:
        lines.append(("degeneration", "E2 only"))
    if not table.coefficients.has_dimensions:
        lines.append(("chi_c", f"skipped, {table.coefficients} is not a field"))
        return lines
    for n, x in table.weight_euler().items():
        lines.append((f"h^{n}", str(x)))
    lines.append(("chi_c", str(table.compact_euler())))
    return lines


def emit(
    command: str, lines: Sequence[tuple[str, str]], records: bool, bare: bool = False
) -> list[str]:
    """Render result pairs as plain text or as one JSON record per line"""
    if records:
        return [
            Record(command=command, key=k, value=v).model_dump_json() for k, v in lines
        ]
    return [v if bare else f"{k} = {v}" for k, v in lines]


def print_weight_table_as_rich_table(table: "WeightTable") -> None:
    ring = table.coefficients.ring
    columns = range(table.filtration_length())
    weights = sorted({n for (_, n), _ in table.entries}, reverse=True)
    rich_table = Table(box=None, pad_edge=False, title=f"E2 over {table.coefficients}")
    rich_table.add_column("n", style="bold")
    for i in columns:
        rich_table.add_column(f"i={i}", justify="right")
    for n in weights:
        cells = []
        for i in columns:
            group = table.at(i, n)
            if group.is_zero():
                cells.append("[bright_black]0[/]")
            else:
                cells.append(format_group(group, ring))
        rich_table.add_row(str(n), *cells)
    console = Console(stderr=True)
    console.print(rich_table)
