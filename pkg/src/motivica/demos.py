"""Built-in datasets, addressed on the command line as demo:<name>"""

from dataclasses import dataclass
from typing import Callable

from motivica.blowup import BlowupSquare, ChowData, p2_point, p2_point_square, p3_line
from motivica.exceptions import MotivicaParserError
from motivica.kummer import kummer_presentation
from motivica.motives import MotiveClass
from motivica.weights import (
    DescentPresentation,
    MotiveTerm,
    NCConfiguration,
    PresentationEntry,
    build_from_ncc,
    open_closed,
    product,
    restriction_map,
    single_atom,
)

DEMO_PREFIX = "demo:"


@dataclass(frozen=True)
class Demo:
    name: str
    description: str
    presentation: Callable[[], DescentPresentation] | None = None
    motive_class: str | None = None
    chow_data: Callable[[], ChowData] | None = None
    square: Callable[[], BlowupSquare] | None = None

    def kinds(self) -> list[str]:
        kinds = []
        if self.presentation is not None:
            kinds.append("presentation")
        if self.motive_class is not None:
            kinds.append("class")
        if self.chow_data is not None:
            kinds.append("chow")
        if self.square is not None:
            kinds.append("square")
        return kinds

    def class_(self) -> MotiveClass:
        if self.motive_class is None:
            raise MotivicaParserError(f"Demo {self.name} has no motive class")
        return MotiveClass.parse(self.motive_class)


def cstar() -> DescentPresentation:
    """P1 with the two points 0 and infinity removed"""
    return build_from_ncc(NCConfiguration("P1", 2, {(1,): "pt", (2,): "pt"}))


def nodal_cubic() -> DescentPresentation:
    """Normalization P1 and the node, glued along the two preimages of the node"""
    entries = []
    for k in range(2):
        entries.append(PresentationEntry(0, 0, k, 1, ("res",)))
        entries.append(PresentationEntry(0, 1, k, -1, ("id",)))
    return DescentPresentation(
        dimension=1,
        columns=(
            MotiveTerm((("P1",), ("pt",))),
            MotiveTerm((("pt",), ("pt",))),
        ),
        entries=tuple(entries),
    )


def affine_plane() -> DescentPresentation:
    complete, closed = single_atom("P2"), single_atom("P1")
    return open_closed(
        complete, closed, restriction_map(complete, closed, [(0, 0, 0, 1, "res")])
    )


def cstar_squared() -> DescentPresentation:
    return product(cstar(), cstar())


def p2_three_lines() -> DescentPresentation:
    """P2 minus three lines in general position"""
    strata: dict[tuple[int, ...], str | None] = {
        (1,): "P1",
        (2,): "P1",
        (3,): "P1",
        (1, 2): "pt",
        (1, 3): "pt",
        (2, 3): "pt",
        (1, 2, 3): None,
    }
    return build_from_ncc(NCConfiguration("P2", 3, strata))


def kummer_enriques() -> DescentPresentation:
    return product(kummer_presentation(), single_atom("Enriques"))


DEMOS: dict[str, Demo] = {
    demo.name: demo
    for demo in [
        Demo("cstar", "C* as P1 minus two points", cstar, "L - 1"),
        Demo("nodal-cubic", "Plane cubic with one node", nodal_cubic, "L"),
        Demo("affine-plane", "A2 as P2 minus a line", affine_plane, "L^2"),
        Demo("cstar-squared", "C* x C*", cstar_squared, "L^2 - 2*L + 1"),
        Demo(
            "p2-three-lines",
            "P2 minus three lines in general position",
            p2_three_lines,
            "L^2 - 2*L + 1",
        ),
        Demo(
            "kummer",
            "Singular Kummer surface of an abelian surface",
            kummer_presentation,
            "K3 - 16*L",
        ),
        Demo(
            "kummer-enriques",
            "Singular Kummer surface times an Enriques surface",
            kummer_enriques,
            "(K3 - 16*L)*Enriques",
        ),
        Demo("p2-point", "Chow groups of P2 blown up at a point", chow_data=p2_point),
        Demo("p3-line", "Chow groups of P3 blown up along a line", chow_data=p3_line),
        Demo(
            "blowup-p2",
            "Cohomology pullbacks of P2 blown up at a point",
            square=p2_point_square,
        ),
    ]
}


def is_demo(argument: str) -> bool:
    return argument.startswith(DEMO_PREFIX)


def get_demo(argument: str) -> Demo:
    name = argument.removeprefix(DEMO_PREFIX)
    if (demo := DEMOS.get(name)) is None:
        raise MotivicaParserError(
            f"Unknown demo: {name}. Available demos: {', '.join(sorted(DEMOS))}"
        )
    return demo
