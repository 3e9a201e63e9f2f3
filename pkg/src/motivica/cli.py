import sys
import traceback
from pathlib import Path
from typing import List, NoReturn, Optional

import typer
from rich.console import Console
from rich.table import Table

from motivica import __version__, logger
from motivica.atlas import Atlas
from motivica.blowup import check_blowup_exactness, check_motive_contractible
from motivica.complexes import AbComplex, ContractionResult, find_contraction
from motivica.demos import DEMOS, Demo, get_demo, is_demo
from motivica.exceptions import (
    MotivicaError,
    MotivicaParserError,
    MotivicaValidationError,
    MotivicaVerificationError,
)
from motivica.formatter import (
    Record,
    emit,
    format_polynomial,
    print_weight_table_as_rich_table,
    weight_lines,
)
from motivica.motives import (
    MotiveClass,
    class_of,
    euler_char,
    virtual_hodge,
    virtual_poincare,
)
from motivica.parser import (
    load_atlas,
    load_chow_data,
    load_complex,
    load_presentation,
    load_variety,
)
from motivica.weights import (
    Coefficients,
    DescentPresentation,
    parse_coefficients,
    virtual_betti_consistency,
    virtual_group_consistency,
    weight_table,
)

PARSE_ERROR_EXIT_CODE = 2
VALIDATION_ERROR_EXIT_CODE = 1
OUTPUT_FORMATS = ("plain", "records")


def validate_output_format(output_format: str) -> str:
    if output_format not in OUTPUT_FORMATS:
        raise typer.BadParameter(f"Expected one of {', '.join(OUTPUT_FORMATS)}")
    return output_format


def validate_coefficients(text: str) -> Coefficients:
    try:
        return parse_coefficients(text)
    except MotivicaParserError as e:
        raise typer.BadParameter(str(e))


option_verbose: bool = typer.Option(
    False,
    "--verbose",
    "-v",
    envvar="MOTIVICA_VERBOSE",
    help="Enable more logs.",
    callback=lambda v: logger.enable_debug(v),
)

option_output_format: str = typer.Option(
    "plain",
    "--format",
    "-f",
    envvar="MOTIVICA_FORMAT",
    help="Output format: plain or records (one JSON object per line).",
    callback=validate_output_format,
)

option_atlas_paths: Optional[List[Path]] = typer.Option(
    None,
    "--atlas",
    "-a",
    envvar="MOTIVICA_ATLAS",
    help="Atom file extending the built-in atlas. Can be used multiple times.",
)

argument_input: str = typer.Argument(
    ..., help="Path to an input file, or demo:<name> for a built-in dataset."
)


app = typer.Typer(no_args_is_help=True)


def error(
    exception: Exception, exit_code: int, command: str, output_format: str
) -> NoReturn:
    logger.error(str(exception))
    logger.debug(traceback.format_exc())
    if output_format == "records":
        record = Record(command=command, key="error", value=str(exception))
        logger.record(record.model_dump_json())
    sys.exit(exit_code)


def output(
    command: str, lines: list[tuple[str, str]], output_format: str, bare: bool = False
) -> None:
    for line in emit(command, lines, output_format == "records", bare):
        logger.record(line)


def load_class(argument: str, atlas: Atlas) -> MotiveClass:
    if is_demo(argument):
        return get_demo(argument).class_()
    return class_of(load_variety(Path(argument)), atlas)


def load_weight_input(argument: str, atlas: Atlas) -> tuple[DescentPresentation, Atlas]:
    if is_demo(argument):
        demo = get_demo(argument)
        if demo.presentation is None:
            raise MotivicaParserError(f"Demo {demo.name} has no presentation")
        return demo.presentation(), atlas
    presentation, atlas = load_presentation(Path(argument), atlas)
    if violations := presentation.ladder_violations(atlas):
        raise MotivicaValidationError(
            f"Presentation in {argument} breaks the dimension ladder:\n"
            + "\n".join(violations)
        )
    return presentation, atlas


def print_demos_as_rich_table(demos: list[Demo]) -> None:
    table = Table(box=None, pad_edge=False)
    table.add_column("name", style="bold")
    table.add_column("data")
    table.add_column("description")
    for demo in demos:
        table.add_row(demo.name, ", ".join(demo.kinds()), demo.description)
    console = Console(stderr=True)
    console.print(table)


@app.command("class", help="Class of a variety in the Grothendieck ring of motives.")
def class_(
    argument: str = argument_input,
    verbose: bool = option_verbose,
    output_format: str = option_output_format,
    atlas_paths: Optional[List[Path]] = option_atlas_paths,
) -> None:
    try:
        atlas = load_atlas(atlas_paths or [])
        c = load_class(argument, atlas)
        output("class", [("class", str(c))], output_format, bare=True)
    except MotivicaParserError as e:
        error(e, PARSE_ERROR_EXIT_CODE, "class", output_format)
    except MotivicaError as e:
        error(e, VALIDATION_ERROR_EXIT_CODE, "class", output_format)


@app.command(help="Virtual Poincaré polynomial of a variety.")
def betti(
    argument: str = argument_input,
    verbose: bool = option_verbose,
    output_format: str = option_output_format,
    atlas_paths: Optional[List[Path]] = option_atlas_paths,
) -> None:
    try:
        atlas = load_atlas(atlas_paths or [])
        poly = virtual_poincare(load_class(argument, atlas), atlas)
        output("betti", [("poincare", format_polynomial(poly))], output_format, True)
    except MotivicaParserError as e:
        error(e, PARSE_ERROR_EXIT_CODE, "betti", output_format)
    except MotivicaError as e:
        error(e, VALIDATION_ERROR_EXIT_CODE, "betti", output_format)


@app.command(help="Virtual Hodge polynomial of a variety.")
def hodge(
    argument: str = argument_input,
    verbose: bool = option_verbose,
    output_format: str = option_output_format,
    atlas_paths: Optional[List[Path]] = option_atlas_paths,
) -> None:
    try:
        atlas = load_atlas(atlas_paths or [])
        poly = virtual_hodge(load_class(argument, atlas), atlas)
        output("hodge", [("hodge", format_polynomial(poly))], output_format, True)
    except MotivicaParserError as e:
        error(e, PARSE_ERROR_EXIT_CODE, "hodge", output_format)
    except MotivicaError as e:
        error(e, VALIDATION_ERROR_EXIT_CODE, "hodge", output_format)


@app.command(help="Compactly supported Euler characteristic of a variety.")
def euler(
    argument: str = argument_input,
    verbose: bool = option_verbose,
    output_format: str = option_output_format,
    atlas_paths: Optional[List[Path]] = option_atlas_paths,
) -> None:
    try:
        atlas = load_atlas(atlas_paths or [])
        chi = euler_char(load_class(argument, atlas), atlas)
        output("euler", [("chi_c", str(chi))], output_format, bare=True)
    except MotivicaParserError as e:
        error(e, PARSE_ERROR_EXIT_CODE, "euler", output_format)
    except MotivicaError as e:
        error(e, VALIDATION_ERROR_EXIT_CODE, "euler", output_format)


@app.command(help="Integral weight spectral sequence of a presentation.")
def weights(
    argument: str = argument_input,
    verbose: bool = option_verbose,
    output_format: str = option_output_format,
    atlas_paths: Optional[List[Path]] = option_atlas_paths,
    coefficients: Coefficients = typer.Option(
        "Z",
        "--coeff",
        "-c",
        envvar="MOTIVICA_COEFF",
        help="Coefficients: Z, Q or Z/m with m >= 2.",
        parser=validate_coefficients,
    ),
    against: Optional[str] = typer.Option(
        None,
        "--against",
        help="Motive class the table must be consistent with, e.g. 'L - 1'.",
    ),
) -> None:
    try:
        atlas = load_atlas(atlas_paths or [])
        presentation, atlas = load_weight_input(argument, atlas)
        logger.title(
            f"Realizing a presentation with {presentation.length} column(s) "
            f"over {coefficients}"
        )
        table = weight_table(presentation, coefficients, atlas)
        if output_format == "plain":
            print_weight_table_as_rich_table(table)
        lines = weight_lines(table)
        failures: list[str] = []
        if against is not None:
            c = MotiveClass.parse(against)
            checks = [("betti", virtual_betti_consistency(presentation, c, atlas))]
            if coefficients.ring == "Z":
                checks.append(
                    ("groups", virtual_group_consistency(presentation, c, atlas))
                )
            for name, verdict in checks:
                lines.append((f"consistency {name}", "ok" if verdict.ok else "fails"))
                for n, expected, found in verdict.mismatches:
                    failures.append(
                        f"Degree {n}: class gives {expected}, presentation gives {found}"
                    )
        output("weights", lines, output_format)
        if failures:
            raise MotivicaVerificationError(
                f"Presentation is not consistent with {against}:\n" + "\n".join(failures)
            )
    except MotivicaParserError as e:
        error(e, PARSE_ERROR_EXIT_CODE, "weights", output_format)
    except MotivicaError as e:
        error(e, VALIDATION_ERROR_EXIT_CODE, "weights", output_format)


@app.command("blowup-check", help="Check the blow-up exact sequences on Chow data.")
def blowup_check(
    argument: str = argument_input,
    verbose: bool = option_verbose,
    output_format: str = option_output_format,
) -> None:
    try:
        if is_demo(argument):
            demo = get_demo(argument)
            if demo.chow_data is None:
                raise MotivicaParserError(f"Demo {demo.name} has no Chow data")
            chow_data = demo.chow_data()
        else:
            chow_data = load_chow_data(Path(argument))
        logger.title(f"Checking {chow_data.name}")
        verdicts = check_blowup_exactness(chow_data)
        lines = [
            (
                f"{v.direction} p={v.p}",
                "exact" if v.exact else "fails: " + ", ".join(v.failures),
            )
            for v in verdicts
        ]
        output("blowup-check", lines, output_format)
        if broken := [v for v in verdicts if not v.exact]:
            raise MotivicaVerificationError(
                f"{len(broken)} sequence(s) of {chow_data.name} are not exact"
            )
    except MotivicaParserError as e:
        error(e, PARSE_ERROR_EXIT_CODE, "blowup-check", output_format)
    except MotivicaError as e:
        error(e, VALIDATION_ERROR_EXIT_CODE, "blowup-check", output_format)


def contraction_of(argument: str, atlas: Atlas) -> ContractionResult:
    if not is_demo(argument):
        return find_contraction(load_complex(Path(argument)))
    demo = get_demo(argument)
    if demo.square is not None:
        return check_motive_contractible(demo.square())
    if demo.presentation is not None:
        presentation = demo.presentation()
        complex_: AbComplex = presentation.realize(atlas)
        return find_contraction(complex_)
    raise MotivicaParserError(f"Demo {demo.name} has no complex")


@app.command(help="Search for a contracting homotopy of a bounded complex.")
def contract(
    argument: str = argument_input,
    verbose: bool = option_verbose,
    output_format: str = option_output_format,
    atlas_paths: Optional[List[Path]] = option_atlas_paths,
) -> None:
    try:
        atlas = load_atlas(atlas_paths or [])
        result = contraction_of(argument, atlas)
        if result.homotopy is None:
            output("contract", [("contractible", "no")], output_format)
            raise MotivicaVerificationError(f"Not contractible: {result.diagnostic}")
        lines = [("contractible", "yes")]
        complex_ = result.homotopy.complex
        for i in range(complex_.start, complex_.end):
            h = result.homotopy.at(i)
            for n, morphism in h.maps:
                rows = [list(r) for r in morphism.matrix.data]
                lines.append((f"h[{i},{n}]", str(rows)))
        output("contract", lines, output_format)
    except MotivicaParserError as e:
        error(e, PARSE_ERROR_EXIT_CODE, "contract", output_format)
    except MotivicaError as e:
        error(e, VALIDATION_ERROR_EXIT_CODE, "contract", output_format)


@app.command(help="List built-in datasets.")
def demo(output_format: str = option_output_format) -> None:
    demos = [DEMOS[name] for name in sorted(DEMOS)]
    if output_format == "plain":
        print_demos_as_rich_table(demos)
    output("demo", [(d.name, d.description) for d in demos], output_format)


@app.command(help="Output motivica version.")
def version() -> None:
    logger.info(__version__)


def main() -> None:
    app()
