# app/api/commands.py
"""
Command-line surface.

    vilenkin-mra generate  --p 3 --l 1 --zeros 1 --chain 2,1 -o m.json
    vilenkin-mra verify    m.json [-o report.json]
    vilenkin-mra transform f.json --direction forward [-o F.json] [--format csv]
    vilenkin-mra atlas     --p 3 [--format csv] [--sample 50 --seed 7]
    vilenkin-mra template  --p 5 --N 1 --kind haar -o haar.json

Exit codes: 0 success / verdict true, 1 verdict false or atlas bound
counterexample, 2 usage error, 3 I/O or malformed input.
Results go to stdout (or -o); progress and summaries go to stderr.
"""
from __future__ import annotations

import logging
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Iterator, Optional, Tuple

import numpy as np
import typer
from rich.console import Console
from rich.table import Table

from app.config.settings import settings
from app.models.errors import FormatError, VilenkinError
from app.models.group import GroupParams
from app.models.masks import ElementarySpec
from app.services import mask_service
from app.services.atlas_service import AtlasService, sample_patterns
from app.services.mra_service import chain_self_test, generate_elementary, mra_report
from app.services.stepfun import fourier, inverse_fourier
from app.utils import serialization
from app.utils.logging import setup_logging

logger = logging.getLogger(__name__)

cli = typer.Typer(
    name="vilenkin-mra",
    help="Refinable step functions and orthogonal MRA on p-adic Vilenkin groups",
    add_completion=False,
    no_args_is_help=True,
)
err_console = Console(stderr=True)

EXIT_VERDICT = 1
EXIT_USAGE = 2
EXIT_IO = 3


class Direction(str, Enum):
    forward = "forward"
    inverse = "inverse"


class KernelChoice(str, Enum):
    fast = "fast"
    naive = "naive"


class OutputFormat(str, Enum):
    json = "json"
    csv = "csv"


class TemplateKind(str, Enum):
    haar = "haar"
    ones = "ones"


EpsOption = typer.Option(None, "--eps", help="Zero/one tolerance (default from settings, 1e-9)")
OutOption = typer.Option(None, "--output", "-o", help="Write here instead of stdout")


@contextmanager
def _exit_codes() -> Iterator[None]:
    try:
        yield
    except (OSError, FormatError) as exc:
        err_console.print(f"[bold red]I/O error:[/bold red] {exc}")
        raise typer.Exit(EXIT_IO)
    except VilenkinError as exc:
        err_console.print(f"[bold red]Error:[/bold red] {exc}")
        logger.debug("diagnostics: %s", exc.diagnostics())
        raise typer.Exit(EXIT_USAGE)


def _int_list(raw: str, flag: str) -> Tuple[int, ...]:
    if not raw.strip():
        return ()
    try:
        return tuple(int(part) for part in raw.split(","))
    except ValueError:
        raise typer.BadParameter(f"expected comma-separated integers, got {raw!r}", param_hint=flag)


def _check_eps(eps: Optional[float]) -> Optional[float]:
    if eps is not None and not 0.0 < eps <= 1e-3:
        raise typer.BadParameter(f"must lie in (0, 1e-3], got {eps}", param_hint="--eps")
    return eps


def _emit(text: str, output: Optional[Path]) -> None:
    if output is None:
        typer.echo(text, nl=False)
    else:
        Path(output).write_text(text, encoding="utf-8")
        err_console.print(f"[green]wrote[/green] {output}")


@cli.callback()
def main_callback(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log at DEBUG level"),
):
    setup_logging("DEBUG" if verbose else settings.log_level)


@cli.command()
def generate(
    p: int = typer.Option(..., "--p", help="Prime p >= 3"),
    l: int = typer.Option(..., "--l", help="Number of zeros on level 0, 1 <= l <= p-2"),
    zeros: str = typer.Option("", "--zeros", help="Zero set E, e.g. 1,3"),
    chain: str = typer.Option(..., "--chain", help="Chain top then the ordering of E, e.g. 4,3,1"),
    output: Optional[Path] = OutOption,
    eps: Optional[float] = EpsOption,
):
    """Build the 1-elementary mask with l zeros on level 0."""
    eps = _check_eps(eps)
    zero_set = _int_list(zeros, "--zeros")
    chain_values = _int_list(chain, "--chain")
    if not chain_values:
        raise typer.BadParameter("needs at least the chain top", param_hint="--chain")
    with _exit_codes():
        spec = ElementarySpec(
            params=GroupParams(p),
            l=l,
            zero_set=zero_set,
            chain_top=chain_values[0],
            chain_order=chain_values[1:],
        )
        mask = generate_elementary(spec, eps)
        check = chain_self_test(spec, mask, eps)
        necessary = mask_service.necessary_condition(mask, eps)
        err_console.print(
            f"p={p} l={l}: row sums {'ok' if necessary else 'FAIL'}, "
            f"chain self-test {'ok' if check.passed else 'FAIL'}"
        )
        _emit(serialization.dumps(serialization.mask_to_dict(mask)), output)


@cli.command()
def verify(
    mask_file: Path = typer.Argument(..., help="Mask JSON"),
    m_max: Optional[int] = typer.Option(None, "--m-max", help="Largest support exponent to try (default p-1)"),
    kernel: Optional[KernelChoice] = typer.Option(None, "--kernel"),
    zero_sets: bool = typer.Option(False, "--zero-sets", help="List the zero sets E_k in the validity section"),
    output: Optional[Path] = OutOption,
    eps: Optional[float] = EpsOption,
):
    """Run the full MRA report on a mask; exit 0 iff the verdict is true."""
    eps = _check_eps(eps)
    with _exit_codes():
        mask = serialization.mask_from_dict(serialization.read_json(mask_file), eps)
        report = mra_report(mask, m_max, eps, kernel.value if kernel else None, include_sets=zero_sets)
        _emit(serialization.dumps(serialization.model_to_dict(report)), output)

    table = Table(title=f"MRA report p={report.p} N={report.N}")
    table.add_column("check")
    table.add_column("result")
    for name in (
        "necessary_condition",
        "no_finite_support",
        "M",
        "mask_valid",
        "refinement_holds",
        "orthonormal_spectral",
        "orthonormal_direct",
        "support_min_shell",
        "density_hypothesis",
        "verdict",
    ):
        table.add_row(name, str(getattr(report, name)))
    err_console.print(table)
    if not report.verdict:
        raise typer.Exit(EXIT_VERDICT)


@cli.command()
def transform(
    table_file: Path = typer.Argument(..., help="Table JSON"),
    direction: Direction = typer.Option(Direction.forward, "--direction"),
    kernel: Optional[KernelChoice] = typer.Option(None, "--kernel"),
    fmt: OutputFormat = typer.Option(OutputFormat.json, "--format"),
    output: Optional[Path] = OutOption,
):
    """Fourier transform of a group-side table, or inverse of a spectral one."""
    with _exit_codes():
        table = serialization.table_from_dict(serialization.read_json(table_file))
        expected = "group" if direction is Direction.forward else "spectral"
        if table.side != expected:
            err_console.print(
                f"[bold red]Error:[/bold red] --direction {direction.value} needs a {expected} table, "
                f"got {table.side}"
            )
            raise typer.Exit(EXIT_USAGE)
        chosen = kernel.value if kernel else None
        result = fourier(table, chosen) if direction is Direction.forward else inverse_fourier(table, chosen)
        if fmt is OutputFormat.csv:
            _emit(serialization.table_to_csv(result), output)
        else:
            _emit(serialization.dumps(serialization.table_to_dict(result)), output)


@cli.command()
def atlas(
    p: int = typer.Option(..., "--p", help="Prime p"),
    budget: Optional[int] = typer.Option(None, "--budget", min=1, help="Largest pattern count to enumerate"),
    workers: Optional[int] = typer.Option(None, "--workers", min=1),
    l_min: Optional[int] = typer.Option(None, "--l-min"),
    l_max: Optional[int] = typer.Option(None, "--l-max"),
    sample: Optional[int] = typer.Option(None, "--sample", min=1, help="Evaluate this many random patterns instead"),
    seed: int = typer.Option(0, "--seed"),
    fmt: OutputFormat = typer.Option(OutputFormat.json, "--format"),
    output: Optional[Path] = OutOption,
    eps: Optional[float] = EpsOption,
):
    """Evaluate every elementary modulus pattern at p (or a random sample)."""
    eps = _check_eps(eps)
    with _exit_codes():
        params = GroupParams(p)
        service = AtlasService(budget=budget, workers=workers, eps=eps)
        if sample is not None:
            catalog = service.evaluate_many(params, sample_patterns(params, sample, np.random.default_rng(seed)))
        else:
            l_range = None
            if l_min is not None or l_max is not None:
                l_range = (l_min if l_min is not None else 0, l_max if l_max is not None else p - 1)
            catalog = service.enumerate_elementary(params, l_range)
        if fmt is OutputFormat.csv:
            _emit(serialization.catalog_to_csv(catalog), output)
        else:
            _emit(serialization.dumps(serialization.model_to_dict(catalog)), output)

    summary = catalog.summary
    err_console.print(
        f"p={p}: {summary.pattern_count} patterns, {summary.orthonormal_count} orthonormal, "
        f"sharp by l {summary.sharp_by_l}, bound {'holds' if summary.bound_holds else 'FAILS'}, "
        f"shell bound {'holds' if summary.shell_bound_holds else 'FAILS'}"
    )
    if not (summary.bound_holds and summary.shell_bound_holds):
        raise typer.Exit(EXIT_VERDICT)


@cli.command()
def template(
    p: int = typer.Option(..., "--p", help="Prime p"),
    N: int = typer.Option(1, "--N", min=1, help="Mask level N"),
    kind: TemplateKind = typer.Option(TemplateKind.haar, "--kind"),
    output: Optional[Path] = OutOption,
):
    """Write the Haar mask or the all-ones mask, ready for `verify`."""
    with _exit_codes():
        params = GroupParams(p)
        mask = mask_service.haar_mask(params, N) if kind is TemplateKind.haar else mask_service.constant_mask(params, N)
        _emit(serialization.dumps(serialization.mask_to_dict(mask)), output)
