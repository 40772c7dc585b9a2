"""Homology of braid groups with coefficients in K[q^{±1}]."""

from __future__ import annotations

import contextlib
import os
import sys
import time
import typing
from pathlib import Path

import click
import rich
from rich.console import Console

if typing.TYPE_CHECKING:
    from ._cache import ResultCache
    from ._config import RunConfig
    from ._qarith import CoeffRing

EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INCONSISTENT = 3


def _stderr() -> Console:
    return Console(file=sys.stderr, highlight=False)


@contextlib.contextmanager
def _guard(console: Console) -> typing.Iterator[None]:
    """Map library exceptions onto the exit-code contract."""
    from ._errors import InternalInconsistencyError

    try:
        yield
    except InternalInconsistencyError as e:
        console.print(
            f"[bold red]error[/bold red]: internal inconsistency "
            f"({type(e).__name__}): {e}"
        )
        sys.exit(EXIT_INCONSISTENT)
    except ValueError as e:
        console.print(f"[bold red]error[/bold red]: {e}")
        sys.exit(EXIT_USAGE)
    except OSError as e:
        console.print(f"[bold red]error[/bold red]: {e}")
        sys.exit(EXIT_USAGE)


def _open_cache(config: RunConfig, *, enabled: bool = True) -> ResultCache | None:
    from ._cache import ResultCache

    if not enabled or config.cache_dir is None:
        return None
    cache = ResultCache(config.cache_dir)
    cache.ensure_writable()
    return cache


def _progress(status: typing.Any) -> typing.Callable:  # noqa: ANN401
    from ._render import format_duration

    def report(n: int, coeff: CoeffRing, seconds: float, cached: bool) -> None:  # noqa: FBT001
        if cached:
            status.update(f"Loaded degree [b]{n}[/b] over {coeff.label} from cache")
        else:
            status.update(
                f"Computed degree [b]{n}[/b] over {coeff.label} "
                f"in {format_duration(seconds)}"
            )

    return report


def _summary(console: Console, what: str, start: float) -> None:
    from ._render import format_duration

    if console.is_terminal:
        console.print(f"{what} in {format_duration(time.perf_counter() - start)}")


coeff_option = click.option(
    "--coeff",
    type=click.STRING,
    default="q",
    show_default=True,
    help="Coefficient ring: z, q or fp:<p>.",
)
nmax_option = click.option(
    "--nmax",
    type=click.INT,
    default=None,
    help="Largest number of strands [default: 10, or `nmax` in braidq.toml].",
)
format_option = click.option(
    "--format",
    "output_format",
    type=click.Choice(["text", "json", "csv"]),
    default=lambda: os.environ.get("BRAIDQ_FORMAT"),
    help="Output format [default: text] [env: BRAIDQ_FORMAT=]",
)
cache_option = click.option(
    "--cache-dir",
    type=click.Path(file_okay=False),
    default=lambda: os.environ.get("BRAIDQ_CACHE"),
    help="Directory of cached results [default: ~/.cache/braidq] [env: BRAIDQ_CACHE=]",
)
jobs_option = click.option(
    "--jobs",
    "-j",
    type=click.INT,
    default=lambda: os.environ.get("BRAIDQ_JOBS"),
    help="Worker processes for independent degrees [default: 1] [env: BRAIDQ_JOBS=]",
)
ascii_option = click.option(
    "--ascii", "ascii_only", is_flag=True, help="Write phi and + instead of φ and ⊕."
)


@click.group()
@click.version_option(package_name="braidq")
def cli() -> None:
    """Homology of braid groups with coefficients in K[q^{±1}]."""


@cli.command()
@click.option(
    "--output-format",
    type=click.Choice(["json", "text"]),
    help="Output format [default: text]",
)
def version(output_format: str | None) -> None:
    """Display braidq's version."""
    from ._version import __version__

    if output_format == "json":
        sys.stdout.write(f'{{"version": "{__version__}"}}\n')
    else:
        sys.stdout.write(f"braidq {__version__}\n")


@cli.command()
@coeff_option
@nmax_option
@format_option
@cache_option
@jobs_option
@ascii_option
@click.option("--no-cache", is_flag=True, help="Neither read nor write cached results.")
def table(  # noqa: PLR0913
    *,
    coeff: str,
    nmax: int | None,
    output_format: str | None,
    cache_dir: str | None,
    jobs: int | None,
    ascii_only: bool,
    no_cache: bool,
) -> None:
    """Compute the homology table H_l(Br(n)) for 2 <= n <= NMAX."""
    from ._config import resolve_config
    from ._homology import compute_table, integral_table
    from ._render import (
        render_csv,
        render_integral_csv,
        render_integral_text,
        render_json,
        render_text,
    )

    console = _stderr()
    with _guard(console):
        config = resolve_config(
            "table",
            coeff=coeff,
            nmax=nmax,
            output_format=output_format,
            cache_dir=cache_dir,
            jobs=jobs,
        )
        cache = _open_cache(config, enabled=not no_cache)
        start = time.perf_counter()
        with console.status(f"Computing over {config.coeff.label}...") as status:
            progress = _progress(status)
            if config.coeff.kind == "integers":
                result = integral_table(
                    config.nmax, jobs=config.jobs, cache=cache, progress=progress
                )
            else:
                result = compute_table(
                    config.coeff,
                    config.nmax,
                    jobs=config.jobs,
                    cache=cache,
                    progress=progress,
                )
        _summary(console, f"Computed table over {config.coeff.label}", start)

    integral = config.coeff.kind == "integers"
    if config.format == "json":
        sys.stdout.write(render_json(result))
    elif config.format == "csv":
        sys.stdout.write(render_integral_csv(result) if integral else render_csv(result))
    elif integral:
        sys.stdout.write(render_integral_text(result, ascii_only=ascii_only))
    else:
        sys.stdout.write(render_text(result, ascii_only=ascii_only))


@cli.command()
@click.argument(
    "suite_arg",
    metavar="[SUITE]",
    type=click.Choice(["lemmas", "bockstein", "closedform", "stable", "all"]),
    required=False,
)
@click.option(
    "--suite",
    type=click.Choice(["lemmas", "bockstein", "closedform", "stable", "all"]),
    help="Suite to run [default: all]",
)
@coeff_option
@nmax_option
@click.option("--p", "prime", type=click.INT, help="Restrict prime-dependent checks to P.")
@click.option(
    "--mmax",
    type=click.INT,
    default=200,
    show_default=True,
    help="Largest index for the cyclotomic product check; the gcd classification stops at 60.",
)
@cache_option
@jobs_option
def verify(  # noqa: PLR0913
    *,
    suite_arg: str | None,
    suite: str | None,
    coeff: str,
    nmax: int | None,
    prime: int | None,
    mmax: int,
    cache_dir: str | None,
    jobs: int | None,
) -> None:
    """Run a verification suite; exits with 1 if any check fails."""
    from ._config import resolve_config
    from ._render import report_table
    from ._verify import VerifyOptions, run_suite

    console = _stderr()
    chosen = suite_arg or suite or "all"
    with _guard(console):
        config = resolve_config(
            "verify", coeff=coeff, nmax=nmax, cache_dir=cache_dir, jobs=jobs
        )
        options = VerifyOptions(
            coeff=config.coeff,
            nmax=config.nmax,
            p=prime,
            mmax=mmax,
            jobs=config.jobs,
            cache=_open_cache(config),
        )
        start = time.perf_counter()
        with console.status(f"Running [b]{chosen}[/b]...") as status:
            results = run_suite(
                chosen, options, on_check=lambda name: status.update(f"Checking {name}...")
            )
        _summary(console, f"Ran {len(results)} checks", start)

    title = f"verify {chosen} ({config.coeff.label}, n <= {config.nmax})"
    rich.print(report_table(results, title))
    if not all(r.ok for r in results):
        sys.exit(EXIT_FAILURE)


@cli.command()
@click.argument("action", type=click.Choice(["list", "clear", "stat"]))
@cache_option
def cache(*, action: str, cache_dir: str | None) -> None:
    """Inspect or clear the result cache."""
    from ._cache import ResultCache, default_cache_dir

    console = _stderr()
    directory = Path(cache_dir) if cache_dir else default_cache_dir()
    store = ResultCache(directory)
    with _guard(console):
        if action == "list":
            for entry in store.entries():
                created = entry.created.format_common_iso() if entry.created else "-"
                sys.stdout.write(
                    f"{entry.name}\t{entry.coeff}\tn={entry.n}\t{entry.size}\t{created}\n"
                )
        elif action == "clear":
            removed = store.clear()
            rich.print(f"Removed [b]{removed}[/b] entries from `[cyan]{directory}[/cyan]`")
        else:
            stat = store.stat()
            sys.stdout.write(
                f"directory: {stat.directory}\n"
                f"entries: {stat.entries}\n"
                f"bytes: {stat.size}\n"
                f"compute seconds: {stat.seconds:.3f}\n"
                f"stale: {stat.stale}\n"
            )


@cli.command()
@coeff_option
@nmax_option
@format_option
@ascii_option
@click.option("--monomials", is_flag=True, help="List the generating monomials.")
@click.option("--fields", is_flag=True, help="List the generators of each family.")
def oracle(  # noqa: PLR0913
    *,
    coeff: str,
    nmax: int | None,
    output_format: str | None,
    ascii_only: bool,
    monomials: bool,
    fields: bool,
) -> None:
    """Print the table predicted by the closed-form presentations."""
    from . import _closedform as closedform
    from ._config import resolve_config
    from ._render import (
        render_csv,
        render_integral_csv,
        render_integral_text,
        render_json,
        render_monomials,
        render_text,
        to_ascii,
    )

    console = _stderr()
    with _guard(console):
        config = resolve_config(
            "oracle", coeff=coeff, nmax=nmax, output_format=output_format
        )
        integral = config.coeff.kind == "integers"
        if (monomials or fields) and integral:
            msg = "--monomials and --fields need a field coefficient (q or fp:<p>)"
            raise ValueError(msg)
        if fields:
            lines = [
                f"φ_{index}: "
                + ", ".join(f"{s} (exterior)" if s.exterior else str(s) for s in symbols)
                for index, symbols in closedform.field_generators(
                    config.coeff, config.nmax
                ).items()
            ]
            text = "\n".join(lines) + "\n"
            sys.stdout.write(to_ascii(text) if ascii_only else text)
            return
        if monomials:
            rows = (
                (n, l, m)
                for n in range(2, config.nmax + 1)
                for l in range(n + 1)
                for m in closedform.enumerate_basis(config.coeff, n, l)
            )
            text = render_monomials(rows)
            sys.stdout.write(to_ascii(text) if ascii_only else text)
            return
        if integral:
            result = closedform.oracle_integral_table(config.nmax)
        else:
            result = closedform.oracle_table(config.coeff, config.nmax)

    if config.format == "json":
        sys.stdout.write(render_json(result))
    elif config.format == "csv":
        sys.stdout.write(render_integral_csv(result) if integral else render_csv(result))
    elif integral:
        sys.stdout.write(render_integral_text(result, ascii_only=ascii_only))
    else:
        sys.stdout.write(render_text(result, ascii_only=ascii_only))


@cli.command()
@click.argument("n", type=click.INT)
@coeff_option
def dump(*, n: int, coeff: str) -> None:
    """Write the degree-N bar complex and its boundaries as JSON."""
    from ._cache import dump_json
    from ._complexes import GradedComplex
    from ._qarith import CoeffRing

    console = _stderr()
    with _guard(console):
        ring = CoeffRing.try_from_specifier(coeff)
        if n < 1:
            msg = f"Expected N >= 1, got {n}"
            raise ValueError(msg)
        complex_json = GradedComplex.build(n, ring).to_json()
    sys.stdout.write(dump_json(complex_json))


def main() -> None:
    """Run the CLI."""
    cli()
