from __future__ import annotations

import typing
from dataclasses import dataclass
from pathlib import Path

import tomlkit
from tomlkit.exceptions import ParseError

from ._cache import default_cache_dir
from ._qarith import CoeffRing

OutputFormat = typing.Literal["text", "json", "csv"]
FORMATS: tuple[OutputFormat, ...] = ("text", "json", "csv")
TABLE_COMMANDS = frozenset({"table", "oracle", "verify"})

DEFAULT_NMAX = 10
DEFAULT_JOBS = 1


@dataclass(frozen=True)
class RunConfig:
    command: str
    nmax: int
    coeff: CoeffRing
    format: OutputFormat = "text"
    cache_dir: Path | None = None
    jobs: int = DEFAULT_JOBS

    def __post_init__(self) -> None:
        if self.command in TABLE_COMMANDS and self.nmax < 2:  # noqa: PLR2004
            msg = f"--nmax must be at least 2, got {self.nmax}"
            raise ValueError(msg)
        if self.jobs < 1:
            msg = f"--jobs must be at least 1, got {self.jobs}"
            raise ValueError(msg)
        if self.format not in FORMATS:
            msg = f"Unknown output format '{self.format}' (expected text, json or csv)"
            raise ValueError(msg)


def read_config_file(cwd: Path | None = None) -> dict[str, typing.Any]:
    """Defaults from ``braidq.toml`` or the ``[tool.braidq]`` table of ``pyproject.toml``."""
    cwd = Path.cwd() if cwd is None else cwd
    local = cwd / "braidq.toml"
    try:
        if local.is_file():
            return tomlkit.parse(local.read_text(encoding="utf-8")).unwrap()
        pyproject = cwd / "pyproject.toml"
        if pyproject.is_file():
            data = tomlkit.parse(pyproject.read_text(encoding="utf-8")).unwrap()
            return data.get("tool", {}).get("braidq", {})
    except ParseError as e:
        msg = f"Invalid configuration file: {e}"
        raise ValueError(msg) from e
    return {}


def resolve_config(  # noqa: PLR0913
    command: str,
    *,
    coeff: str,
    nmax: int | str | None = None,
    output_format: str | None = None,
    cache_dir: str | None = None,
    jobs: int | str | None = None,
    cwd: Path | None = None,
) -> RunConfig:
    """Combine flags (already defaulted from the environment by click) with the
    configuration file and built-in defaults, in that order of precedence."""
    file = read_config_file(cwd)
    nmax = nmax if nmax is not None else file.get("nmax", DEFAULT_NMAX)
    jobs = jobs if jobs is not None else file.get("jobs", DEFAULT_JOBS)
    output_format = output_format or file.get("format", "text")
    directory = cache_dir or file.get("cache-dir")
    try:
        nmax, jobs = int(nmax), int(jobs)
    except (TypeError, ValueError) as e:
        msg = f"Expected integers for nmax and jobs, got {nmax!r} and {jobs!r}"
        raise ValueError(msg) from e
    return RunConfig(
        command=command,
        nmax=nmax,
        coeff=CoeffRing.try_from_specifier(coeff),
        format=typing.cast("OutputFormat", output_format),
        cache_dir=Path(directory) if directory else default_cache_dir(),
        jobs=jobs,
    )
