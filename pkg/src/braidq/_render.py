from __future__ import annotations

import csv
import io
import typing

from rich.table import Table

from ._cache import dump_json

if typing.TYPE_CHECKING:
    from ._closedform import Monomial
    from ._exactla import CyclotomicTorsion
    from ._homology import HomologyGroup, HomologyTable, IntegralGroup, IntegralTable
    from ._qarith import CoeffRing
    from ._verify import CheckResult

EMPTY = "."
DIRECT_SUM = " ⊕ "


def table_title(coeff: CoeffRing) -> str:
    if coeff.kind == "integers":
        return "H_*(Br(n); Z[q^±1])"
    return f"H_*(Br(n); {coeff.label}[q^±1])"


def torsion_summands(torsion: CyclotomicTorsion) -> list[str]:
    return [
        f"φ_{m}" if e == 1 else f"φ_{m}^{e}"
        for m, e, mult in torsion.summands
        for _ in range(mult)
    ]


def field_cell(group: HomologyGroup) -> str:
    parts = torsion_summands(group.torsion)
    if group.free_rank:
        free = f"{group.coeff.label}[q^±1]"
        parts.append(free if group.free_rank == 1 else f"{free}^{group.free_rank}")
    return DIRECT_SUM.join(parts) or EMPTY


def integral_cell(group: IntegralGroup) -> str:
    parts = [f"Z_{p}" if k == 1 else f"Z_{p}^{k}" for p, k in group.torsion]
    if group.free_rank:
        parts.append("Z" if group.free_rank == 1 else f"Z^{group.free_rank}")
    return DIRECT_SUM.join(parts) or EMPTY


def to_ascii(text: str) -> str:
    return text.replace("φ", "phi").replace(DIRECT_SUM, " + ").replace("±", "+-")


def grid(title: str, cells: dict[tuple[int, int], str], nmax: int) -> str:
    """Rows ``H_l``, columns ``n = 2..nmax``; columns padded to their widest cell."""
    columns = list(range(2, nmax + 1))
    occupied = [l for (_, l), text in cells.items() if text != EMPTY]
    rows = range(max([nmax - 2, *occupied]) + 1)
    header = ["", *(str(n) for n in columns)]
    body = [
        [f"H_{l}", *(cells.get((n, l), EMPTY) for n in columns)] for l in rows
    ]
    widths = [max(len(row[i]) for row in [header, *body]) for i in range(len(header))]
    lines = [title, ""]
    for row in [header, *body]:
        line = " | ".join(text.ljust(width) for text, width in zip(row, widths))
        lines.append(line.rstrip())
    return "\n".join(lines) + "\n"


def render_text(table: HomologyTable, *, ascii_only: bool = False) -> str:
    cells = {
        (n, l): field_cell(g) for (n, l), g in table.groups.items() if n >= 2  # noqa: PLR2004
    }
    text = grid(table_title(table.coeff), cells, table.nmax)
    return to_ascii(text) if ascii_only else text


def render_integral_text(table: IntegralTable, *, ascii_only: bool = False) -> str:
    cells = {
        (n, l): integral_cell(g) for (n, l), g in table.groups.items() if n >= 2  # noqa: PLR2004
    }
    text = grid("H_*(Br(n); Z[q^±1])", cells, table.nmax)
    return to_ascii(text) if ascii_only else text


def render_json(table: HomologyTable | IntegralTable) -> str:
    return dump_json(table.to_json())


def render_csv(table: HomologyTable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["n", "l", "coeff", "free_rank", "m", "e", "mult"])
    for (n, l), g in sorted(table.groups.items()):
        if not g.torsion:
            writer.writerow([n, l, table.coeff.spec, g.free_rank, "", "", ""])
        for m, e, mult in g.torsion.summands:
            writer.writerow([n, l, table.coeff.spec, g.free_rank, m, e, mult])
    return buffer.getvalue()


def render_integral_csv(table: IntegralTable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["n", "l", "coeff", "free_rank", "p", "mult"])
    for (n, l), g in sorted(table.groups.items()):
        if not g.torsion:
            writer.writerow([n, l, "z", g.free_rank, "", ""])
        for p, mult in g.torsion:
            writer.writerow([n, l, "z", g.free_rank, p, mult])
    return buffer.getvalue()


def render_monomials(rows: typing.Iterable[tuple[int, int, Monomial]]) -> str:
    """One generator per line: ``n l monomial summand``."""
    lines = []
    for n, l, m in rows:
        summand = EMPTY
        if m.annihilator is not None:
            index, e = m.annihilator
            summand = f"φ_{index}" if e == 1 else f"φ_{index}^{e}"
        lines.append(f"{n}\t{l}\t{m}\t{summand}")
    return "\n".join(lines) + ("\n" if lines else "")


def format_duration(seconds: float) -> str:
    if seconds < 1:
        return f"[b]{seconds * 1000:.0f}[/b] ms"
    return f"[b]{seconds:.1f}[/b] s"


def report_table(results: typing.Sequence[CheckResult], title: str) -> Table:
    table = Table(title=title)
    table.add_column("check")
    table.add_column("status")
    table.add_column("time", justify="right")
    table.add_column("detail")
    for r in results:
        status = "[green]pass[/green]" if r.ok else "[bold red]fail[/bold red]"
        table.add_row(r.name, status, format_duration(r.seconds), r.detail)
    return table
