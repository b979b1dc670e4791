import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import click
import pandas as pd
from rich.console import Console
from rich.table import Table

from utils.errors import InputOutputError

console = Console()

COLORS = ["cyan", "magenta", "yellow", "green", "blue", "red"]
TEXT_DIGITS = 6
FORMATS = ("text", "csv", "jsonl")


def format_value(value: Any, digits: int = TEXT_DIGITS) -> str:
    """Text form of a cell: floats to ``digits`` significant digits, None blank."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.{digits}g}"
    return str(value)


def print_table(
    rows: List[Dict[str, Any]],
    columns: Optional[Sequence[str]] = None,
    title: Optional[str] = None,
    out: Optional[Console] = None,
) -> None:
    """Prints rows as a colored table without lines; empty input prints the header only."""
    out = out or console
    if columns is None:
        columns = list(rows[0].keys()) if rows else []

    table = Table(title=title, show_lines=False)
    for index, header in enumerate(columns):
        table.add_column(f"[{COLORS[index % len(COLORS)]}]{header}[/]")

    for row in rows:
        table.add_row(*[format_value(row.get(header)) for header in columns])

    out.print(table)


def write_rows(
    rows: List[Dict[str, Any]],
    columns: Sequence[str],
    output_format: str = "text",
    destination: Optional[str] = None,
    title: Optional[str] = None,
) -> None:
    """Renders rows as text, CSV or JSON lines to stdout or a file.

    CSV and JSON lines keep every float at full precision.
    """
    if output_format not in FORMATS:
        raise InputOutputError(f"unknown output format '{output_format}'")
    try:
        if output_format == "text":
            if destination is None:
                print_table(rows, columns, title)
                return
            with open(destination, "w", encoding="utf-8") as handle:
                print_table(rows, columns, title, Console(file=handle, width=200))
            return
        if output_format == "csv":
            frame = pd.DataFrame(rows, columns=list(columns))
            text = frame.to_csv(index=False, lineterminator="\n")
        else:
            text = "".join(
                json.dumps({column: row.get(column) for column in columns}) + "\n"
                for row in rows
            )
        if destination is None:
            click.echo(text, nl=False)
        else:
            Path(destination).write_text(text, encoding="utf-8")
    except OSError as error:
        raise InputOutputError(f"cannot write '{destination}': {error.strerror}") from error
