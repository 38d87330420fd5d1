"""Schema-checked readers for laboratory run outputs.

Every CSV the laboratory writes starts with one header line

    # schema: <name>.v<k>; columns: a,b,c

and a figure must never be built from a file whose schema does not match
the plot kind: a wrong file is a hard error, not a blank plot.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class MissingInput(RuntimeError):
    """A file the plot kind requires does not exist."""


class SchemaMismatch(RuntimeError):
    """A file exists but does not carry the expected schema or columns."""


@dataclass(frozen=True)
class Table:
    path: Path
    schema: str
    columns: tuple[str, ...]
    data: np.ndarray            # shape (rows, columns), floats; bools as 0/1

    def col(self, name: str) -> np.ndarray:
        try:
            return self.data[:, self.columns.index(name)]
        except ValueError:
            raise SchemaMismatch(
                f"{self.path}: no column {name!r} in {self.columns}") from None

    @property
    def label(self) -> str:
        return self.path.stem


def _cell(text: str) -> float:
    if text == "true":
        return 1.0
    if text == "false":
        return 0.0
    if text == "":
        return np.nan
    return float(text)


def read_table(path, expect_schema: str) -> Table:
    path = Path(path)
    if not path.is_file():
        raise MissingInput(f"{path}: no such file")
    lines = path.read_text().splitlines()
    if not lines or not lines[0].startswith("# schema: ") \
            or "; columns: " not in lines[0]:
        raise SchemaMismatch(f"{path}: missing schema header")
    schema, cols = lines[0][len("# schema: "):].split("; columns: ", 1)
    if schema != expect_schema:
        raise SchemaMismatch(f"{path}: schema {schema!r}, "
                             f"this plot needs {expect_schema!r}")
    columns = tuple(cols.split(","))
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != len(columns):
            raise SchemaMismatch(f"{path}:{lineno}: {len(parts)} cells for "
                                 f"{len(columns)} columns")
        try:
            rows.append([_cell(p) for p in parts])
        except ValueError as exc:
            raise SchemaMismatch(f"{path}:{lineno}: {exc}") from None
    data = np.array(rows, dtype=float) if rows \
        else np.empty((0, len(columns)))
    return Table(path=path, schema=schema, columns=columns, data=data)


def load_summary(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise MissingInput(f"{path}: no such file")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"{path}: not valid JSON: {exc}") from None


def find_tables(dirpath, pattern: str, expect_schema: str) -> list[Table]:
    """All files matching the glob, each validated against the schema."""
    dirpath = Path(dirpath)
    hits = sorted(dirpath.glob(pattern))
    return [read_table(p, expect_schema) for p in hits]
