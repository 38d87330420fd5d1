"""Run outputs: schema-tagged CSV files and deterministic JSON summaries.

Every CSV starts with a single schema line

    # schema: <name>.v<k>; columns: a,b,c

followed by plain comma-separated rows.  Floats are written with repr
(shortest round-trip form), so identical runs produce byte-identical
files; the run manifest is the one deliberately non-reproducible output
(it carries wall-clock timing).
"""

from __future__ import annotations

import json
from pathlib import Path


def fmt_value(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool,)):
        return "true" if x else "false"
    if isinstance(x, (int,)):
        return str(x)
    return repr(float(x))


def write_csv(path, schema: str, columns: list[str], rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# schema: {schema}; columns: {','.join(columns)}"]
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row width {len(row)} != {len(columns)} columns")
        lines.append(",".join(fmt_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def read_csv(path) -> tuple[str, list[str], list[list[str]]]:
    text = Path(path).read_text().splitlines()
    head = text[0]
    if not head.startswith("# schema: ") or "; columns: " not in head:
        raise ValueError(f"{path}: missing schema header")
    schema, cols = head[len("# schema: "):].split("; columns: ", 1)
    return schema, cols.split(","), [line.split(",") for line in text[1:] if line]


def write_json(path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")
