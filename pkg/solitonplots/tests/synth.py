"""Hand-rolled writer matching the laboratory's CSV contract."""


def write_csv(path, schema, columns, rows):
    lines = [f"# schema: {schema}; columns: {','.join(columns)}"]
    for row in rows:
        lines.append(",".join(str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
