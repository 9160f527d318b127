"""Result serialization shared by all simulator commands.

Records are flat mappings written either as CSV (header row mandatory,
stable column order, floats at 12 significant digits) or as a JSON
document matching ``RESULTS_JSON_SCHEMA``. Output is byte-deterministic:
no timestamps, no environment-dependent fields.
"""

from __future__ import annotations

import csv
import json

# Schema of the JSON result document (jsonschema draft 2020-12 dialect).
RESULTS_JSON_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["columns", "records"],
    "additionalProperties": False,
    "properties": {
        "columns": {"type": "array", "items": {"type": "string"}},
        "records": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": {"type": ["number", "string", "null"]},
            },
        },
    },
}


def format_value(value) -> str:
    """CSV cell rendering; floats carry 12 significant digits."""
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def round_floats(value):
    """Recursively round floats to 12 significant digits for JSON output."""
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_floats(v) for v in value]
    return value


def emit_results(records, path, fmt: str, columns) -> None:
    """Write records to ``path`` in the requested format.

    ``columns`` fixes the field order and makes an empty record list
    produce a header-only CSV rather than an empty file.
    """
    columns = list(columns)
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for record in records:
                writer.writerow([format_value(record.get(col)) for col in columns])
    elif fmt == "json":
        document = {"columns": columns, "records": [round_floats(dict(r)) for r in records]}
        write_json(document, path)
    else:
        raise ValueError(f"unknown output format {fmt!r}, expected csv or json")


def write_json(document, path) -> None:
    """Serialize a JSON document deterministically (12-digit floats)."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(round_floats(document), fh, indent=2)
        fh.write("\n")
