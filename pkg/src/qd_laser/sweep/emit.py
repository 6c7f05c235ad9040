import csv
import json
import math
import os
from typing import Dict, Iterable, List, Sequence

from ..utils import FLOAT_TEMPLATE, OUTPUT_FORMATS, RESULT_COLUMNS


def format_value(value) -> str:
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return FLOAT_TEMPLATE.format(value)
    return str(value)


def _json_value(value):
    if isinstance(value, float):
        rounded = float(FLOAT_TEMPLATE.format(value))
        return None if math.isnan(rounded) else rounded
    return value


def emit(records: Iterable[Dict[str, object]], path: str, fmt: str = "csv",
         columns: Sequence[str] = RESULT_COLUMNS) -> str:
    """
    Write result records with a fixed column order and 12 significant digits.

    Parameters:
    - records: Dicts keyed by column name (e.g. ResultRow.as_record()).
    - path: Output file; parent directories are created.
    - fmt: "csv" or "json" (a list of row objects; NaN is written as null).
    - columns: Column order.

    Returns:
    - The path written.
    """
    if fmt not in OUTPUT_FORMATS:
        raise ValueError(f"format must be one of {OUTPUT_FORMATS}, but got {fmt!r}.")
    rows: List[Dict[str, object]] = [{key: record.get(key) for key in columns} for record in records]
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_value(row[key]) for key in columns])
    else:
        payload = [{key: _json_value(row[key]) for key in columns} for row in rows]
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2)
            f.write("\n")
    return path
