from __future__ import annotations

import csv
import io
import json
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Sequence


def format_value(value: Any) -> str:
    """CSV cell: floats with 17 significant digits, None as empty."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return str(value)


def format_csv(
    rows: Iterable[dict[str, Any]],
    columns: Sequence[str],
    timestamp: bool = False,
) -> str:
    buf = io.StringIO()
    if timestamp:
        buf.write(f"# generated {datetime.now(timezone.utc).isoformat()}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(col)) for col in columns])
    return buf.getvalue()


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def format_json(payload: Any) -> str:
    return json.dumps(_json_safe(payload), indent=2) + "\n"


def format_rows(
    rows: list[dict[str, Any]],
    columns: Sequence[str],
    fmt: str,
    timestamp: bool = False,
) -> str:
    if fmt == "json":
        return format_json([{col: row.get(col) for col in columns} for row in rows])
    return format_csv(rows, columns, timestamp)


def write_output(text: str, path: Path | None) -> None:
    if path is None:
        print(text, end="")
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def signal_rows(amplitudes) -> list[dict[str, Any]]:
    return [
        {"n": n, "re": float(a.real), "im": float(a.imag)}
        for n, a in enumerate(amplitudes)
        if a != 0
    ]
