"""Versioned, deterministic JSON/CSV output."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

FORMAT_VERSION = "ljspec-output/1"


def fmt(x) -> str:
    """17 significant digits, enough to round-trip a double."""
    if isinstance(x, (bool, int, str)):
        return str(x)
    return format(float(x), ".17g")


def csv_text(header, rows, config=None) -> str:
    buf = io.StringIO()
    buf.write(f"# format: {FORMAT_VERSION}\n")
    if config is not None:
        buf.write("# config: " + json.dumps(config, sort_keys=True, separators=(",", ":")) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def json_text(payload: dict, config=None) -> str:
    doc = {"format": FORMAT_VERSION}
    if config is not None:
        doc["config"] = config
    doc.update(payload)
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=True) + "\n"


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path
