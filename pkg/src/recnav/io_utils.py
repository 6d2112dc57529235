"""Atomic file writes and small CSV/JSON formatting helpers.

All writers go through a temp-file-plus-rename so a crashed command never
leaves a truncated output behind. Floats are serialized with ``repr`` (the
shortest round-trip form), which keeps repeated runs byte-identical.
"""

from __future__ import annotations

import json
import math
import os
from pathlib import Path
from typing import Iterable, Sequence


def fmt_value(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return "" if math.isnan(value) else repr(value)
    return str(value)


def atomic_write_text(path: Path | str, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_csv(path: Path | str, header: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_field(fmt_value(v)) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _csv_field(text: str) -> str:
    if any(c in text for c in ',"\n\r'):
        return '"' + text.replace('"', '""') + '"'
    return text


def write_json(path: Path | str, payload: object) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_sidecar(path: Path | str, payload: dict) -> Path:
    """Write ``<output>.json`` next to an output file; returns the sidecar path."""
    path = Path(path)
    sidecar = path.with_name(path.name + ".json")
    write_json(sidecar, payload)
    return sidecar


def read_sidecar(path: Path | str) -> dict:
    path = Path(path)
    sidecar = path.with_name(path.name + ".json")
    return json.loads(sidecar.read_text(encoding="utf-8"))
