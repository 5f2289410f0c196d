"""Deterministic CSV/JSON writers shared by the command-line drivers.

Identical inputs must produce byte-identical files: floats are rendered with
17 significant digits, JSON keys are sorted, and no timestamps or host
details are embedded.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path


def format_value(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def write_csv(path, header: list[str], rows) -> None:
    path = Path(path)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def dump_json(path, obj) -> None:
    Path(path).write_text(
        json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def run_id(resolved_config: str, seed: int) -> str:
    digest = hashlib.sha256(f"{resolved_config}\nseed={seed}\n".encode()).hexdigest()
    return digest[:12]
