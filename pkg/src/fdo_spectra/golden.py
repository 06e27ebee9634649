"""Pinned regression values: a flat text file of `<key> <value> <abs_tol>` lines.

Values marked as derived-once (eigenvalues, inequality ratios, limit
deviations at standard parameters) are computed by their stated oracle,
frozen here, and asserted thereafter.  The packaged file ships at
fdo_spectra/data/golden.txt; the FDO_SPECTRA_GOLDEN environment variable
points somewhere else when set.
"""

from __future__ import annotations

import importlib.resources
import os
from pathlib import Path

from .errors import ParameterError

ENV_VAR = "FDO_SPECTRA_GOLDEN"


def golden_path() -> Path:
    override = os.environ.get(ENV_VAR)
    if override:
        return Path(override)
    return Path(str(importlib.resources.files("fdo_spectra") / "data" / "golden.txt"))


def load_golden(path: str | Path | None = None) -> dict[str, tuple[float, float]]:
    """Parse the key/value/tolerance table."""
    p = Path(path) if path is not None else golden_path()
    table: dict[str, tuple[float, float]] = {}
    for lineno, raw in enumerate(p.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParameterError(f"{p}:{lineno}: expected '<key> <value> <tol>', got {raw!r}")
        key, value, tol = parts
        table[key] = (float(value), float(tol))
    return table


def save_golden(table: dict[str, tuple[float, float]], path: str | Path) -> None:
    lines = ["# key  value  abs_tol"]
    for key in sorted(table):
        value, tol = table[key]
        lines.append(f"{key} {value!r} {tol!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def check_golden(key: str, value: float, table: dict[str, tuple[float, float]] | None = None) -> bool:
    """True iff value matches the pinned entry within its tolerance."""
    if table is None:
        table = load_golden()
    if key not in table:
        raise KeyError(f"no golden entry {key!r} in {golden_path()}")
    ref, tol = table[key]
    return abs(value - ref) <= tol
