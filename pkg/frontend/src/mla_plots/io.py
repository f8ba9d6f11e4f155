"""Readers for the solver's CSV snapshots and convergence tables."""

from __future__ import annotations

import csv

import numpy as np


class MissingColumns(Exception):
    """A CSV table lacks required columns."""


def read_csv_columns(path: str) -> dict:
    """Parse a headered CSV into {column: float array}."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [row for row in reader if row]
    data = np.array(rows, dtype=float)
    if data.ndim != 2 or data.shape[1] != len(header):
        raise MissingColumns(f"{path}: malformed table")
    return {name: data[:, i] for i, name in enumerate(header)}


def require(table: dict, names, path: str = "") -> list:
    missing = [n for n in names if n not in table]
    if missing:
        raise MissingColumns(f"{path}: missing columns {missing}; "
                             f"have {sorted(table)}")
    return [table[n] for n in names]


def snapshot_kind(table: dict) -> int:
    """Spatial dimensionality of a snapshot table (1 or 2)."""
    return 2 if "y" in table else 1
