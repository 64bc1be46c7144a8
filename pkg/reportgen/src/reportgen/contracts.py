"""Parsers for the run-directory file contracts.

Every parse failure raises ReportError with the file and the offending
line number; columns are never silently skipped."""

import csv
import json
import os

import numpy as np

CSV_COLUMNS = [
    "t", "l2_u", "l2_b", "hm_u", "hm_b", "hs_u", "hs_b", "hsp1_diss",
    "semi_dnu_neq_m2", "semi_dnu_neq_m1", "semi_dnu_neq_0",
    "semi_dnb_neq_m2", "semi_dnb_neq_m1", "semi_dnb_neq_0",
    "semi_ueq_m1", "semi_ueq_0", "semi_beq_m1", "semi_beq_0",
    "energy", "enstrophy",
]

SAMPLES_COLUMNS = ["n", "resolution", "case", "s", "l", "eta", "op_kind",
                   "lhs", "rhs", "ratio", "seed"]

# column sums derivable from the CSV alone (no norm computation involved)
DERIVED_SERIES = {
    "l2_pair": ("l2_u", "l2_b"),
    "hs_pair": ("hs_u", "hs_b"),
    "hm_pair": ("hm_u", "hm_b"),
    "semi_dn_pair_m1": ("semi_dnu_neq_m1", "semi_dnb_neq_m1"),
}


class ReportError(Exception):
    pass


def load_timeseries(path: str) -> dict:
    """Parse timeseries.csv into {column: np.ndarray}."""
    if not os.path.exists(path):
        raise ReportError(f"{path}: file not found")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ReportError(f"{path}: line 1: empty file, expected header")
    if rows[0] != CSV_COLUMNS:
        raise ReportError(
            f"{path}: line 1: header does not match contract "
            f"(got {len(rows[0])} columns, expected {len(CSV_COLUMNS)}: "
            f"{','.join(CSV_COLUMNS)})")
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(CSV_COLUMNS):
            raise ReportError(f"{path}: line {lineno}: expected "
                              f"{len(CSV_COLUMNS)} fields, got {len(row)}")
        try:
            data.append([float(x) for x in row])
        except ValueError as err:
            raise ReportError(f"{path}: line {lineno}: {err}") from None
    if not data:
        raise ReportError(f"{path}: line 2: no data rows")
    table = np.array(data)
    series = {name: table[:, i] for i, name in enumerate(CSV_COLUMNS)}
    if np.any(np.diff(series["t"]) <= 0.0):
        bad = int(np.argmax(np.diff(series["t"]) <= 0.0))
        raise ReportError(f"{path}: line {bad + 3}: time column is not "
                          f"strictly increasing")
    return series


def quantity_series(series: dict, quantity: str) -> np.ndarray:
    if quantity in DERIVED_SERIES:
        a, b = DERIVED_SERIES[quantity]
        return series[a] + series[b]
    if quantity not in series:
        raise ReportError(f"unknown quantity {quantity!r}")
    return series[quantity]


def load_summary(path: str) -> dict:
    if not os.path.exists(path):
        raise ReportError(f"{path}: file not found")
    with open(path) as fh:
        try:
            summary = json.load(fh)
        except json.JSONDecodeError as err:
            raise ReportError(f"{path}: line {err.lineno}: invalid JSON: "
                              f"{err.msg}") from None
    if not isinstance(summary, dict):
        raise ReportError(f"{path}: line 1: top level must be an object")
    return summary


def load_samples(path: str) -> dict:
    """Parse a commutator samples.csv into {column: np.ndarray of str/float}."""
    if not os.path.exists(path):
        raise ReportError(f"{path}: file not found")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != SAMPLES_COLUMNS:
        raise ReportError(f"{path}: line 1: header does not match the "
                          f"samples contract {','.join(SAMPLES_COLUMNS)}")
    numeric = {"n", "resolution", "case", "s", "l", "eta", "lhs", "rhs",
               "ratio", "seed"}
    cols = {name: [] for name in SAMPLES_COLUMNS}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(SAMPLES_COLUMNS):
            raise ReportError(f"{path}: line {lineno}: expected "
                              f"{len(SAMPLES_COLUMNS)} fields, got {len(row)}")
        for name, value in zip(SAMPLES_COLUMNS, row):
            if name in numeric:
                try:
                    value = float(value)
                except ValueError as err:
                    raise ReportError(
                        f"{path}: line {lineno}: {err}") from None
            cols[name].append(value)
    return {name: (np.array(vals) if name != "op_kind" else vals)
            for name, vals in cols.items()}
