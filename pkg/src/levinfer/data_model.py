"""Dataset container and CSV ingestion."""
from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True, eq=False)
class Dataset:
    """Design matrix ``X`` (N x p) and response ``Y`` (N).

    Arrays are copied to float64 and marked read-only.  Invariants are not
    enforced here; use :func:`validate` to list violations.
    """

    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64)
        Y = np.array(self.Y, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2 or Y.ndim != 1:
            raise DataError(f"X must be 2-d and Y 1-d, got shapes {X.shape} and {Y.shape}")
        X.flags.writeable = False
        Y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @property
    def N(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


def validate(dataset: Dataset) -> list[str]:
    """Return every invariant violation of ``dataset``; empty when valid."""
    problems = []
    X, Y = dataset.X, dataset.Y
    if X.shape[0] != Y.shape[0]:
        problems.append(f"row count of X ({X.shape[0]}) differs from length of Y ({Y.shape[0]})")
    if X.shape[1] < 1:
        problems.append("p must be at least 1")
    if X.shape[0] <= X.shape[1]:
        problems.append(f"N must exceed p (N={X.shape[0]}, p={X.shape[1]})")
    for i, j in np.argwhere(~np.isfinite(X)):
        problems.append(f"non-finite entry X[{i}, {j}] = {X[i, j]}")
    for (i,) in np.argwhere(~np.isfinite(Y)):
        problems.append(f"non-finite entry Y[{i}] = {Y[i]}")
    return problems


def _resolve_column(response_column, header, ncols):
    if isinstance(response_column, str) and not response_column.lstrip("-").isdigit():
        if header is None:
            raise DataError(f"response column {response_column!r} given by name but file has no header")
        if response_column not in header:
            raise DataError(f"response column {response_column!r} not found in header {header}")
        return header.index(response_column)
    idx = int(response_column)
    if not -ncols <= idx < ncols:
        raise DataError(f"response column index {idx} out of range for {ncols} columns")
    return idx % ncols


def load_csv(path, response_column="-1", has_header: bool = True) -> Dataset:
    """Read a numeric CSV file into a :class:`Dataset`.

    ``response_column`` is a header name or an integer index (negative counts
    from the end).  All remaining columns become predictors, in file order.
    Rows with missing fields are rejected.
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    header = None
    start = 1
    if has_header:
        if not rows:
            raise DataError("empty file")
        header = [h.strip() for h in rows[0]]
        rows = rows[1:]
        start = 2
    if not rows:
        raise DataError("file contains no data rows")
    ncols = len(header) if header is not None else len(rows[0])
    ycol = _resolve_column(response_column, header, ncols)

    values = np.empty((len(rows), ncols))
    for i, row in enumerate(rows):
        lineno = i + start
        if len(row) != ncols:
            raise DataError(f"line {lineno}: expected {ncols} fields, found {len(row)}", row=lineno)
        for j, cell in enumerate(row):
            cell = cell.strip()
            name = header[j] if header is not None else str(j)
            if cell == "":
                raise DataError(f"line {lineno}, column {name}: missing value", row=lineno, column=name)
            try:
                values[i, j] = float(cell)
            except ValueError:
                raise DataError(
                    f"line {lineno}, column {name}: cannot parse {cell!r} as a number",
                    row=lineno, column=name,
                ) from None
            if not np.isfinite(values[i, j]):
                raise DataError(f"line {lineno}, column {name}: non-finite value {cell!r}",
                                row=lineno, column=name)

    keep = [j for j in range(ncols) if j != ycol]
    if not keep:
        raise DataError("no predictor columns besides the response")
    dataset = Dataset(values[:, keep], values[:, ycol])
    if dataset.N <= dataset.p:
        raise DataError(f"N must exceed p (N={dataset.N}, p={dataset.p})")
    return dataset


def write_csv(dataset: Dataset, path, header=True, response_name="y"):
    """Write ``dataset`` with predictors first and the response last.

    Values use the shortest round-trip representation, so reloading is exact.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow([f"x{j + 1}" for j in range(dataset.p)] + [response_name])
        for xi, yi in zip(dataset.X, dataset.Y):
            w.writerow([repr(float(v)) for v in xi] + [repr(float(yi))])
