"""Dataset ingestion and the log-space sample container.

CSV convention: one sample per row, inputs first and the output last, comma
delimited, '.' decimal separator, UTF-8. A header row is optional and is
detected by a non-numeric first line. With ``space="linear"`` every value
must be strictly positive and the natural log is applied at ingestion; with
``space="log"`` values are stored verbatim.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyFile,
    MalformedRow,
    NonFiniteSample,
    NonPositiveValue,
)


class SpaceOrigin(str, enum.Enum):
    """Whether the stored samples were log-transformed at ingestion."""

    LINEAR_TRANSFORMED = "linear_transformed"
    ALREADY_LOG = "already_log"


@dataclass(frozen=True)
class DataSet:
    """Immutable paired samples in log space.

    ``x`` has shape (n_points, n_dims), ``y`` shape (n_points,). Arrays are
    copied and marked read-only, so a DataSet can be shared freely across
    concurrent fit restarts.
    """

    x: np.ndarray
    y: np.ndarray
    space_origin: SpaceOrigin = SpaceOrigin.ALREADY_LOG

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.x, dtype=float)).copy()
        y = np.asarray(self.y, dtype=float).ravel().copy()
        if x.ndim != 2:
            raise DimensionMismatch(f"x must be 2-D, got ndim={x.ndim}")
        if x.shape[0] != y.shape[0]:
            raise DimensionMismatch(
                f"{x.shape[0]} input rows but {y.shape[0]} outputs")
        if x.shape[0] < 1:
            raise DimensionMismatch("a DataSet needs at least one point")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise MalformedRow("non-finite value in dataset")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n_points(self) -> int:
        return self.x.shape[0]

    @property
    def n_dims(self) -> int:
        return self.x.shape[1]


def _parse_row(fields: list[str], row_index: int) -> list[float]:
    values = []
    for field in fields:
        try:
            v = float(field)
        except ValueError:
            raise MalformedRow(
                f"row {row_index}: non-numeric field {field!r}") from None
        if not np.isfinite(v):
            raise MalformedRow(f"row {row_index}: non-finite value {field!r}")
        values.append(v)
    return values


def _is_numeric_line(fields: list[str]) -> bool:
    for field in fields:
        try:
            float(field)
        except ValueError:
            return False
    return True


def load_csv(path, space: str = "linear") -> DataSet:
    """Read a CSV of samples and return a DataSet in log space.

    ``space="linear"``: values (u, w) are checked strictly positive and
    stored as (log u, log w). ``space="log"``: values are stored verbatim.
    Row indices in error messages are 1-based and count the header if one
    is present.
    """
    if space not in ("linear", "log"):
        raise ValueError(f"space must be 'linear' or 'log', got {space!r}")
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    rows = []
    arity = None
    for i, line in enumerate(lines):
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if arity is None and not _is_numeric_line(fields):
            continue  # optional header
        values = _parse_row(fields, i + 1)
        if arity is None:
            arity = len(values)
            if arity < 2:
                raise MalformedRow(
                    f"row {i + 1}: need at least one input and one output")
        elif len(values) != arity:
            raise MalformedRow(
                f"row {i + 1}: expected {arity} fields, got {len(values)}")
        if space == "linear":
            for v in values:
                if v <= 0.0:
                    raise NonPositiveValue(
                        f"row {i + 1}: value {v} must be strictly positive "
                        "for linear-space ingestion")
        rows.append(values)
    if not rows:
        raise EmptyFile(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    if space == "linear":
        data = np.log(data)
        origin = SpaceOrigin.LINEAR_TRANSFORMED
    else:
        origin = SpaceOrigin.ALREADY_LOG
    return DataSet(x=data[:, :-1], y=data[:, -1], space_origin=origin)


def write_csv(data: DataSet, path, space: str = "linear") -> None:
    """Write a DataSet back to CSV, in original (exp) or log space.

    Values are serialized with repr precision so a load_csv round trip
    reproduces them to float accuracy.
    """
    if space not in ("linear", "log"):
        raise ValueError(f"space must be 'linear' or 'log', got {space!r}")
    x, y = data.x, data.y
    if space == "linear":
        x, y = np.exp(x), np.exp(y)
    with open(path, "w", encoding="utf-8") as fh:
        for j in range(data.n_points):
            fields = [repr(float(v)) for v in x[j]] + [repr(float(y[j]))]
            fh.write(",".join(fields) + "\n")


def sample_grid_2d(f: Callable[[float], float], lo: float, hi: float,
                   count: int) -> DataSet:
    """Sample a scalar function on an even grid, endpoints included.

    The result is a one-input DataSet tagged as already log space: the
    function is understood to act on log-transformed coordinates.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got {lo} >= {hi}")
    if count < 2:
        raise ValueError(f"need count >= 2, got {count}")
    xs = np.linspace(lo, hi, count)
    ys = np.empty(count)
    for j, xv in enumerate(xs):
        ys[j] = f(xv)
        if not np.isfinite(ys[j]):
            raise NonFiniteSample(f"f({xv}) = {ys[j]} is not finite")
    return DataSet(x=xs.reshape(-1, 1), y=ys,
                   space_origin=SpaceOrigin.ALREADY_LOG)
