"""Core dataset types, validation, and CSV ingestion shared by every module."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


def _as_vector(x, name: str = "vector") -> np.ndarray:
    """Coerce to a finite 1-D float64 feature vector."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] < 1:
        raise ValueError(f"{name} must be a non-empty 1-D sequence, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise ValueError(f"{name} contains non-finite values")
    return v


@dataclass(frozen=True)
class Dataset:
    """Immutable collection of d-dimensional feature vectors with optional integer labels.

    ``points`` is an (n, dim) float64 array; all values are finite. ``labels``,
    when present, is an (n,) array of non-negative integers. Instances are safe
    to share read-only across concurrent tasks.
    """

    points: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim != 2:
            raise ValueError(f"points must be a 2-D (n, dim) array, got shape {pts.shape}")
        n, dim = pts.shape
        if n < 1:
            raise ValueError("dataset must contain at least one point")
        if dim < 1:
            raise ValueError("dataset dimension must be at least 1")
        if not np.isfinite(pts).all():
            raise ValueError("points contain non-finite values")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            lab = np.array(self.labels, dtype=np.int64, copy=True)
            if lab.ndim != 1 or lab.shape[0] != n:
                raise ValueError(f"labels must be 1-D with one entry per point, got shape {lab.shape}")
            if (lab < 0).any():
                raise ValueError("labels must be non-negative integers")
            lab.flags.writeable = False
            object.__setattr__(self, "labels", lab)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def subset(self, indices) -> "Dataset":
        """New Dataset restricted to ``indices`` (labels carried along)."""
        idx = np.asarray(indices, dtype=np.int64)
        labels = None if self.labels is None else self.labels[idx]
        return Dataset(self.points[idx], labels)


@dataclass(frozen=True)
class MechanismParams:
    """Gaussian-mechanism parameters: privacy budget, L2 clip bound, noise scale."""

    epsilon: float
    delta: float
    clip: float
    sigma: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if not self.clip > 0:
            raise ValueError(f"clip must be positive, got {self.clip}")
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")


def validate_pair(real: Dataset, synthetic: Dataset) -> None:
    """Check that two datasets are comparable: equal dims, both of size >= 2."""
    if real.dim != synthetic.dim:
        raise ValueError(f"dimension mismatch: real has dim {real.dim}, synthetic has dim {synthetic.dim}")
    if len(real) < 2:
        raise ValueError(f"real dataset is undersized: {len(real)} point(s), need at least 2")
    if len(synthetic) < 2:
        raise ValueError(f"synthetic dataset is undersized: {len(synthetic)} point(s), need at least 2")


def _parse_cell(cell: str, line_no: int, col_no: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise ValueError(f"row {line_no}, column {col_no}: cannot parse {cell!r} as a number") from None
    if not math.isfinite(value):
        raise ValueError(f"row {line_no}, column {col_no}: non-finite value {cell!r}")
    return value


def _parse_label(cell: str, line_no: int, col_no: int) -> int:
    try:
        label = int(cell)
    except ValueError:
        raise ValueError(f"row {line_no}, column {col_no}: cannot parse {cell!r} as an integer label") from None
    if label < 0:
        raise ValueError(f"row {line_no}, column {col_no}: label must be non-negative, got {label}")
    return label


def _row_parses(cells: list[str], has_labels: bool) -> bool:
    """True when every cell of the row parses numerically (label column as int)."""
    try:
        for i, cell in enumerate(cells):
            if has_labels and i == len(cells) - 1:
                int(cell)
            else:
                value = float(cell)
                if not math.isfinite(value):
                    return False
    except ValueError:
        return False
    return True


def load_csv(path, has_labels: bool = False) -> Dataset:
    """Load a Dataset from CSV.

    Comma-separated, '.' decimal mark, optional single header row (detected by
    attempting a numeric parse of row 1). When ``has_labels``, the final column
    is read as a non-negative integer label. Blank lines are ignored. Errors
    name the offending row (physical line number) and column.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        raw = [(i + 1, row) for i, row in enumerate(csv.reader(fh))]
    rows = [(ln, [c.strip() for c in row]) for ln, row in raw if any(c.strip() for c in row)]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    if not _row_parses(rows[0][1], has_labels):
        if len(rows) == 1:
            # sole row is unparsable: report the bad cell, not a missing header
            for c, cell in enumerate(rows[0][1]):
                if has_labels and c == len(rows[0][1]) - 1:
                    _parse_label(cell, rows[0][0], c + 1)
                else:
                    _parse_cell(cell, rows[0][0], c + 1)
        rows = rows[1:]  # header row
        if not rows:
            raise ValueError(f"{path}: no data rows")

    ncols = len(rows[0][1])
    min_cols = 2 if has_labels else 1
    if ncols < min_cols:
        raise ValueError(f"{path}: rows have {ncols} column(s), need at least {min_cols}")
    points = np.empty((len(rows), ncols - 1 if has_labels else ncols), dtype=np.float64)
    labels = np.empty(len(rows), dtype=np.int64) if has_labels else None
    for r, (line_no, cells) in enumerate(rows):
        if len(cells) != ncols:
            raise ValueError(f"{path}: row {line_no} has {len(cells)} columns, expected {ncols}")
        for c, cell in enumerate(cells):
            if has_labels and c == ncols - 1:
                labels[r] = _parse_label(cell, line_no, c + 1)
            else:
                points[r, c] = _parse_cell(cell, line_no, c + 1)
    return Dataset(points, labels)


def save_csv(data: Dataset, path) -> None:
    """Write a Dataset to CSV with full round-trip float precision, no header."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for i in range(len(data)):
            cells = [repr(float(v)) for v in data.points[i]]
            if data.labels is not None:
                cells.append(str(int(data.labels[i])))
            fh.write(",".join(cells) + "\n")
