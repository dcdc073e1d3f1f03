"""Tabular input/output: datasets, label partitions, CSV reading and writing."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np


class DataError(ValueError):
    """Raised when input data fails validation."""


@dataclass(frozen=True)
class Dataset:
    values: np.ndarray
    feature_names: tuple[str, ...]
    labels: Optional[np.ndarray] = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise DataError(f"values must be a non-empty n x p matrix, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise DataError(f"non-finite value at row {bad[0]}, column {bad[1]}")
        names = tuple(self.feature_names) if self.feature_names else tuple(
            f"x{j + 1}" for j in range(values.shape[1]))
        if len(names) != values.shape[1]:
            raise DataError(f"{len(names)} feature names for {values.shape[1]} columns")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "feature_names", names)
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.shape != (values.shape[0],):
                raise DataError(f"labels have shape {labels.shape}, expected ({values.shape[0]},)")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class Partition:
    """Hard clustering with 1-based cluster indices.

    ``k`` may exceed the number of distinct labels actually used, which is how
    a fitted G-component model whose MAP partition leaves a component empty
    is represented.
    """

    assignments: np.ndarray
    k: int

    def __post_init__(self):
        a = np.asarray(self.assignments, dtype=np.int64)
        if a.ndim != 1:
            raise ValueError("assignments must be one-dimensional")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if a.size and (a.min() < 1 or a.max() > self.k):
            raise ValueError(f"assignments must lie in 1..{self.k}")
        object.__setattr__(self, "assignments", a)

    def __len__(self) -> int:
        return self.assignments.size

    @property
    def zero_based(self) -> np.ndarray:
        return self.assignments - 1

    @classmethod
    def from_labels(cls, labels: Sequence) -> "Partition":
        """Map distinct labels to 1..k in order of first appearance."""
        codes: dict = {}
        out = np.empty(len(labels), dtype=np.int64)
        for i, lab in enumerate(labels):
            out[i] = codes.setdefault(lab, len(codes) + 1)
        return cls(out, max(len(codes), 1))


def partition_from_labels(d: Dataset) -> Partition:
    if d.labels is None:
        raise DataError("dataset has no labels")
    return Partition.from_labels(list(d.labels))


def load_csv(path, label_column: Optional[str] = None) -> Dataset:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = [r for r in reader if r and any(c.strip() for c in r)]

    label_idx = None
    if label_column is not None:
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not found in {header}")
        label_idx = header.index(label_column)
    if not rows:
        raise DataError(f"{path}: no data rows")

    feature_idx = [j for j in range(len(header)) if j != label_idx]
    if not feature_idx:
        raise DataError(f"{path}: no feature columns")
    values = np.empty((len(rows), len(feature_idx)))
    labels = [] if label_idx is not None else None
    for i, row in enumerate(rows):
        # data rows are numbered from 2 so messages match the line in the file
        if len(row) != len(header):
            raise DataError(f"{path}: row {i + 2} has {len(row)} fields, header has {len(header)}")
        for out_j, j in enumerate(feature_idx):
            cell = row[j].strip()
            try:
                x = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: non-numeric value {cell!r} at row {i + 2}, column {header[j]!r}") from None
            if not math.isfinite(x):
                raise DataError(f"{path}: non-finite value {cell!r} at row {i + 2}, column {header[j]!r}")
            values[i, out_j] = x
        if labels is not None:
            labels.append(row[label_idx].strip())

    return Dataset(
        values=values,
        feature_names=tuple(header[j] for j in feature_idx),
        labels=None if labels is None else np.asarray(labels, dtype=object),
        metadata={"source": str(path)},
    )


def write_csv(d: Dataset, path, label_column: str = "label") -> Path:
    """Write ``d`` in the format ``load_csv`` reads (17 significant digits)."""
    path = Path(path)
    header = list(d.feature_names)
    if d.labels is not None:
        header.append(label_column)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(d.n):
            row = [format(x, ".17g") for x in d.values[i]]
            if d.labels is not None:
                row.append(str(d.labels[i]))
            w.writerow(row)
    return path


def write_metadata(d: Dataset, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(d.metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def standardize(d: Dataset) -> Dataset:
    """Center each column and scale it to unit sample standard deviation."""
    if d.n < 2:
        raise DataError("standardization needs at least two rows")
    mean = d.values.mean(axis=0)
    sd = d.values.std(axis=0, ddof=1)
    bad = [d.feature_names[j] for j in np.flatnonzero(~(sd > 0))]
    if bad:
        raise DataError(f"constant column(s) cannot be standardized: {', '.join(bad)}")
    meta = dict(d.metadata, standardized=True)
    return Dataset((d.values - mean) / sd, d.feature_names, d.labels, meta)
