"""Contingency tables, the Rand index and the adjusted Rand index."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data_io import Partition


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray  # (r, c) integer co-occurrence counts

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def n(self) -> int:
        return int(self.counts.sum())


def _codes(p) -> tuple[np.ndarray, int]:
    if isinstance(p, Partition):
        return p.zero_based, p.k
    _, inv = np.unique(np.asarray(p), return_inverse=True)
    inv = inv.ravel()
    return inv, int(inv.max()) + 1 if inv.size else 0


def contingency(p1, p2) -> ContingencyTable:
    """Counts n_ij of items in cluster i of ``p1`` and cluster j of ``p2``.

    ``Partition`` arguments keep all k rows/columns even if some are empty;
    plain label arrays get one row/column per distinct label.
    """
    a, r = _codes(p1)
    b, c = _codes(p2)
    if a.size != b.size:
        raise ValueError(f"partitions have different lengths ({a.size} vs {b.size})")
    counts = np.zeros((r, c), dtype=np.int64)
    np.add.at(counts, (a, b), 1)
    return ContingencyTable(counts)


def _pairs(x) -> int:
    x = int(x)
    return x * (x - 1) // 2


def pair_counts(counts: np.ndarray) -> tuple[int, int, int, int]:
    """(sum C(n_ij,2), sum C(a_i,2), sum C(b_j,2), C(n,2)) as exact integers."""
    counts = np.asarray(counts)
    index = sum(_pairs(v) for v in counts.ravel() if v > 1)
    rows = sum(_pairs(v) for v in counts.sum(axis=1))
    cols = sum(_pairs(v) for v in counts.sum(axis=0))
    return index, rows, cols, _pairs(counts.sum())


def ari_from_counts(counts: np.ndarray) -> float:
    """Hubert-Arabie adjusted Rand index of a contingency table.

    When the expected and maximum index coincide (both partitions are all
    singletons or both are one cluster) the partitions are identical and 1 is
    returned.
    """
    index, rows, cols, total = pair_counts(counts)
    if total == 0:
        raise ValueError("the adjusted Rand index needs at least two items")
    # ARI = (index - rows*cols/total) / ((rows+cols)/2 - rows*cols/total), cleared of fractions
    num = 2 * (index * total - rows * cols)
    den = (rows + cols) * total - 2 * rows * cols
    if den == 0:
        return 1.0 if index == rows == cols else 0.0
    return num / den


def adjusted_rand_index(p1, p2) -> float:
    return ari_from_counts(contingency(p1, p2).counts)


def rand_index(p1, p2) -> float:
    """Fraction of item pairs on which the two partitions agree."""
    index, rows, cols, total = pair_counts(contingency(p1, p2).counts)
    if total == 0:
        raise ValueError("the Rand index needs at least two items")
    return (total + 2 * index - rows - cols) / total
