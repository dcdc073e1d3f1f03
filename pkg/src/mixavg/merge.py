"""Merging mixture components onto a reference clustering by maximizing the ARI.

A candidate model with G components is merged onto H clusters by choosing H
"anchor" components (one per target cluster, in index order) and assigning
each remaining component to any target. Every such map is scored by the ARI
between the merged MAP partition and the reference partition.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy.special import logsumexp

from .ari import adjusted_rand_index, ari_from_counts, contingency
from .data_io import Partition
from .gpcm import MixtureParams
from .gpcm.density import weighted_log_densities

MAX_CANDIDATES = 10**8


class MergeSearchTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class MergeMap:
    """Surjection from G source components onto H clusters.

    ``assignment[g]`` is the 1-based target cluster of source component g
    (0-based position).
    """

    assignment: tuple[int, ...]
    H: int

    def __post_init__(self):
        a = tuple(int(v) for v in self.assignment)
        object.__setattr__(self, "assignment", a)
        if self.H < 1 or self.H > len(a):
            raise ValueError(f"need 1 <= H <= G, got H={self.H}, G={len(a)}")
        if set(a) != set(range(1, self.H + 1)):
            raise ValueError(f"merge map {a} is not onto 1..{self.H}")

    @property
    def G(self) -> int:
        return len(self.assignment)

    @property
    def groups(self) -> tuple[tuple[int, ...], ...]:
        """0-based source components of each target cluster."""
        return tuple(tuple(g for g, t in enumerate(self.assignment) if t == j + 1)
                     for j in range(self.H))

    @property
    def index(self) -> np.ndarray:
        return np.asarray(self.assignment, dtype=np.int64) - 1

    @classmethod
    def identity(cls, G: int) -> "MergeMap":
        return cls(tuple(range(1, G + 1)), G)


def apply_merge_to_partition(p: Partition, m: MergeMap) -> Partition:
    if p.k != m.G:
        raise ValueError(f"partition has k={p.k}, merge map expects G={m.G}")
    return Partition(m.index[p.zero_based] + 1, m.H)


def apply_merge_to_z(z: np.ndarray, m: MergeMap) -> np.ndarray:
    """Sum the membership columns of components merged into the same cluster."""
    z = np.asarray(z, dtype=float)
    if z.ndim != 2 or z.shape[1] != m.G:
        raise ValueError(f"z has {z.shape[-1]} columns, merge map expects {m.G}")
    out = np.zeros((z.shape[0], m.H))
    for g, t in enumerate(m.index):
        out[:, t] += z[:, g]
    return out


def count_candidates(G: int, H: int) -> int:
    if not 1 <= H <= G:
        raise ValueError(f"need 1 <= H <= G, got G={G}, H={H}")
    return math.comb(G, H) * H ** (G - H)


def _candidate_arrays(G: int, H: int) -> Iterator[np.ndarray]:
    for anchors in itertools.combinations(range(G), H):
        rest = [g for g in range(G) if g not in anchors]
        for tail in itertools.product(range(H), repeat=G - H):
            a = np.empty(G, dtype=np.int64)
            a[list(anchors)] = np.arange(H)
            a[rest] = tail
            yield a


def enumerate_candidates(G: int, H: int) -> Iterator[MergeMap]:
    """All anchor-combination x remainder-assignment maps, in enumeration order.

    Yields C(G, H) * H**(G - H) maps; every surjection appears at least once.
    """
    count_candidates(G, H)
    for a in _candidate_arrays(G, H):
        yield MergeMap(tuple(a + 1), H)


def _k(p) -> Partition:
    if isinstance(p, Partition):
        return p
    a = np.asarray(p, dtype=np.int64)
    return Partition(a, int(a.max()))


def best_merge(candidate, reference) -> tuple[MergeMap, float]:
    """Merge map of ``candidate`` (k=G) onto ``reference`` (k=H) with the largest ARI.

    Ties keep the earliest candidate in enumeration order.
    """
    cand, ref = _k(candidate), _k(reference)
    if len(cand) != len(ref):
        raise ValueError(f"partitions have different lengths ({len(cand)} vs {len(ref)})")
    G, H = cand.k, ref.k
    if H > G:
        raise ValueError(f"cannot merge {G} components onto {H} clusters")
    total = count_candidates(G, H)
    if total > MAX_CANDIDATES:
        raise MergeSearchTooLarge(
            f"merging {G} components onto {H} needs {total} candidates (limit {MAX_CANDIDATES}); "
            "use a smaller window (lower c) or a narrower G range")
    # rows: candidate components; merged tables are row-sums of this table
    base = contingency(cand, ref).counts
    best_a, best_ari = None, -math.inf
    for a in _candidate_arrays(G, H):
        table = np.zeros((H, H), dtype=np.int64)
        np.add.at(table, a, base)
        ari = ari_from_counts(table)
        if ari > best_ari:
            best_a, best_ari = a, ari
    return MergeMap(tuple(best_a + 1), H), best_ari


def brute_force_merge_oracle(candidate, reference) -> float:
    """Exhaustive maximum ARI over every surjection of G components onto H clusters."""
    cand, ref = _k(candidate), _k(reference)
    G, H = cand.k, ref.k
    if G > 8:
        raise ValueError("brute-force oracle is limited to G <= 8")
    if H > G:
        raise ValueError(f"cannot merge {G} components onto {H} clusters")
    best = -math.inf
    for s in itertools.product(range(H), repeat=G):
        if len(set(s)) < H:
            continue
        merged = np.asarray(s)[cand.zero_based] + 1
        best = max(best, adjusted_rand_index(ref, Partition(merged, H)))
    return best


@dataclass(frozen=True)
class MergedModel:
    """A G-component mixture regrouped into H clusters; the density is unchanged."""

    source: MixtureParams
    merge: MergeMap

    @property
    def groups(self) -> tuple[tuple[int, ...], ...]:
        return self.merge.groups

    @property
    def pi_star(self) -> np.ndarray:
        return np.array([self.source.pi[list(g)].sum() for g in self.groups])

    def group_means(self) -> np.ndarray:
        """Proportion-weighted mean of the component means in each cluster."""
        pi, mu = self.source.pi, self.source.mu
        return np.array([pi[list(g)] @ mu[list(g)] / pi[list(g)].sum() for g in self.groups])

    def cluster_log_densities(self, X) -> np.ndarray:
        """(n, H) matrix of log f*_j(x_i)."""
        lw = weighted_log_densities(np.atleast_2d(X), self.source)
        out = np.empty((lw.shape[0], self.merge.H))
        pi_star = self.pi_star
        for j, g in enumerate(self.groups):
            out[:, j] = logsumexp(lw[:, list(g)], axis=1) - math.log(pi_star[j])
        return out

    def log_density(self, X) -> np.ndarray:
        return logsumexp(self.cluster_log_densities(X) + np.log(self.pi_star), axis=1)
