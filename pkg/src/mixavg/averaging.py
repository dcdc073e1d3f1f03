"""Weighted averaging of posterior memberships and of model parameters."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .data_io import Partition
from .gpcm import MixtureParams, e_step, from_covariances
from .merge import MergedModel, MergeMap, apply_merge_to_z, best_merge
from .occam import Reference, ReferencePolicy, WindowSet, select_reference


def harden(z) -> Partition:
    """MAP partition; ties go to the lowest component index."""
    z = np.asarray(z, dtype=float)
    return Partition(np.argmax(z, axis=1) + 1, z.shape[1])


def match_means(ref_means: np.ndarray, other_means: np.ndarray) -> np.ndarray:
    """Permutation ``perm`` minimizing sum_g ||ref[g] - other[perm[g]]||^2."""
    ref_means = np.asarray(ref_means, dtype=float)
    other_means = np.asarray(other_means, dtype=float)
    if ref_means.shape != other_means.shape:
        raise ValueError(f"mean arrays differ in shape: {ref_means.shape} vs {other_means.shape}")
    cost = np.sum((ref_means[:, None, :] - other_means[None, :, :]) ** 2, axis=2)
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(len(rows), dtype=np.int64)
    perm[rows] = cols
    return perm


def match_components(ref: MixtureParams, other: MixtureParams) -> np.ndarray:
    """Align ``other``'s components to ``ref``'s: ``other`` component ``perm[g]``
    corresponds to ``ref`` component g."""
    if ref.G != other.G or ref.p != other.p:
        raise ValueError(f"cannot match G={other.G}, p={other.p} to G={ref.G}, p={ref.p}")
    return match_means(ref.mu, other.mu)


def brute_force_matching(ref_means, other_means) -> np.ndarray:
    """Exhaustive search over all permutations; for checking small cases."""
    ref_means, other_means = np.asarray(ref_means), np.asarray(other_means)
    G = ref_means.shape[0]
    best, best_cost = None, np.inf
    for perm in itertools.permutations(range(G)):
        cost = np.sum((ref_means - other_means[list(perm)]) ** 2)
        if cost < best_cost:
            best, best_cost = np.array(perm), cost
    return best


@dataclass
class MemberContribution:
    window_index: int
    weight: float
    merge: Optional[MergeMap]     # None when no merging was needed
    merge_ari: Optional[float]
    order: np.ndarray             # column order aligning the (merged) member to the reference
    z: np.ndarray                 # aligned (merged) memberships


@dataclass
class PosteriorAverage:
    z: np.ndarray
    reference: Reference
    policy: ReferencePolicy
    contributions: list[MemberContribution]

    @property
    def partition(self) -> Partition:
        return harden(self.z)


def _member_z(member, data) -> np.ndarray:
    if getattr(member, "z", None) is not None:
        return np.asarray(member.z, dtype=float)
    if data is None:
        raise ValueError(f"no memberships stored for {member.structure} G={member.G} and no data given")
    return e_step(member.params, data)


def average_posteriors(window: WindowSet, policy: ReferencePolicy,
                       fits_z: Optional[Sequence[np.ndarray]] = None,
                       data=None) -> PosteriorAverage:
    """Weighted average of (merged, aligned) posterior memberships over the window.

    Members with more components than the reference are merged onto the
    reference partition with :func:`best_merge`, then their merged clusters are
    aligned to reference components by the proportion-weighted means of each
    cluster. Equal-G members are aligned by component means.
    """
    policy = ReferencePolicy(policy)
    ref = select_reference(window, policy)
    members = window.members
    zs = list(fits_z) if fits_z is not None else [_member_z(m, data) for m in members]

    ref_member = members[ref.index]
    ref_z = zs[ref.index]
    H = ref_member.G
    ref_partition = harden(ref_z)
    ref_means = ref_member.params.mu

    contributions = []
    total = np.zeros_like(ref_z)
    for w, i in zip(ref.weights, ref.subset):
        m, z = members[i], zs[i]
        merge, merge_ari = None, None
        if i == ref.index:
            order = np.arange(H)
        elif m.G == H:
            order = match_means(ref_means, m.params.mu)
        else:
            merge, merge_ari = best_merge(harden(z), ref_partition)
            z = apply_merge_to_z(z, merge)
            order = match_means(ref_means, MergedModel(m.params, merge).group_means())
        aligned = z[:, order]
        total += w * aligned
        contributions.append(MemberContribution(i, float(w), merge, merge_ari, order, aligned))
    return PosteriorAverage(total, ref, policy, contributions)


@dataclass
class ModelAverage:
    params: MixtureParams
    z: np.ndarray
    subset: tuple[int, ...]
    weights: np.ndarray
    orders: list[np.ndarray]

    @property
    def partition(self) -> Partition:
        return harden(self.z)


def average_models(window: WindowSet, data) -> ModelAverage:
    """Average the parameters of window members sharing the best model's G.

    Components are aligned to the best model by their means; proportions,
    means and full covariance matrices are averaged with renormalized weights
    and the result is an unconstrained (VVV-labelled) mixture.
    """
    best_i = window.reference_case_I
    best = window.members[best_i]
    subset = tuple(i for i, m in enumerate(window.members) if m.G == best.G)
    w = window.weights[list(subset)]
    w = w / w.sum()

    pi = np.zeros(best.G)
    mu = np.zeros_like(best.params.mu)
    sigma = np.zeros_like(best.params.sigma)
    orders = []
    for wi, i in zip(w, subset):
        params = window.members[i].params
        order = np.arange(best.G) if i == best_i else match_components(best.params, params)
        orders.append(order)
        pi += wi * params.pi[order]
        mu += wi * params.mu[order]
        sigma += wi * params.sigma[order]
    if len(subset) == 1:
        averaged = best.params
    else:
        averaged = from_covariances("VVV", pi / pi.sum(), mu, sigma)
    X = getattr(data, "values", data)
    return ModelAverage(averaged, e_step(averaged, X), subset, w, orders)
