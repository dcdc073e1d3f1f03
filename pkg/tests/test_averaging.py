import dataclasses

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mixavg.ari import adjusted_rand_index
from mixavg.averaging import (average_models, average_posteriors, brute_force_matching, harden,
                              match_components, match_means)
from mixavg.gpcm import e_step, em_fit, from_covariances
from mixavg.merge import apply_merge_to_z
from mixavg.occam import ReferencePolicy, occam_window


def with_bic(fit, bic_value):
    return dataclasses.replace(fit, bic=bic_value)


@pytest.fixture(scope="module")
def three_blobs():
    rng = np.random.default_rng(12)
    return np.vstack([rng.normal([0, 0], 1, (70, 2)), rng.normal([9, 0], 1, (70, 2)),
                      rng.normal([4, 8], 1, (70, 2))])


@pytest.fixture(scope="module")
def fits(three_blobs):
    out = {}
    for s, G in [("VVV", 3), ("EEE", 3), ("VVV", 2), ("EII", 4), ("VVI", 5)]:
        out[s, G] = em_fit(three_blobs, s, G, seed=1)
        assert out[s, G].converged
    return out


# ---- hardening and matching ---------------------------------------------

def test_harden_examples():
    assert harden([[0.7, 0.3]]).assignments.tolist() == [1]
    assert harden([[0.5, 0.5]]).assignments.tolist() == [1]
    assert harden([[0.2, 0.3, 0.5]]).k == 3


@given(st.integers(0, 2**32 - 1), st.integers(2, 5))
def test_harden_equivariant(seed, G):
    rng = np.random.default_rng(seed)
    z = rng.dirichlet(np.ones(G), size=15)
    perm = rng.permutation(G)
    inverse = np.argsort(perm)
    # column g of z[:, perm] is old column perm[g]
    assert (inverse[harden(z).zero_based] == harden(z[:, perm]).zero_based).all()


def test_match_examples():
    mu = np.array([[0.0, 0.0], [5.0, 0.0], [0.0, 5.0]])
    assert match_means(mu, mu).tolist() == [0, 1, 2]
    assert match_means(mu, mu[[1, 0, 2]]).tolist() == [1, 0, 2]
    with pytest.raises(ValueError):
        match_means(mu, mu[:2])


@given(st.integers(0, 2**32 - 1))
def test_matching_matches_exhaustive_search(seed):
    rng = np.random.default_rng(seed)
    ref, other = rng.normal(size=(4, 3)), rng.normal(size=(4, 3))
    perm, brute = match_means(ref, other), brute_force_matching(ref, other)
    cost = lambda p: np.sum((ref - other[p]) ** 2)
    assert cost(perm) == pytest.approx(cost(brute), rel=1e-12)
    assert sorted(perm.tolist()) == [0, 1, 2, 3]


def test_match_components_shape_check(fits):
    with pytest.raises(ValueError):
        match_components(fits["VVV", 3].params, fits["VVV", 2].params)


# ---- posterior averaging -------------------------------------------------

def test_singleton_window_is_best_model(fits):
    w = occam_window([fits["VVV", 3]])
    for policy in ReferencePolicy:
        a = average_posteriors(w, policy)
        np.testing.assert_array_equal(a.z, fits["VVV", 3].z)


def test_singleton_window_model_average(fits, three_blobs):
    best = fits["VVV", 3]
    ma = average_models(occam_window([best]), three_blobs)
    assert ma.params is best.params
    np.testing.assert_array_equal(ma.z, best.z)
    assert adjusted_rand_index(ma.partition, harden(best.z)) == 1.0


def test_rows_sum_to_one_with_merging(fits, three_blobs):
    members = [with_bic(fits["VVV", 3], 100.0), with_bic(fits["VVV", 2], 101.0),
               with_bic(fits["EII", 4], 102.0), with_bic(fits["VVI", 5], 103.0)]
    w = occam_window(members)
    for policy in ReferencePolicy:
        a = average_posteriors(w, policy)
        assert np.max(np.abs(a.z.sum(axis=1) - 1)) < 1e-10
    two = average_posteriors(w, ReferencePolicy.CASE_II)
    assert two.z.shape[1] == 2
    assert [c.merge is not None for c in two.contributions] == [True, False, True, True]
    one = average_posteriors(w, ReferencePolicy.CASE_I)
    assert one.z.shape[1] == 3 and len(one.contributions) == 3


def test_merged_member_aligned_to_reference(fits):
    """A 4-component fit that splits one blob merges back onto the 3-blob fit."""
    members = [with_bic(fits["VVV", 3], 50.0), with_bic(fits["EII", 4], 51.0)]
    a = average_posteriors(occam_window(members), ReferencePolicy.CASE_I)
    merged = a.contributions[1]
    assert merged.merge_ari > 0.95
    ref_part = harden(fits["VVV", 3].z)
    assert adjusted_rand_index(ref_part, harden(merged.z)) > 0.95
    agree = np.mean(harden(merged.z).assignments == ref_part.assignments)
    assert agree > 0.97          # labels, not just the partition, line up


def test_weight_gap_100(fits):
    dom = with_bic(fits["VVV", 2], 1000.0)
    other = with_bic(fits["VVV", 3], 1100.0)
    w = occam_window([dom, other], c=1e30)
    assert len(w) == 2
    a = average_posteriors(w, ReferencePolicy.CASE_II)
    assert np.max(np.abs(a.z - dom.z)) < 1e-20
    # and when the dominant member needs merging, the result is its merged, aligned z
    dom3 = with_bic(fits["VVV", 3], 1000.0)
    ref2 = with_bic(fits["VVV", 2], 1100.0)
    w = occam_window([dom3, ref2], c=1e30)
    a = average_posteriors(w, ReferencePolicy.CASE_II)
    c = a.contributions[[x.window_index for x in a.contributions].index(0)]
    target = apply_merge_to_z(dom3.z, c.merge)[:, c.order]
    assert np.max(np.abs(a.z - target)) < 1e-20


def test_equal_g_members_aligned_by_means(fits):
    base = fits["VVV", 3]
    order = np.array([2, 0, 1])
    shuffled = dataclasses.replace(base, params=base.params.permuted(order), z=base.z[:, order], bic=base.bic + 1)
    w = occam_window([base, shuffled])
    a = average_posteriors(w, ReferencePolicy.CASE_I)
    np.testing.assert_allclose(a.z, base.z, atol=1e-15)


def test_case_equivalence_when_best_has_fewest(fits):
    members = [with_bic(fits["VVV", 2], 10.0), with_bic(fits["VVV", 3], 11.0)]
    w = occam_window(members)
    one = average_posteriors(w, ReferencePolicy.CASE_I)
    two = average_posteriors(w, ReferencePolicy.CASE_II)
    np.testing.assert_array_equal(one.z, two.z)
    members = [with_bic(fits["VVV", 3], 10.0), with_bic(fits["VVV", 2], 11.0)]
    w = occam_window(members)
    assert average_posteriors(w, ReferencePolicy.CASE_I).z.shape[1] == 3
    assert average_posteriors(w, ReferencePolicy.CASE_II).z.shape[1] == 2


def test_missing_memberships_need_data(fits, three_blobs):
    bare = dataclasses.replace(fits["VVV", 3], z=None)
    w = occam_window([bare])
    with pytest.raises(ValueError, match="no memberships"):
        average_posteriors(w, ReferencePolicy.CASE_I)
    a = average_posteriors(w, ReferencePolicy.CASE_I, data=three_blobs)
    np.testing.assert_allclose(a.z, e_step(bare.params, three_blobs), rtol=0, atol=0)


# ---- model averaging -----------------------------------------------------

def test_two_identical_models(fits, three_blobs):
    base = fits["VVV", 3]
    twin = dataclasses.replace(base, structure="EEE", bic=base.bic + 1)
    ma = average_models(occam_window([base, twin]), three_blobs)
    np.testing.assert_allclose(ma.params.pi, base.params.pi, rtol=1e-14)
    np.testing.assert_allclose(ma.params.mu, base.params.mu, rtol=1e-14)
    np.testing.assert_allclose(ma.params.sigma, base.params.sigma, rtol=1e-13)
    assert ma.params.structure == "VVV"
    np.testing.assert_allclose(ma.z, base.z, atol=1e-12)


def test_model_average_uses_equal_g_members_only(fits, three_blobs):
    members = [with_bic(fits["VVV", 3], 10.0), with_bic(fits["VVV", 2], 11.0), with_bic(fits["EEE", 3], 12.0)]
    w = occam_window(members)
    ma = average_models(w, three_blobs)
    assert ma.subset == (0, 2)
    assert ma.weights.sum() == pytest.approx(1.0, abs=1e-15)
    expected = (ma.weights[0] * fits["VVV", 3].params.sigma
                + ma.weights[1] * fits["EEE", 3].params.sigma[ma.orders[1]])
    np.testing.assert_allclose(ma.params.sigma, expected, rtol=1e-13)


def test_averaged_covariances_are_spd_1000_trials():
    rng = np.random.default_rng(77)
    template = em_fit(np.arange(10.0)[:, None], "EII", 1, max_iter=0)
    for _ in range(1000):
        G, p = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        X = rng.normal(size=(10, p))
        members = []
        for i in range(3):
            B = rng.normal(size=(G, p, p))
            params = from_covariances("VVV", rng.dirichlet(np.ones(G)), rng.normal(size=(G, p)),
                                      B @ np.swapaxes(B, 1, 2) + 1e-3 * np.eye(p))
            members.append(dataclasses.replace(template, G=G, params=params, bic=float(i)))
        ma = average_models(occam_window(members, c=10), X)
        np.linalg.cholesky(ma.params.sigma)
        assert np.max(np.abs(ma.z.sum(axis=1) - 1)) < 1e-10
