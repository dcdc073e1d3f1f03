"""Constrained covariance M-steps for the ten closed-form GPCM structures.

Notation: ``W[g] = sum_i z_ig (x_i - mu_g)(x_i - mu_g)'`` is the weighted
within-component scatter and ``nk[g] = sum_i z_ig``. Each estimator returns
the (volume, shape, orientation) factors of the constrained maximizer.
"""

from __future__ import annotations

import numpy as np

from .params import MixtureParams, compose, decompose
from .structures import check_structure

EPS_MASS = 1e-8          # minimum component mass, as a fraction of n
MIN_RCOND = 1e-10        # smallest eigenvalue ratio accepted as a factorization
RIDGE = 1e-8             # ridge, as a fraction of trace/p
INNER_TOL = 1e-10
INNER_MAX_ITER = 200


class DegenerateFitError(RuntimeError):
    """Empty component or singular covariance; the restart cannot continue."""


def _geomean(a: np.ndarray, axis=-1) -> np.ndarray:
    return np.exp(np.mean(np.log(a), axis=axis))


def _identity(G: int, p: int) -> np.ndarray:
    return np.broadcast_to(np.eye(p), (G, p, p)).copy()


def _eii(W, nk, n, p):
    G = nk.size
    lam = np.trace(W.sum(axis=0)) / (n * p)
    return np.full(G, lam), np.ones((G, p)), _identity(G, p)


def _vii(W, nk, n, p):
    G = nk.size
    lam = np.trace(W, axis1=1, axis2=2) / (p * nk)
    return lam, np.ones((G, p)), _identity(G, p)


def _eei(W, nk, n, p):
    G = nk.size
    d = np.diagonal(W.sum(axis=0)) / n
    lam = _geomean(d)
    return np.full(G, lam), np.tile(d / lam, (G, 1)), _identity(G, p)


def _evi(W, nk, n, p):
    G = nk.size
    d = np.diagonal(W, axis1=1, axis2=2)
    dets = _geomean(d)
    lam = dets.sum() / n
    return np.full(G, lam), d / dets[:, None], _identity(G, p)


def _vvi(W, nk, n, p):
    G = nk.size
    d = np.diagonal(W, axis1=1, axis2=2) / nk[:, None]
    lam = _geomean(d)
    return lam, d / lam[:, None], _identity(G, p)


def _alternate_common_shape(omega, nk, p):
    """Volumes lam_g and common unit-determinant shape A minimizing
    sum_g [sum_j omega_gj / (lam_g A_j) + p nk_g log lam_g].
    """
    lam = omega.sum(axis=1) / (p * nk)
    for _ in range(INNER_MAX_ITER):
        s = (omega / lam[:, None]).sum(axis=0)
        A = s / _geomean(s)
        new = (omega / A).sum(axis=1) / (p * nk)
        done = np.max(np.abs(new - lam) / lam) < INNER_TOL
        lam = new
        if done:
            break
    return lam, A


def _vei(W, nk, n, p):
    G = nk.size
    omega = np.diagonal(W, axis1=1, axis2=2)
    lam, A = _alternate_common_shape(omega, nk, p)
    return lam, np.tile(A, (G, 1)), _identity(G, p)


def _eee(W, nk, n, p):
    G = nk.size
    vol, shape, D = decompose((W.sum(axis=0) / n)[None])
    return np.repeat(vol, G), np.repeat(shape, G, axis=0), np.repeat(D, G, axis=0)


def _eigen_desc(W):
    evals, evecs = np.linalg.eigh(W)
    return np.maximum(evals[:, ::-1], 0.0), evecs[:, :, ::-1]


def _eev(W, nk, n, p):
    G = nk.size
    omega, L = _eigen_desc(W)
    s = omega.sum(axis=0)
    det = _geomean(s)
    return np.full(G, det / n), np.tile(s / det, (G, 1)), L


def _vev(W, nk, n, p):
    G = nk.size
    omega, L = _eigen_desc(W)
    lam, A = _alternate_common_shape(omega, nk, p)
    return lam, np.tile(A, (G, 1)), L


def _vvv(W, nk, n, p):
    return decompose(W / nk[:, None, None])


_ESTIMATORS = {
    "EII": _eii, "VII": _vii, "EEI": _eei, "VEI": _vei, "EVI": _evi,
    "VVI": _vvi, "EEE": _eee, "EEV": _eev, "VEV": _vev, "VVV": _vvv,
}


def _factorizable(eigenvalues: np.ndarray) -> np.ndarray:
    ev = np.asarray(eigenvalues)
    if not np.all(np.isfinite(ev)):
        return np.zeros(ev.shape[0], dtype=bool)
    lo, hi = ev.min(axis=1), ev.max(axis=1)
    return (lo > 0) & (lo > MIN_RCOND * hi)


def weighted_scatter(X: np.ndarray, z: np.ndarray):
    """Component masses, weighted means and within-component scatter matrices."""
    nk = z.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        mu = (z.T @ X) / nk[:, None]
    diff = (X[None, :, :] - mu[:, None, :]) * np.sqrt(z.T)[:, :, None]
    W = np.swapaxes(diff, 1, 2) @ diff
    return nk, mu, W


def _estimate(structure, W, nk, n, p):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        volume, shape, orientation = _ESTIMATORS[structure](W, nk, n, p)
        sigma = compose(volume, shape, orientation)
        sigma = 0.5 * (sigma + np.swapaxes(sigma, 1, 2))
        # orientations are orthogonal, so the factors carry sigma's eigenvalues
        ok = _factorizable(volume[:, None] * shape) & np.all(np.isfinite(sigma), axis=(1, 2))
    return volume, shape, orientation, sigma, ok


def fit_m_step(X: np.ndarray, z: np.ndarray, structure: str,
               allow_ridge: bool = True) -> tuple[MixtureParams, bool]:
    """M-step returning ``(params, ridged)``; see :func:`m_step`.

    When a covariance cannot be factorized, the scatter of each failing
    component gets ``RIDGE * trace / p`` added to its diagonal and the
    constrained estimator is rerun, so the ridged result still obeys the
    structure. A second failure is a degenerate fit.
    """
    n, p = X.shape
    if z.ndim != 2 or z.shape[0] != n:
        raise ValueError(f"z has shape {z.shape}, expected ({n}, G)")
    nk, mu, W = weighted_scatter(X, z)
    if np.any(~(nk >= EPS_MASS * n)):
        raise DegenerateFitError(f"empty component: masses {np.round(nk, 6).tolist()}")
    volume, shape, orientation, sigma, ok = _estimate(structure, W, nk, n, p)
    ridged = False
    if not ok.all():
        bad = np.flatnonzero(~ok).tolist()
        if not allow_ridge:
            raise DegenerateFitError(f"singular covariance for components {bad}")
        tr = np.trace(W, axis1=1, axis2=2)
        W = W + np.where(ok, 0.0, RIDGE * tr / p)[:, None, None] * np.eye(p)
        volume, shape, orientation, sigma, ok = _estimate(structure, W, nk, n, p)
        if not ok.all():
            raise DegenerateFitError(f"singular covariance after ridge for components {bad}")
        ridged = True

    params = MixtureParams(structure, nk / n, mu, sigma, volume, shape, orientation)
    return params, ridged


def m_step(z, data, structure: str) -> MixtureParams:
    """Constrained maximum-likelihood parameters given membership weights ``z``.

    Raises ``UnfittableStructureError`` for the MM-only structures and
    ``DegenerateFitError`` for an empty component or a covariance that stays
    singular after one ridge.
    """
    structure = check_structure(structure)
    X = np.asarray(getattr(data, "values", data), dtype=float)
    return fit_m_step(X, np.asarray(z, dtype=float), structure)[0]
