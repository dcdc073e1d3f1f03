"""Gaussian log-densities and the E-step, all in the log domain."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from .params import MixtureParams

_LOG_2PI = math.log(2.0 * math.pi)


def log_component_density(x, mu, sigma):
    """log phi(x | mu, sigma); ``x`` may be a single point or an (n, p) array.

    Raises ``numpy.linalg.LinAlgError`` if ``sigma`` is not positive definite.
    """
    x = np.asarray(x, dtype=float)
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    L = np.linalg.cholesky(sigma)
    single = x.ndim == 0 or (x.ndim == 1 and x.size == mu.size)
    diff = x.reshape(-1, mu.size) - mu
    y = np.linalg.solve(L, diff.T)
    out = -0.5 * (mu.size * _LOG_2PI + np.sum(y * y, axis=0)) - np.sum(np.log(np.diag(L)))
    return float(out[0]) if single else out


def component_density(x, mu, sigma):
    return np.exp(log_component_density(x, mu, sigma))


def weighted_log_densities(X: np.ndarray, params: MixtureParams) -> np.ndarray:
    """(n, G) matrix of log pi_g + log phi(x_i | mu_g, sigma_g)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != params.p:
        raise ValueError(f"data have shape {X.shape}, model dimension is {params.p}")
    G, p = params.G, params.p
    L = np.linalg.cholesky(params.sigma)
    Linv = np.linalg.inv(L)
    # whiten x and mu with every component's L^{-1} in one (n, p) @ (p, G*p) product
    T = np.swapaxes(Linv, 1, 2).transpose(1, 0, 2).reshape(p, G * p)
    y = (X @ T).reshape(-1, G, p) - np.einsum("gij,gj->gi", Linv, params.mu)[None]
    maha = np.einsum("ngp,ngp->ng", y, y)
    logdet = 2.0 * np.sum(np.log(np.diagonal(L, axis1=1, axis2=2)), axis=1)
    with np.errstate(divide="ignore"):
        logpi = np.log(params.pi)
    return logpi[None, :] - 0.5 * (p * _LOG_2PI + logdet[None, :] + maha)


def e_step_loglik(X: np.ndarray, params: MixtureParams) -> tuple[np.ndarray, float]:
    """Memberships and log-likelihood from one pass of log-sum-exp."""
    lw = weighted_log_densities(X, params)
    m = np.max(lw, axis=1, keepdims=True)
    m[~np.isfinite(m)] = 0.0
    e = np.exp(lw - m)
    s = np.sum(e, axis=1, keepdims=True)
    return e / s, float(np.sum(m + np.log(s)))


def e_step(params: MixtureParams, data) -> np.ndarray:
    """Posterior membership probabilities for each observation."""
    X = getattr(data, "values", data)
    return e_step_loglik(X, params)[0]


def log_likelihood(params: MixtureParams, data) -> float:
    X = getattr(data, "values", data)
    return e_step_loglik(X, params)[1]


def mixture_log_density(X, params: MixtureParams) -> np.ndarray:
    return logsumexp(weighted_log_densities(np.atleast_2d(X), params), axis=1)
