"""EM fitting of a single (structure, G) model from one initialization."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .density import e_step_loglik
from .mstep import DegenerateFitError, fit_m_step
from .params import MixtureParams
from .structures import bic, check_structure, free_param_count

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 1000
LLOYD_ITERATIONS = 10


@dataclass
class FitResult:
    structure: str
    G: int
    params: Optional[MixtureParams]
    loglik: float
    rho: int
    bic: float
    n_iter: int
    converged: bool
    seed: int
    n: int
    z: Optional[np.ndarray] = field(default=None, repr=False)
    loglik_trace: list[float] = field(default_factory=list, repr=False)
    failure: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.converged and self.params is not None

    @property
    def label(self) -> str:
        return f"{self.structure} G={self.G}"


def farthest_point_kmeans(X: np.ndarray, G: int, seed: int,
                          n_iter: int = LLOYD_ITERATIONS) -> np.ndarray:
    """0-based labels from Lloyd's algorithm seeded by farthest-point traversal.

    The first centre is a data point drawn with ``seed``; each further centre
    is the point farthest from all centres chosen so far.
    """
    n = X.shape[0]
    rng = np.random.default_rng(seed)
    first = int(rng.integers(n))
    centres = [X[first]]
    d2 = np.sum((X - X[first]) ** 2, axis=1)
    for _ in range(1, G):
        nxt = int(np.argmax(d2))
        centres.append(X[nxt])
        d2 = np.minimum(d2, np.sum((X - X[nxt]) ** 2, axis=1))
    C = np.array(centres)
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(n_iter):
        dist = np.sum((X[:, None, :] - C[None, :, :]) ** 2, axis=2)
        labels = np.argmin(dist, axis=1)
        for g in range(G):
            members = labels == g
            if members.any():
                C[g] = X[members].mean(axis=0)
    return labels


def one_hot(labels: np.ndarray, G: int) -> np.ndarray:
    z = np.zeros((labels.size, G))
    z[np.arange(labels.size), labels] = 1.0
    return z


def initial_z(X: np.ndarray, G: int, init, seed: int) -> np.ndarray:
    if init is None or (isinstance(init, str) and init == "kmeans"):
        return one_hot(farthest_point_kmeans(X, G, seed), G)
    arr = np.asarray(init)
    if arr.ndim == 1:
        return one_hot(arr.astype(np.int64), G)
    if arr.shape != (X.shape[0], G):
        raise ValueError(f"initial z has shape {arr.shape}, expected {(X.shape[0], G)}")
    return arr.astype(float)


def aitken_converged(trace: list[float], tol: float) -> bool:
    """True once the Aitken asymptotic log-likelihood estimate moves by < tol."""
    if len(trace) >= 2 and trace[-1] == trace[-2]:
        return True
    if len(trace) < 4:
        return False

    def asymptote(l0, l1, l2):
        # outside 0 <= a < 1 the extrapolation is meaningless; fall back to l2
        step = l1 - l0
        if step == 0:
            return l2
        a = (l2 - l1) / step
        if not 0 <= a < 1:
            return l2
        return l1 + (l2 - l1) / (1 - a)

    prev = asymptote(*trace[-4:-1])
    curr = asymptote(*trace[-3:])
    return abs(curr - prev) < tol


def em_fit(data, structure: str, G: int, init="kmeans", tol: float = DEFAULT_TOL,
           max_iter: int = DEFAULT_MAX_ITER, seed: int = 0) -> FitResult:
    """Fit one mixture by EM.

    ``init`` is ``"kmeans"`` (farthest-point seeded Lloyd partition), an
    (n,) array of 0-based labels, or an (n, G) membership matrix. Degenerate
    restarts come back with ``converged=False`` and ``failure`` set instead of
    raising.
    """
    structure = check_structure(structure)
    X = np.asarray(getattr(data, "values", data), dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    if G < 1:
        raise ValueError("G must be >= 1")
    rho = free_param_count(structure, G, p)

    def failed(msg, n_iter, trace):
        return FitResult(structure, G, None, -math.inf, rho, math.inf, n_iter, False,
                         seed, n, loglik_trace=trace, failure=msg)

    if n <= G:
        return failed(f"need n > G (n={n}, G={G})", 0, [])

    ridged = False
    trace: list[float] = []
    try:
        z = initial_z(X, G, init, seed)
        params, ridged = fit_m_step(X, z, structure, allow_ridge=True)
        z, ll = e_step_loglik(X, params)
    except (DegenerateFitError, np.linalg.LinAlgError) as exc:
        return failed(f"initialization: {exc}", 0, trace)
    trace.append(ll)

    converged = False
    it = 0
    while it < max_iter:
        try:
            new, used = fit_m_step(X, z, structure, allow_ridge=not ridged)
            new_z, new_ll = e_step_loglik(X, new)
        except (DegenerateFitError, np.linalg.LinAlgError) as exc:
            return failed(f"iteration {it + 1}: {exc}", it, trace)
        it += 1
        ridged = ridged or used
        if not math.isfinite(new_ll):
            return failed(f"iteration {it}: non-finite log-likelihood", it, trace)
        params, z, ll = new, new_z, new_ll
        trace.append(ll)
        if aitken_converged(trace, tol):
            converged = True
            break

    return FitResult(structure, G, params, ll, rho, bic(ll, rho, n), it, converged, seed, n,
                     z=z, loglik_trace=trace)
