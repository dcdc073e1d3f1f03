from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MixtureParams:
    """One fitted Gaussian mixture.

    Each covariance is stored both in full (``sigma``) and as its
    volume/shape/orientation factors, ``sigma[g] = volume[g] *
    orientation[g] @ diag(shape[g]) @ orientation[g].T`` with
    ``prod(shape[g]) == 1``. Shared factors are repeated per component.
    """

    structure: str
    pi: np.ndarray           # (G,)
    mu: np.ndarray           # (G, p)
    sigma: np.ndarray        # (G, p, p)
    volume: np.ndarray       # (G,)
    shape: np.ndarray        # (G, p)
    orientation: np.ndarray  # (G, p, p)

    @property
    def G(self) -> int:
        return self.pi.shape[0]

    @property
    def p(self) -> int:
        return self.mu.shape[1]

    def reconstruct(self) -> np.ndarray:
        return compose(self.volume, self.shape, self.orientation)

    def permuted(self, order) -> "MixtureParams":
        """Components reordered so that new component g is old ``order[g]``."""
        order = np.asarray(order)
        return MixtureParams(self.structure, self.pi[order], self.mu[order], self.sigma[order],
                             self.volume[order], self.shape[order], self.orientation[order])


def compose(volume, shape, orientation) -> np.ndarray:
    """``volume[g] * D_g diag(shape[g]) D_g'`` for each component."""
    D = np.asarray(orientation)
    return np.asarray(volume)[:, None, None] * ((D * np.asarray(shape)[:, None, :]) @ np.swapaxes(D, 1, 2))


def decompose(sigma: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unconstrained eigen-factorization of each covariance, eigenvalues descending."""
    evals, evecs = np.linalg.eigh(sigma)
    evals = evals[:, ::-1]
    evecs = evecs[:, :, ::-1]
    volume = np.exp(np.mean(np.log(evals), axis=1))
    return volume, evals / volume[:, None], evecs


def from_covariances(structure: str, pi, mu, sigma) -> MixtureParams:
    sigma = np.asarray(sigma, dtype=float)
    sigma = 0.5 * (sigma + np.swapaxes(sigma, 1, 2))
    volume, shape, orientation = decompose(sigma)
    return MixtureParams(structure, np.asarray(pi, dtype=float), np.asarray(mu, dtype=float),
                         sigma, volume, shape, orientation)
