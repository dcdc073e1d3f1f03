"""BIC-based posterior model weights, Occam's window and reference-model choice."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

DEFAULT_C = 20.0


def bma_weights(bics: Sequence[float]) -> np.ndarray:
    """Posterior model probabilities proportional to exp(-BIC/2), equal priors.

    Computed relative to the smallest BIC so that large BIC magnitudes do not
    underflow; the normalized result is unchanged by the shift.
    """
    b = np.asarray(bics, dtype=float)
    if b.ndim != 1 or b.size == 0:
        raise ValueError("need a non-empty list of BIC values")
    if not np.all(np.isfinite(b)):
        raise ValueError("BIC values must be finite")
    w = np.exp(-0.5 * (b - b.min()))
    return w / w.sum()


def window_threshold(c: float = DEFAULT_C) -> float:
    """Largest BIC gap to the best model that stays inside the window: 2 log c."""
    if not c > 1:
        raise ValueError(f"window constant must exceed 1, got {c}")
    return 2.0 * math.log(c)


class ReferencePolicy(enum.Enum):
    # Case I: smallest-BIC model is the reference; members with fewer components are dropped.
    CASE_I = "I"
    # Case II: fewest-components model is the reference; every member is kept.
    CASE_II = "II"


@dataclass
class WindowSet:
    members: list           # FitResult-like objects with .bic, .G, .structure
    weights: np.ndarray
    c: float
    reference_case_I: int
    reference_case_II: int

    def __len__(self) -> int:
        return len(self.members)

    @property
    def bics(self) -> np.ndarray:
        return np.array([m.bic for m in self.members])


@dataclass(frozen=True)
class Reference:
    index: int                # position of the reference model in the window
    subset: tuple[int, ...]   # window positions used for averaging
    weights: np.ndarray       # weights renormalized over ``subset``


def occam_window(s, c: float = DEFAULT_C) -> WindowSet:
    """Members within 2 log c of the best BIC, weighted among themselves.

    ``s`` is a ``SweepResult`` or any sequence of fitted models.
    """
    entries = list(getattr(s, "entries", s))
    if not entries:
        raise ValueError("cannot form a window from an empty set of models")
    entries.sort(key=lambda e: (e.bic, e.G, e.structure))
    best = entries[0].bic
    cut = window_threshold(c)
    members = [e for e in entries if e.bic - best <= cut]
    weights = bma_weights([m.bic for m in members])
    case_two = min(range(len(members)),
                   key=lambda i: (members[i].G, members[i].bic, members[i].structure))
    return WindowSet(members, weights, float(c), 0, case_two)


def select_reference(w: WindowSet, policy: ReferencePolicy) -> Reference:
    if not w.members:
        raise ValueError("empty window")
    policy = ReferencePolicy(policy)
    if policy is ReferencePolicy.CASE_I:
        ref = w.reference_case_I
        g_ref = w.members[ref].G
        subset = tuple(i for i, m in enumerate(w.members) if m.G >= g_ref)
    else:
        ref = w.reference_case_II
        subset = tuple(range(len(w.members)))
    sub = w.weights[list(subset)]
    return Reference(ref, subset, sub / sub.sum())
