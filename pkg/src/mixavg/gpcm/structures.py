"""Covariance-structure nomenclature, free-parameter counts and BIC."""

from __future__ import annotations

import math

STRUCTURES = (
    "EII", "VII", "EEI", "VEI", "EVI", "VVI",
    "EEE", "EEV", "VEV", "VVV",
    "EVE", "VVE", "VEE", "EVV",
)
# The last four need an MM algorithm for their M-step and are not fitted here.
FITTABLE = STRUCTURES[:10]
UNFITTABLE = frozenset(STRUCTURES[10:])


class UnfittableStructureError(ValueError):
    pass


def check_structure(name: str, fittable: bool = True) -> str:
    name = str(name).upper()
    if name not in STRUCTURES:
        raise ValueError(f"unknown covariance structure {name!r}; expected one of {', '.join(STRUCTURES)}")
    if fittable and name in UNFITTABLE:
        raise UnfittableStructureError(
            f"structure {name} requires an MM-algorithm M-step and cannot be fitted; "
            f"fittable structures are {', '.join(FITTABLE)}")
    return name


def cov_param_count(structure: str, G: int, p: int) -> int:
    """Number of free covariance parameters for ``structure``.

    EVV follows the printed table entry ``Gp(p+1) - (G-1)``. The family
    pattern suggests ``Gp(p+1)/2 - (G-1)``; since EVV is never fitted the
    discrepancy has no effect on any BIC computed here.
    """
    s = check_structure(structure, fittable=False)
    if G < 1 or p < 1:
        raise ValueError("G and p must be positive")
    full = p * (p + 1) // 2
    counts = {
        "EII": 1,
        "VII": G,
        "EEI": p,
        "VEI": p + G - 1,
        "EVI": G * p - G + 1,
        "VVI": G * p,
        "EEE": full,
        "EEV": G * full - (G - 1) * p,
        "VEV": G * full - (G - 1) * (p - 1),
        "VVV": G * full,
        "EVE": full + (G - 1) * (p - 1),
        "VVE": full + (G - 1) * p,
        "VEE": full + (G - 1),
        "EVV": G * p * (p + 1) - (G - 1),
    }
    return counts[s]


def free_param_count(structure: str, G: int, p: int) -> int:
    """Mixing proportions + means + covariance parameters."""
    return (G - 1) + G * p + cov_param_count(structure, G, p)


def bic(loglik: float, rho: int, n: int) -> float:
    """``-2 loglik + rho log n``; smaller is better."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return -2.0 * loglik + rho * math.log(n)
