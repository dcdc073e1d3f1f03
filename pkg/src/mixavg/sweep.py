"""Fit the (structure x G x restart) grid and keep the best restart per cell."""

from __future__ import annotations

import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .gpcm import FITTABLE, FitResult, check_structure, em_fit, farthest_point_kmeans
from .gpcm.em import DEFAULT_MAX_ITER, DEFAULT_TOL, one_hot

WORKERS_ENV = "MIXAVG_WORKERS"


@dataclass
class CellFailure:
    structure: str
    G: int
    reasons: list[str]


@dataclass
class SweepResult:
    entries: list[FitResult]
    structures: tuple[str, ...]
    g_range: tuple[int, int]
    failures: list[CellFailure] = field(default_factory=list)
    restarts: int = 1
    base_seed: int = 0

    def table(self) -> list[tuple[str, int, float]]:
        return [(e.structure, e.G, e.bic) for e in self.entries]

    def get(self, structure: str, G: int) -> Optional[FitResult]:
        for e in self.entries:
            if e.structure == structure and e.G == G:
                return e
        return None


def cell_seed(base_seed: int, structure: str, G: int, restart: int) -> int:
    h = zlib.crc32(f"{structure}/{G}/{restart}".encode("ascii"))
    return (int(base_seed) ^ h) & 0xFFFFFFFFFFFFFFFF


def _rank_key(fit: FitResult):
    return (fit.bic, fit.G, fit.structure)


def fit_cell(X: np.ndarray, structure: str, G: int, restarts: int, base_seed: int,
             tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER):
    """Best converged restart for one cell, plus the reasons other restarts failed.

    EM is deterministic given its starting partition, so restarts whose
    k-means partition repeats an earlier one are not refitted; the earlier
    restart would win the tie anyway.
    """
    best = None
    reasons = []
    seen = set()
    for r in range(restarts):
        seed = cell_seed(base_seed, structure, G, r)
        if X.shape[0] <= G:
            reasons.append(f"need n > G (n={X.shape[0]}, G={G})")
            break
        labels = farthest_point_kmeans(X, G, seed)
        key = labels.tobytes()
        if key in seen:
            continue
        seen.add(key)
        fit = em_fit(X, structure, G, init=one_hot(labels, G), tol=tol, max_iter=max_iter, seed=seed)
        if not fit.converged:
            reasons.append(f"restart {r}: {fit.failure or 'did not converge in %d iterations' % max_iter}")
            continue
        if best is None or fit.bic < best.bic:
            best = fit
    return best, reasons


def _cell_task(args):
    X, structure, G, restarts, base_seed, tol, max_iter = args
    return fit_cell(X, structure, G, restarts, base_seed, tol, max_iter)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def run_sweep(data, structures: Iterable[str] = FITTABLE, g_range: Sequence[int] = (1, 9),
              restarts: int = 20, base_seed: int = 0, tol: float = DEFAULT_TOL,
              max_iter: int = DEFAULT_MAX_ITER, workers: Optional[int] = None) -> SweepResult:
    """Fit every (structure, G) cell with ``restarts`` seeded restarts.

    Results do not depend on ``workers``: each cell's seeds are derived from
    ``base_seed`` and the cell identity, and cells are collected in grid order.
    """
    structures = tuple(dict.fromkeys(check_structure(s) for s in structures))
    if not structures:
        raise ValueError("no fittable structures requested")
    g_lo, g_hi = int(g_range[0]), int(g_range[-1])
    if g_lo < 1 or g_hi < g_lo:
        raise ValueError(f"invalid G range {g_range}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    X = np.asarray(getattr(data, "values", data), dtype=float)
    workers = default_workers() if workers is None else max(1, int(workers))

    cells = [(s, G) for s in structures for G in range(g_lo, g_hi + 1)]
    tasks = [(X, s, G, restarts, base_seed, tol, max_iter) for s, G in cells]
    if workers == 1:
        outcomes = [_cell_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_cell_task, tasks))

    entries, failures = [], []
    for (s, G), (best, reasons) in zip(cells, outcomes):
        if best is None:
            failures.append(CellFailure(s, G, reasons))
        else:
            entries.append(best)
    entries.sort(key=_rank_key)
    return SweepResult(entries, structures, (g_lo, g_hi), failures, restarts, base_seed)


def best_model(s: SweepResult) -> FitResult:
    """Minimum-BIC entry; ties go to fewer components, then structure name."""
    if not s.entries:
        raise ValueError("every cell of the sweep failed; no model to select")
    return min(s.entries, key=_rank_key)
