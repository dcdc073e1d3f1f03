"""Synthetic labelled data: Gaussian clusters and uniform-in-triangle clusters.

All draws come from numpy's PCG64 generator seeded explicitly, so a
(spec, seed) pair reproduces the same dataset on any platform.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .data_io import Dataset

GENERATOR = "numpy.random.PCG64"


@dataclass(frozen=True)
class ScenarioSpec:
    gaussian_sizes: tuple[int, ...] = ()
    means: tuple[tuple[float, ...], ...] = ()
    covariances: tuple = ()
    triangle_sizes: tuple[int, ...] = ()
    triangles: tuple = ()                  # each a 3 x 2 tuple of vertices
    labels: tuple[str, ...] = field(default=())

    def validate(self) -> None:
        if len(self.gaussian_sizes) != len(self.means) or len(self.means) != len(self.covariances):
            raise ValueError("gaussian_sizes, means and covariances must have equal lengths")
        if len(self.triangle_sizes) != len(self.triangles):
            raise ValueError("triangle_sizes and triangles must have equal lengths")
        sizes = list(self.gaussian_sizes) + list(self.triangle_sizes)
        if not sizes:
            raise ValueError("scenario has no clusters")
        if any(int(s) < 1 for s in sizes):
            raise ValueError(f"cluster sizes must be positive, got {sizes}")
        dims = {len(m) for m in self.means} | ({2} if self.triangles else set())
        if len(dims) != 1:
            raise ValueError(f"clusters disagree on dimension: {sorted(dims)}")
        for k, cov in enumerate(self.covariances):
            c = np.asarray(cov, dtype=float)
            p = len(self.means[k])
            if c.shape != (p, p) or not np.allclose(c, c.T):
                raise ValueError(f"covariance {k} is not a symmetric {p}x{p} matrix")
            if np.linalg.eigvalsh(c)[0] <= 0:
                raise ValueError(f"covariance {k} is not positive definite")
        for k, tri in enumerate(self.triangles):
            if triangle_area(tri) <= 0:
                raise ValueError(f"triangle {k} is degenerate")
        if self.labels and len(self.labels) != len(sizes):
            raise ValueError("one label per cluster is required")


def triangle_area(vertices) -> float:
    (ax, ay), (bx, by), (cx, cy) = np.asarray(vertices, dtype=float)
    return 0.5 * abs((bx - ax) * (cy - ay) - (cx - ax) * (by - ay))


def in_triangle(points, vertices, tol: float = 1e-12) -> np.ndarray:
    """Barycentric point-in-triangle test (boundary included)."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    a, b, c = np.asarray(vertices, dtype=float)
    T = np.column_stack([b - a, c - a])
    lam = np.linalg.solve(T, (P - a).T)
    l1, l2 = lam
    return (l1 >= -tol) & (l2 >= -tol) & (l1 + l2 <= 1 + tol)


def sample_triangle(rng: np.random.Generator, vertices, size: int) -> tuple[np.ndarray, int]:
    """Uniform points in a triangle by rejection from its bounding box.

    Returns the points and the number of box proposals consumed.
    """
    V = np.asarray(vertices, dtype=float)
    lo, hi = V.min(axis=0), V.max(axis=0)
    out = np.empty((0, 2))
    proposed = 0
    while out.shape[0] < size:
        batch = rng.uniform(lo, hi, size=(2 * (size - out.shape[0]) + 8, 2))
        inside = in_triangle(batch, V)
        need = size - out.shape[0]
        hits = np.flatnonzero(inside)
        if hits.size >= need:
            proposed += int(hits[need - 1]) + 1
            out = np.vstack([out, batch[hits[:need]]])
        else:
            proposed += batch.shape[0]
            out = np.vstack([out, batch[hits]])
    return out, proposed


def gen_gaussian_clusters(spec: ScenarioSpec, seed: int) -> Dataset:
    """Draw every cluster of ``spec`` (Gaussian ones first, then triangles)."""
    spec.validate()
    rng = np.random.default_rng(seed)
    blocks, labels = [], []
    names = list(spec.labels) or [str(k + 1) for k in range(
        len(spec.gaussian_sizes) + len(spec.triangle_sizes))]
    k = 0
    for size, mean, cov in zip(spec.gaussian_sizes, spec.means, spec.covariances):
        blocks.append(rng.multivariate_normal(np.asarray(mean, float), np.asarray(cov, float),
                                              size=int(size), method="cholesky"))
        labels += [names[k]] * int(size)
        k += 1
    acceptance = []
    for size, tri in zip(spec.triangle_sizes, spec.triangles):
        pts, proposed = sample_triangle(rng, tri, int(size))
        blocks.append(pts)
        acceptance.append(int(size) / proposed)
        labels += [names[k]] * int(size)
        k += 1
    X = np.vstack(blocks)
    meta = {"generator": GENERATOR, "seed": int(seed), "spec": _jsonable(asdict(spec))}
    if acceptance:
        meta["triangle_acceptance"] = acceptance
    p = X.shape[1]
    return Dataset(X, tuple(f"x{j + 1}" for j in range(p)), np.asarray(labels, dtype=object), meta)


# Scenario III geometry: two right triangles with axis-aligned legs flanking two
# unit-variance Gaussians.
SCENARIO3 = ScenarioSpec(
    gaussian_sizes=(150, 150),
    means=((0.0, -2.5), (0.0, 2.5)),
    covariances=(((1.0, 0.0), (0.0, 1.0)), ((1.0, 0.0), (0.0, 1.0))),
    triangle_sizes=(100, 100),
    triangles=(((-10.0, -4.0), (-4.0, -4.0), (-4.0, 4.0)),
               ((10.0, -4.0), (4.0, -4.0), (4.0, 4.0))),
    labels=("gauss1", "gauss2", "tri1", "tri2"),
)


def gen_scenario3(seed: int, spec: ScenarioSpec = SCENARIO3) -> Dataset:
    """500 points: 100 in each of two triangles, 150 in each of two Gaussians."""
    d = gen_gaussian_clusters(spec, seed)
    d.metadata["scenario"] = "III"
    return d


def separated_gaussians(sizes, p: int = 2, separation: float = 5.0, seed: int = 0) -> Dataset:
    """Identity-covariance clusters with means ``separation`` apart along successive axes."""
    sizes = tuple(int(s) for s in sizes)
    means = []
    for k in range(len(sizes)):
        m = np.zeros(p)
        m[k % p] = separation * (k // p + 1) if k else 0.0
        means.append(tuple(m))
    eye = tuple(tuple(row) for row in np.eye(p))
    spec = ScenarioSpec(sizes, tuple(means), (eye,) * len(sizes))
    return gen_gaussian_clusters(spec, seed)


def append_noise_column(d: Dataset, seed: int, low=None, high=None) -> Dataset:
    """Append one uniform noise variable (stand-in for a 'noisy variable' design)."""
    rng = np.random.default_rng(seed)
    lo = d.values.min() if low is None else low
    hi = d.values.max() if high is None else high
    noise = rng.uniform(lo, hi, size=d.n)
    meta = dict(d.metadata, noise_column={"seed": int(seed), "low": float(lo), "high": float(hi)})
    return Dataset(np.column_stack([d.values, noise]), d.feature_names + ("noise",), d.labels, meta)


def _jsonable(obj):
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, np.generic):
        return obj.item()
    return obj
