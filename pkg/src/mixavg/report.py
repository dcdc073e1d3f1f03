"""JSON run reports: sweep tables, window, averaged clusterings and ARIs.

Floats are written with ``repr`` (shortest round-trip form, at most 17
significant digits), so parsing a report gives back the identical numbers.
"""

from __future__ import annotations

import json
import platform
from pathlib import Path
from typing import Any, Optional

import numpy as np
import scipy

from . import __version__
from .ari import adjusted_rand_index
from .averaging import PosteriorAverage, average_models, average_posteriors, harden
from .data_io import Dataset, Partition, partition_from_labels
from .gpcm import FitResult, MixtureParams, e_step
from .occam import ReferencePolicy, WindowSet, occam_window, select_reference, window_threshold
from .sweep import CellFailure, SweepResult, best_model


def versions() -> dict[str, str]:
    return {"mixavg": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def params_to_dict(p: MixtureParams) -> dict[str, Any]:
    return {"structure": p.structure, "pi": p.pi.tolist(), "mu": p.mu.tolist(),
            "sigma": p.sigma.tolist(), "volume": p.volume.tolist(), "shape": p.shape.tolist(),
            "orientation": p.orientation.tolist()}


def params_from_dict(d: dict[str, Any]) -> MixtureParams:
    arr = {k: np.asarray(d[k], dtype=float) for k in ("pi", "mu", "sigma", "volume", "shape", "orientation")}
    return MixtureParams(d["structure"], **arr)


def fit_to_dict(f: FitResult) -> dict[str, Any]:
    return {"structure": f.structure, "G": f.G, "bic": f.bic, "loglik": f.loglik, "rho": f.rho,
            "n_iter": f.n_iter, "converged": f.converged, "seed": f.seed, "n": f.n,
            "params": params_to_dict(f.params)}


def fit_from_dict(d: dict[str, Any], data=None) -> FitResult:
    params = params_from_dict(d["params"])
    z = None if data is None else e_step(params, data)
    return FitResult(d["structure"], int(d["G"]), params, float(d["loglik"]), int(d["rho"]),
                     float(d["bic"]), int(d["n_iter"]), bool(d["converged"]), int(d["seed"]),
                     int(d["n"]), z=z)


def sweep_to_dict(s: SweepResult) -> dict[str, Any]:
    return {"structures": list(s.structures), "g_range": list(s.g_range), "restarts": s.restarts,
            "base_seed": s.base_seed, "entries": [fit_to_dict(e) for e in s.entries],
            "failures": [{"structure": f.structure, "G": f.G, "reasons": f.reasons} for f in s.failures]}


def sweep_from_dict(d: dict[str, Any], data=None) -> SweepResult:
    return SweepResult(
        entries=[fit_from_dict(e, data) for e in d["entries"]],
        structures=tuple(d["structures"]), g_range=tuple(d["g_range"]),
        failures=[CellFailure(f["structure"], f["G"], list(f["reasons"])) for f in d["failures"]],
        restarts=int(d["restarts"]), base_seed=int(d["base_seed"]))


def _clustering(z: np.ndarray, truth: Optional[Partition]) -> dict[str, Any]:
    part = harden(z)
    out = {"soft": z.tolist(), "hard": part.assignments.tolist()}
    if truth is not None:
        out["ari"] = adjusted_rand_index(truth, part)
    return out


def _aap_to_dict(a: PosteriorAverage, window: WindowSet, truth) -> dict[str, Any]:
    out = _clustering(a.z, truth)
    out["reference"] = window.members[a.reference.index].label
    out["members"] = []
    for c in a.contributions:
        m = window.members[c.window_index]
        out["members"].append({
            "model": m.label, "weight": c.weight,
            "merge": None if c.merge is None else list(c.merge.assignment),
            "merge_ari": c.merge_ari, "column_order": c.order.tolist()})
    return out


def build_report(data: Dataset, sweep: SweepResult, c: float, settings: dict[str, Any]) -> dict[str, Any]:
    """Window, weights, best/AAP-I/AAP-II/MA clusterings and (with labels) their ARIs."""
    truth = partition_from_labels(data) if data.labels is not None else None
    best = best_model(sweep)
    window = occam_window(sweep, c)
    ref_one = select_reference(window, ReferencePolicy.CASE_I)
    ref_two = select_reference(window, ReferencePolicy.CASE_II)
    aap_one = average_posteriors(window, ReferencePolicy.CASE_I, data=data)
    aap_two = average_posteriors(window, ReferencePolicy.CASE_II, data=data)
    ma = average_models(window, data)

    case_one_w = dict(zip(ref_one.subset, ref_one.weights.tolist()))
    members = []
    for i, (m, w) in enumerate(zip(window.members, window.weights.tolist())):
        members.append({"model": m.label, "structure": m.structure, "G": m.G, "bic": m.bic,
                        "weight_case_II": w, "weight_case_I": case_one_w.get(i)})

    ma_out = _clustering(ma.z, truth)
    ma_out.update({"members": [window.members[i].label for i in ma.subset],
                   "weights": ma.weights.tolist(), "params": params_to_dict(ma.params)})

    notes = []
    if len(window) == 1:
        notes.append("only one model lies in Occam's window; every averaging equals the best model")

    report = {
        "settings": settings,
        "versions": versions(),
        "n": data.n, "p": data.p,
        "sweep": sweep_to_dict(sweep),
        "best": dict(_clustering(best.z, truth), model=best.label, bic=best.bic),
        "window": {"c": window.c, "threshold": window_threshold(window.c), "members": members,
                   "reference_case_I": window.members[ref_one.index].label,
                   "reference_case_II": window.members[ref_two.index].label},
        "aap_case_I": _aap_to_dict(aap_one, window, truth),
        "aap_case_II": _aap_to_dict(aap_two, window, truth),
        "ma": ma_out,
        "notes": notes,
    }
    if truth is not None:
        report["ari"] = {k: report[k]["ari"] for k in ("best", "aap_case_I", "aap_case_II", "ma")}
    return report


def dumps(report: dict[str, Any]) -> str:
    return json.dumps(report, indent=1, allow_nan=False)


def write_report(report: dict[str, Any], path) -> Path:
    path = Path(path)
    path.write_text(dumps(report) + "\n", encoding="utf-8")
    return path
