"""Command-line front end: ``mixavg sweep|average|simulate|ari``.

Exit codes: 0 success, 2 invalid input or flags, 3 every model fit failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .ari import adjusted_rand_index
from .data_io import DataError, Dataset, Partition, load_csv, standardize, write_csv, write_metadata
from .gpcm import FITTABLE, UnfittableStructureError, check_structure
from .gpcm.em import DEFAULT_MAX_ITER, DEFAULT_TOL
from .occam import DEFAULT_C
from .report import build_report, sweep_from_dict, sweep_to_dict, versions, write_report
from .simgen import append_noise_column, gen_scenario3, separated_gaussians
from .sweep import best_model, run_sweep

EXIT_OK, EXIT_INVALID, EXIT_FIT_FAILED = 0, 2, 3


class UsageError(ValueError):
    pass


class AllFitsFailed(RuntimeError):
    pass


def parse_g_range(text: str) -> tuple[int, int]:
    try:
        if ":" in text:
            lo, hi = (int(t) for t in text.split(":", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise UsageError(f"--g expects 'lo:hi' or a single integer, got {text!r}") from None
    if lo < 1 or hi < lo:
        raise UsageError(f"invalid G range {text!r}")
    return lo, hi


def parse_structures(text: Optional[str]) -> tuple[str, ...]:
    if not text:
        return FITTABLE
    return tuple(check_structure(s) for s in text.split(",") if s.strip())


def _load(args) -> Dataset:
    d = load_csv(args.input, args.labels)
    return standardize(d) if args.standardize else d


def _settings(args) -> dict:
    g_lo, g_hi = parse_g_range(args.g)
    return {"input": str(args.input), "labels": args.labels, "standardize": args.standardize,
            "structures": list(parse_structures(args.structures)), "g_range": [g_lo, g_hi],
            "restarts": args.restarts, "seed": args.seed, "tol": args.tol, "max_iter": args.max_iter}


def _sweep(args, data: Dataset):
    s = _settings(args)
    result = run_sweep(data, s["structures"], s["g_range"], s["restarts"], s["seed"],
                       s["tol"], s["max_iter"], workers=args.workers)
    if not result.entries:
        raise AllFitsFailed(f"all {len(result.failures)} (structure, G) cells failed to fit")
    return s, result


def _print_table(result, out, limit: int = 15) -> None:
    print(f"{'model':<12}{'BIC':>16}", file=out)
    for e in result.entries[:limit]:
        print(f"{e.label:<12}{e.bic:>16.4f}", file=out)
    rest = len(result.entries) - limit
    if rest > 0:
        print(f"... {rest} more", file=out)
    for f in result.failures:
        print(f"failed: {f.structure} G={f.G}", file=out)


def cmd_sweep(args, out=None) -> int:
    _settings(args)  # reject bad flags before reading data
    data = _load(args)
    settings, result = _sweep(args, data)
    _print_table(result, out)
    best = best_model(result)
    print(f"best: {best.label} BIC={best.bic:.4f}", file=out)
    if args.out:
        doc = {"settings": settings, "versions": versions(), "n": data.n, "p": data.p,
               "sweep": sweep_to_dict(result)}
        write_report(doc, args.out)
    return EXIT_OK


def cmd_average(args, out=None) -> int:
    if args.from_run:
        doc = json.loads(Path(args.from_run).read_text(encoding="utf-8"))
        settings = doc["settings"]
        if args.input is None:
            args.input = settings["input"]
        if args.labels is None:
            args.labels = settings.get("labels")
        args.standardize = settings.get("standardize", False)
        data = _load(args)
        if data.n != doc["n"] or data.p != doc["p"]:
            raise UsageError(f"{args.from_run} was fitted to n={doc['n']}, p={doc['p']}; "
                             f"{args.input} has n={data.n}, p={data.p}")
        result = sweep_from_dict(doc["sweep"], data)
        if not result.entries:
            raise AllFitsFailed(f"{args.from_run} contains no fitted models")
    else:
        if args.input is None:
            raise UsageError("average needs --input or --from-run")
        _settings(args)
        data = _load(args)
        settings, result = _sweep(args, data)
    settings = dict(settings, c=args.c)
    report = build_report(data, result, args.c, settings)

    print(f"best model: {report['best']['model']}", file=out)
    print(f"Occam's window (c={args.c:g}, threshold {report['window']['threshold']:.5f}):", file=out)
    for m in report["window"]["members"]:
        w1 = "-" if m["weight_case_I"] is None else f"{m['weight_case_I']:.4f}"
        print(f"  {m['model']:<10} BIC={m['bic']:.4f}  case I {w1:>6}  case II {m['weight_case_II']:.4f}",
              file=out)
    for note in report["notes"]:
        print(note, file=out)
    if "ari" in report:
        for k, v in report["ari"].items():
            print(f"ARI {k}: {v:.4f}", file=out)
    if args.out:
        write_report(report, args.out)
    if args.export_dir:
        export_partitions(report, args.export_dir)
    return EXIT_OK


def export_partitions(report: dict, directory) -> list[Path]:
    """One CSV per clustering: hard label then the soft membership columns."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for key in ("best", "aap_case_I", "aap_case_II", "ma"):
        path = directory / f"{key}.csv"
        soft = report[key]["soft"]
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["cluster"] + [f"z{g + 1}" for g in range(len(soft[0]))])
            for h, row in zip(report[key]["hard"], soft):
                w.writerow([h] + [repr(v) for v in row])
        paths.append(path)
    return paths


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".json") if path.suffix != ".json" else path.with_suffix(".meta.json")


def cmd_simulate(args, out=None) -> int:
    if args.scenario == "scenario3":
        d = gen_scenario3(args.seed)
    else:
        try:
            sizes = tuple(int(s) for s in args.sizes.split(","))
        except ValueError:
            raise UsageError(f"--sizes expects comma-separated integers, got {args.sizes!r}") from None
        if not sizes or min(sizes) < 1:
            raise UsageError("--sizes must list positive cluster sizes")
        if args.dim < 1:
            raise UsageError("--dim must be >= 1")
        d = separated_gaussians(sizes, args.dim, args.separation, args.seed)
        d.metadata["scenario"] = "gaussian"
    if args.noise:
        # a uniform column standing in for a noisy-variable design, not the original generator
        d = append_noise_column(d, args.seed + 1)
    path = Path(args.out)
    write_csv(d, path)
    write_metadata(d, _sidecar(path))
    print(f"wrote {d.n} rows x {d.p} columns to {path}", file=out)
    return EXIT_OK


def read_label_file(path, column: Optional[str] = None) -> Partition:
    """Labels from one column of a CSV file (default: the last column)."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2:
        raise DataError(f"{path}: no label rows")
    header = [h.strip() for h in rows[0]]
    if column is None:
        j = len(header) - 1
    elif column in header:
        j = header.index(column)
    else:
        raise DataError(f"{path}: column {column!r} not found in {header}")
    labels = []
    for i, r in enumerate(rows[1:]):
        if len(r) != len(header):
            raise DataError(f"{path}: row {i + 2} has {len(r)} fields, header has {len(header)}")
        labels.append(r[j].strip())
    return Partition.from_labels(labels)


def cmd_ari(args, out=None) -> int:
    a = read_label_file(args.first, args.column)
    b = read_label_file(args.second, args.column)
    if len(a) != len(b):
        raise UsageError(f"label files differ in length: {len(a)} vs {len(b)}")
    print(repr(adjusted_rand_index(a, b)), file=out)
    return EXIT_OK


def _add_fit_flags(p: argparse.ArgumentParser, input_required: bool) -> None:
    p.add_argument("--input", required=input_required, help="CSV file with a header row")
    p.add_argument("--labels", help="name of the true-label column (excluded from fitting)")
    p.add_argument("--standardize", action="store_true", help="scale columns to unit variance")
    p.add_argument("--g", default="1:9", help="component range lo:hi (default 1:9)")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--structures", help="comma-separated subset, e.g. VVV,EEE (default: all ten)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes for the sweep (default: $MIXAVG_WORKERS or 1)")
    p.add_argument("--out", help="write the JSON report here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixavg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sweep", help="fit every (structure, G) cell and print the BIC table")
    _add_fit_flags(sp, input_required=True)
    sp.set_defaults(func=cmd_sweep)

    ap = sub.add_parser("average", help="Occam's window, AAP (cases I and II) and MA")
    _add_fit_flags(ap, input_required=False)
    ap.add_argument("--from-run", help="reuse the sweep stored in a JSON report")
    ap.add_argument("--c", type=float, default=DEFAULT_C, help="Occam's window constant (default 20)")
    ap.add_argument("--export-dir", help="write one CSV of memberships per clustering")
    ap.set_defaults(func=cmd_average)

    sm = sub.add_parser("simulate", help="generate a labelled synthetic data set")
    sm.add_argument("scenario", choices=("scenario3", "gaussian"))
    sm.add_argument("--seed", type=int, default=0)
    sm.add_argument("--out", required=True)
    sm.add_argument("--sizes", default="100,100,100", help="gaussian: cluster sizes")
    sm.add_argument("--dim", type=int, default=2, help="gaussian: number of variables")
    sm.add_argument("--separation", type=float, default=5.0, help="gaussian: distance between means")
    sm.add_argument("--noise", action="store_true", help="append one uniform noise variable")
    sm.set_defaults(func=cmd_simulate)

    ar = sub.add_parser("ari", help="adjusted Rand index between two label files")
    ar.add_argument("first")
    ar.add_argument("second")
    ar.add_argument("--column", help="label column name (default: last column)")
    ar.set_defaults(func=cmd_ari)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, sys.stdout)
    except AllFitsFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FIT_FAILED
    except (UsageError, DataError, UnfittableStructureError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
