"""Command-line experiment runner.

One subcommand per experiment; flags override config-file values, which
override the experiment defaults.  Exit codes: 0 success, 2 config error,
3 resource limit exceeded, 4 acceptance check failed (with --check).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .errors import SizeError
from .experiments import EXPERIMENTS, ExperimentConfig, run, validate
from .model import GOE_MEAN_GAP_RATIO, POISSON_MEAN_GAP_RATIO
from .parallel import default_workers
from .results import ResultTable, read_metadata

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_CHECK = 4

# Points that count as a numerically exact design when checking curves.
_EXACT_DESIGN_TOL = 1e-6


def _parse_list(text: str, cast):
    return [cast(tok) for tok in text.split(",") if tok.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="projens",
        description="Projected-ensemble experiments with CSV output.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="output CSV path")
        p.add_argument("--workers", type=int, default=None,
                       help="parallel worker count (default: available cores, "
                            "or PROJENS_WORKERS)")
        p.add_argument("--na", type=int, default=None, dest="n_a")
        p.add_argument("--nb", type=int, default=None, dest="n_b")
        p.add_argument("--k", default=None, help="comma list of moment orders")
        p.add_argument("--sc", default=None, help="comma list of entropy values")
        p.add_argument("--w", default=None, help="comma list of disorder strengths")
        p.add_argument("--jt", type=float, default=None)
        p.add_argument("--shots", type=int, default=None)
        p.add_argument("--realizations", type=int, default=None)
        p.add_argument("--check", action="store_true",
                       help="validate the produced table against its reference "
                            "behavior; exit 4 on failure")
    return parser


def config_from_args(args) -> ExperimentConfig:
    file_values: dict = {}
    if args.config:
        with open(args.config) as fh:
            file_values = json.load(fh)
        file_values.pop("experiment", None)
        known = set(ExperimentConfig.__dataclass_fields__) - {"experiment"}
        unknown = set(file_values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
    overrides = dict(file_values)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["out_path"] = args.out
    if args.n_a is not None:
        overrides["n_a"] = args.n_a
    if args.n_b is not None:
        overrides["n_b"] = args.n_b
    if args.k is not None:
        overrides["k_values"] = _parse_list(args.k, int)
    if args.sc is not None:
        overrides["s_c_values"] = _parse_list(args.sc, float)
    if args.w is not None:
        overrides["w_values"] = _parse_list(args.w, float)
    if args.jt is not None:
        overrides["jt"] = args.jt
    if args.shots is not None:
        overrides["shots"] = args.shots
    if args.realizations is not None:
        overrides["realizations"] = args.realizations
    return ExperimentConfig.with_defaults(args.experiment, **overrides)


def check_table(config: ExperimentConfig, table: ResultTable) -> list[str]:
    """Reference-behavior checks backing the --check flag; empty means pass."""
    fails: list[str] = []
    exp = config.experiment
    if exp == "theorem1-verify":
        for quantity, k, _, _, s_c, emp, se, pred in table.rows:
            if quantity == "delta1_sq":
                if abs(emp - pred) > max(3 * se, 1e-9):
                    fails.append(f"k=1 s_c={s_c}: {emp} vs {pred} beyond 3 se")
            elif pred > 0 and abs(emp / pred - 1) > 0.15:
                fails.append(f"{quantity} s_c={s_c}: {emp} vs {pred} beyond 15%")
    elif exp == "fig1c":
        for k in config.k_values:
            pts = [(s, d, b) for kk, s, d, b in table.rows if kk == k]
            for (s1, d1, _), (s2, d2, _) in zip(pts, pts[1:]):
                if d2 > d1 * 1.05:
                    fails.append(f"k={k}: delta rises {d1} -> {d2} at s_c={s2}")
            for s, d, b in pts:
                if d <= _EXACT_DESIGN_TOL:
                    continue  # numerically exact design beats the benchmark
                if not (0.5 * b <= d <= 2.0 * b):
                    fails.append(f"k={k} s_c={s}: delta {d} not within 2x of {b}")
    elif exp == "disorder-scan":
        rows2 = [(w, d, bn) for k, w, d, _, bn in table.rows if k == 2]
        near = [r for r in rows2 if abs(r[0] - 0.1) < 1e-9]
        if near:
            w, d, bn = near[0]
            if not (0.5 * bn <= d <= 2.0 * bn):
                fails.append(f"delta at w=0.1 is {d}, not within 2x of {bn}")
            big = [r for r in rows2 if abs(r[0] - 10.0) < 1e-9]
            if big and big[0][1] < 3.0 * d:
                fails.append(f"delta at w=10 ({big[0][1]}) below 3x delta at w=0.1 ({d})")
    elif exp == "gap-ratio":
        for n, w, mean_r, _ in table.rows:
            if abs(w - 0.1) < 1e-9 and n >= 10 and abs(mean_r - GOE_MEAN_GAP_RATIO) > 0.02:
                fails.append(f"mean r at w=0.1 is {mean_r}, not {GOE_MEAN_GAP_RATIO}+-0.02")
            if abs(w - 5.0) < 1e-9 and n >= 10 and abs(mean_r - POISSON_MEAN_GAP_RATIO) > 0.02:
                fails.append(f"mean r at w=5 is {mean_r}, not {POISSON_MEAN_GAP_RATIO}+-0.02")
    elif exp == "echo":
        for w, t, f_mean, _, pred in table.rows:
            if w * t <= 0.3 + 1e-9 and abs(f_mean / pred - 1) > 0.10:
                fails.append(f"echo at w*t={w * t:.2f}: {f_mean} vs {pred} beyond 10%")
    elif exp == "shadow-bias":
        pts = [(nb + s, np.log2(m)) for nb, s, m, _ in table.rows if m > 0]
        if len(set(x for x, _ in pts)) >= 3:
            slope = np.polyfit([x for x, _ in pts], [y for _, y in pts], 1)[0]
            if not -0.6 <= slope <= -0.4:
                fails.append(f"bias scaling slope {slope:.3f} outside [-0.6, -0.4]")
        elif len(pts) >= 2 and pts[-1][1] >= pts[0][1]:
            fails.append("bias does not decrease with injected entropy")
    elif exp == "shadow-convergence":
        errs = {s: m for _, s, _, m, _, _ in table.rows}
        if len(errs) >= 2 and errs[max(errs)] > errs[min(errs)]:
            fails.append("error does not improve with injected entropy")
    elif exp == "patched-energy":
        lo, hi = min(config.s_c_values), max(config.s_c_values)
        mean = {s: np.mean([e for _, sc, e in table.rows if sc == s]) for s in (lo, hi)}
        if mean[hi] > 0.5 * mean[lo]:
            fails.append(
                f"randomized-ancilla error {mean[hi]:.4f} above half the fixed one "
                f"{mean[lo]:.4f}"
            )
    elif exp == "design-check":
        for k, s_c, d2, d1, _, _ in table.rows:
            if d1 > d2 + 1e-9:
                fails.append(f"k={k} s_c={s_c}: delta_1 {d1} exceeds delta_2 {d2}")
    return fails


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"config-error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    diags = validate(config)
    if diags:
        print(f"config-error: {'; '.join(diags)}", file=sys.stderr)
        return EXIT_CONFIG
    out_path = config.out_path or f"{config.experiment}.csv"
    try:
        meta = read_metadata(out_path)
        old = meta.get("code_version")
        if old and old != __version__:
            print(
                f"warning: {out_path} was written by code version {old}, "
                f"this is {__version__}",
                file=sys.stderr,
            )
    except OSError:
        pass
    workers = args.workers if args.workers is not None else default_workers()
    try:
        table = run(config, workers=workers)
    except SizeError as exc:
        print(f"resource-limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    table.write_csv(out_path)
    print(f"wrote {out_path} ({len(table.rows)} rows)")
    if args.check:
        fails = check_table(config, table)
        if fails:
            print(f"check-failed: {'; '.join(fails)}", file=sys.stderr)
            return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
