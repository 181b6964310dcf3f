"""Command line entry points.

Three subcommands: ``simulate`` writes one simulated dataset,
``montecarlo`` runs replication experiments from a config file, and
``forecast`` rolls estimators through a monthly return panel.  All
outputs are plain CSV/JSON with '#'-style provenance headers (version,
command line, seeds, tuning constants) and no timestamps, so identical
invocations produce byte-identical files regardless of ``--jobs``.

Exit codes: 0 on success, 1 on runtime failure (including any wholly
failed experiment cell), 2 on usage or config errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .core import Family
from .dgp import Design, DgpSpec, dataset_to_csv, simulate, truth_to_dict
from .empirical import (
    HorizonSpec,
    load_panel,
    rolling_forecast,
    write_coefficient_csv,
    write_forecast_csv,
    write_forecast_metrics_csv,
)
from .exceptions import PredlassoError
from .montecarlo import (
    calibrate_for_design,
    coint_group_screening,
    run_montecarlo,
)
from .tuning import TuningConfig, default_grid, save_calibration

_CANONICAL_ORDER = (Family.ORACLE, Family.OLS, Family.PLASSO, Family.SLASSO,
                    Family.ALASSO, Family.TALASSO, Family.RWWD)


class ConfigError(ValueError):
    """Bad key, value, or combination in a config file or flag."""


def _fmt(v) -> str:
    return repr(float(v))


def _parse_list(text: str) -> list[str]:
    return [part.strip() for part in str(text).split(",") if part.strip()]


def _parse_horizon(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad horizon {text!r}") from exc


def _parse_bool(text) -> bool:
    s = str(text).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"bad boolean {text!r}")


def read_config(path) -> dict[str, str]:
    """Flat key-value config; either ``key = value`` lines or a JSON object."""
    with open(path) as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        obj = json.loads(text)
        if not isinstance(obj, dict):
            raise ConfigError("JSON config must be an object")
        return {str(k): str(v) for k, v in obj.items()}
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def _families(names, allowed=None) -> list[Family]:
    fams = []
    for name in names:
        try:
            fam = Family(name.lower())
        except ValueError as exc:
            raise ConfigError(f"unknown estimator {name!r}") from exc
        if allowed is not None and fam not in allowed:
            raise ConfigError(f"estimator {name!r} not usable here")
        if fam not in fams:
            fams.append(fam)
    return sorted(fams, key=_CANONICAL_ORDER.index)


def _provenance(argv, extra: dict) -> dict:
    head = {"version": __version__, "command": "predlasso " + " ".join(argv)}
    head.update(extra)
    return head


def _header_lines(prov: dict) -> list[str]:
    return [f"{k}: {prov[k]}" for k in sorted(prov)]


def _write_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_simulate(args, argv) -> int:
    spec = DgpSpec(
        design=Design(args.design),
        n=args.n,
        seed=args.seed,
        burn_in=args.burn_in,
        noise_scale=args.noise_scale,
    )
    data = simulate(spec)
    prov = _provenance(argv, {
        "design": spec.design.value, "n": spec.n, "seed": spec.seed,
        "burn_in": spec.burn_in, "noise_scale": spec.noise_scale,
    })
    out_csv = f"{args.out_prefix}_data.csv"
    out_truth = f"{args.out_prefix}_truth.json"
    parent = os.path.dirname(args.out_prefix)
    if parent:
        os.makedirs(parent, exist_ok=True)
    dataset_to_csv(data, out_csv, header_lines=_header_lines(prov))
    _write_json(out_truth, {"provenance": prov, "truth": truth_to_dict(data.truth)})
    print(f"wrote {out_csv} and {out_truth}")
    return 0


def _require(cfg: dict, key: str) -> str:
    if key not in cfg:
        raise ConfigError(f"config key {key!r} is required")
    return cfg[key]


def _cfg_int(cfg, key, default=None) -> int:
    raw = cfg.get(key, default)
    if raw is None:
        raise ConfigError(f"config key {key!r} is required")
    try:
        return int(str(raw))
    except ValueError as exc:
        raise ConfigError(f"config key {key!r}: bad integer {raw!r}") from exc


def _cfg_float(cfg, key, default) -> float:
    try:
        return float(str(cfg.get(key, default)))
    except ValueError as exc:
        raise ConfigError(f"config key {key!r}: bad number") from exc


def _cmd_montecarlo(args, argv) -> int:
    cfg = read_config(args.config)
    known_prefixes = ("c_lambda.",)
    known = {
        "designs", "n_list", "estimators", "reps", "master_seed", "gamma",
        "tuning_mode", "calib_reps", "calib_n", "folds", "grid_min", "grid_max",
        "grid_size", "coint_screening", "out_dir",
    }
    for key in cfg:
        if key not in known and not key.startswith(known_prefixes):
            raise ConfigError(f"unknown config key {key!r}")

    try:
        designs = [Design(d) for d in _parse_list(_require(cfg, "designs"))]
    except ValueError as exc:
        raise ConfigError(f"bad design name: {exc}") from exc
    try:
        n_list = [int(v) for v in _parse_list(_require(cfg, "n_list"))]
    except ValueError as exc:
        raise ConfigError(f"bad n_list: {exc}") from exc
    estimators = _families(_parse_list(_require(cfg, "estimators")),
                           allowed=set(_CANONICAL_ORDER) - {Family.RWWD})
    reps = _cfg_int(cfg, "reps", 500)
    master_seed = _cfg_int(cfg, "master_seed")
    gamma = _cfg_float(cfg, "gamma", 1.0)
    mode = cfg.get("tuning_mode", "calibrate")
    if mode not in ("calibrate", "fixed"):
        raise ConfigError(f"tuning_mode must be calibrate or fixed, got {mode!r}")
    grid = default_grid(
        _cfg_int(cfg, "grid_size", 30),
        (_cfg_float(cfg, "grid_min", 1e-5), _cfg_float(cfg, "grid_max", 1.0)),
    )
    folds = _cfg_int(cfg, "folds", 10)
    screening = _parse_bool(cfg.get("coint_screening", "true"))
    out_dir = _require(cfg, "out_dir")
    os.makedirs(out_dir, exist_ok=True)

    shrinkage = [f for f in estimators if f in
                 (Family.PLASSO, Family.SLASSO, Family.ALASSO, Family.TALASSO)]
    calib_entries = []
    tuning_by_design: dict[Design, dict[Family, float]] = {}
    for design in designs:
        if mode == "fixed":
            tuning = {}
            for fam in shrinkage:
                key = f"c_lambda.{fam.value}"
                if key not in cfg:
                    raise ConfigError(f"tuning_mode fixed needs {key}")
                tuning[fam] = _cfg_float(cfg, key, None)
        else:
            tuning = calibrate_for_design(
                design, shrinkage, master_seed=master_seed,
                reps=_cfg_int(cfg, "calib_reps", 100), n=_cfg_int(cfg, "calib_n", 200),
                grid=grid, folds=folds, gamma=gamma, jobs=args.jobs,
            )
            for fam, c in tuning.items():
                calib_entries.append({
                    "design": design.value, "family": fam.value, "c_lambda": c,
                    "reps": _cfg_int(cfg, "calib_reps", 100),
                    "n": _cfg_int(cfg, "calib_n", 200), "master_seed": master_seed,
                })
        tuning_by_design[design] = tuning

    selection = []
    coint = []
    for design in designs:
        selection += run_montecarlo(
            design, n_list, estimators, tuning_by_design[design],
            reps=reps, master_seed=master_seed, gamma=gamma, jobs=args.jobs,
        )
        if screening and design in (Design.DGP2, Design.DGP3):
            for fam in shrinkage:
                coint.append(coint_group_screening(
                    design, max(n_list), fam, tuning_by_design[design],
                    reps=reps, master_seed=master_seed, gamma=gamma, jobs=args.jobs,
                ))

    tuning_note = {
        f"c_lambda.{d.value}.{f.value}": c
        for d, t in sorted(tuning_by_design.items(), key=lambda kv: kv[0].value)
        for f, c in sorted(t.items(), key=lambda kv: kv[0].value)
    }
    prov = _provenance(argv, {
        "master_seed": master_seed, "reps": reps, "gamma": gamma,
        "selection_note": "selection metrics exclude the intercept",
        **tuning_note,
    })
    header = _header_lines(prov)

    if calib_entries:
        save_calibration(os.path.join(out_dir, "calibration.json"), calib_entries)
    _write_table2a(os.path.join(out_dir, "table2a.csv"), selection, estimators, header)
    _write_table2b(os.path.join(out_dir, "table2b.csv"), selection, estimators, header)
    if coint:
        _write_table3(os.path.join(out_dir, "table3.csv"), coint, header)
    _write_json(os.path.join(out_dir, "report.json"), {
        "provenance": prov,
        "selection": [
            {"design": r.design.value, "n": r.n, "estimator": r.estimator.value,
             "mpse": r.mpse, "sr": r.sr, "sr1": r.sr1, "sr2": r.sr2,
             "reps": r.reps, "failures": r.failures}
            for r in selection
        ],
        "coint_screening": [
            {"design": r.design.value, "n": r.n, "estimator": r.estimator.value,
             "both_zero": r.frac_both_zero, "exactly_one_zero": r.frac_exactly_one_zero,
             "neither_zero": r.frac_neither_zero, "reps": r.reps, "failures": r.failures}
            for r in coint
        ],
    })

    dead = [r for r in selection if r.reps == 0]
    for r in selection:
        if r.failures:
            print(f"note: {r.design.value} n={r.n} {r.estimator.value}: "
                  f"{r.failures} failed replications", file=sys.stderr)
    if dead:
        print(f"error: {len(dead)} cells failed in every replication", file=sys.stderr)
        return 1
    print(f"wrote reports to {out_dir}")
    return 0


def _write_table2a(path, selection, estimators, header) -> None:
    keys = sorted({(r.design.value, r.n) for r in selection})
    by = {(r.design.value, r.n, r.estimator): r for r in selection}
    with open(path, "w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["design", "n", *(f.value for f in estimators)])
        for design, n in keys:
            row = [design, n]
            for fam in estimators:
                r = by.get((design, n, fam))
                row.append("" if r is None else _fmt(r.mpse))
            writer.writerow(row)


def _write_table2b(path, selection, estimators, header) -> None:
    keys = sorted({(r.design.value, r.n) for r in selection})
    by = {(r.design.value, r.n, r.estimator): r for r in selection}
    with open(path, "w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["design", "n", "metric", *(f.value for f in estimators)])
        for design, n in keys:
            for metric in ("sr1", "sr2", "sr"):
                row = [design, n, metric]
                for fam in estimators:
                    r = by.get((design, n, fam))
                    row.append("" if r is None else _fmt(getattr(r, metric)))
                writer.writerow(row)


def _write_table3(path, coint, header) -> None:
    with open(path, "w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["design", "n", "estimator", "both_zero",
                         "exactly_one_zero", "neither_zero", "reps", "failures"])
        for r in sorted(coint, key=lambda r: (r.design.value, r.n, r.estimator.value)):
            writer.writerow([
                r.design.value, r.n, r.estimator.value, _fmt(r.frac_both_zero),
                _fmt(r.frac_exactly_one_zero), _fmt(r.frac_neither_zero),
                r.reps, r.failures,
            ])


def _cmd_forecast(args, argv) -> int:
    panel = load_panel(args.csv)
    windows = [int(v) for v in _parse_list(args.windows)]
    horizons = [_parse_horizon(v) for v in _parse_list(args.horizons)]
    estimators = _families(_parse_list(args.estimators))
    if args.selector == "fixed" and not args.c_lambda:
        raise ConfigError("--selector fixed needs --c-lambda")
    tuning = TuningConfig(
        selector=args.selector,
        grid=default_grid(args.grid_size, (args.grid_min, args.grid_max)),
        folds=args.folds,
        gamma=args.gamma,
        c_lambda=args.c_lambda,
    )
    os.makedirs(args.out, exist_ok=True)
    prov = _provenance(argv, {
        "panel": os.path.basename(str(args.csv)), "months": panel.n,
        "selector": tuning.selector, "folds": tuning.folds, "gamma": tuning.gamma,
        "grid": f"{args.grid_size} points in [{args.grid_min}, {args.grid_max}]",
    })
    header = _header_lines(prov)

    results = []
    for window in windows:
        for h in horizons:
            for fam in estimators:
                res = rolling_forecast(panel, h, fam, window, tuning, jobs=args.jobs)
                results.append(res)
                if res.failed_windows:
                    print(f"note: {fam.value} w={window} h={res.horizon.months}m: "
                          f"{res.failed_windows} failed windows", file=sys.stderr)
                if fam not in (Family.OLS, Family.RWWD):
                    name = f"coefficients_{fam.value}_w{window}_h{res.horizon.months}.csv"
                    write_coefficient_csv(res, os.path.join(args.out, name), header)

    write_forecast_csv(results, os.path.join(args.out, "forecasts.csv"), header)
    write_forecast_metrics_csv(results, os.path.join(args.out, "metrics.csv"), header)
    _write_json(os.path.join(args.out, "report.json"), {
        "provenance": prov,
        "metrics": [
            {"estimator": r.family.value, "window_months": r.window,
             "horizon_months": r.horizon.months, "rmpse_x100": r.rmpse_x100,
             "mpae_x100": r.mpae_x100, "windows": int(r.ok.sum()),
             "failed_windows": r.failed_windows}
            for r in results
        ],
    })
    print(f"wrote reports to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="predlasso",
        description="Penalized predictive regression: simulation, selection and forecasting.",
    )
    parser.add_argument("--version", action="version", version=f"predlasso {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="write one simulated dataset to CSV")
    sim.add_argument("--design", required=True, choices=[d.value for d in Design])
    sim.add_argument("--n", type=int, required=True, help="estimation sample size")
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--burn-in", type=int, default=200)
    sim.add_argument("--noise-scale", type=float, default=1.0)
    sim.add_argument("--out-prefix", required=True)

    mc = sub.add_parser("montecarlo", help="run replication experiments from a config")
    mc.add_argument("--config", required=True)
    mc.add_argument("--jobs", type=int, default=1)

    fc = sub.add_parser("forecast", help="rolling forecasts on a monthly panel CSV")
    fc.add_argument("--csv", required=True)
    fc.add_argument("--windows", default="120,180")
    fc.add_argument("--horizons", default="1/12,1/4,1/2,1,2,3")
    fc.add_argument("--estimators", default="rwwd,ols,plasso,slasso,alasso,talasso")
    fc.add_argument("--selector", default="cv", choices=["cv", "bic", "fixed"])
    fc.add_argument("--c-lambda", type=float, default=None)
    fc.add_argument("--folds", type=int, default=10)
    fc.add_argument("--gamma", type=float, default=1.0)
    fc.add_argument("--grid-min", type=float, default=1e-5)
    fc.add_argument("--grid-max", type=float, default=1.0)
    fc.add_argument("--grid-size", type=int, default=30)
    fc.add_argument("--out", required=True)
    fc.add_argument("--jobs", type=int, default=1)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args, argv)
        if args.command == "montecarlo":
            return _cmd_montecarlo(args, argv)
        return _cmd_forecast(args, argv)
    except (ConfigError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (PredlassoError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
