"""Command-line entry point: ``tva {calibrate,price,tva,reproduce-paper}``.

Exit status is 0 on success; failures print ``error[<category>]: <message>``
to stderr and exit with the category's code.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .experiment import (
    REFERENCE_TABLE,
    ConfigError,
    _fmt,
    _write_csv,
    build_models,
    default_paper_config,
    load_config,
    run_experiment,
    seed_from_env,
)
from .pricing import CapSpec, caplet_lhw_fourier, caplet_vasicek
from .simulation import GridSpec

EXIT_CODES = {"config": 3, "numerical": 4, "io": 5}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI experiment file (defaults to the reference study)")
    p.add_argument("--seed", type=int, help="base RNG seed (the TVA_SEED environment variable takes precedence)")
    p.add_argument("--paths", type=int, help="number of Monte Carlo paths")
    p.add_argument("--steps", type=int, help="number of time steps on the simulation grid")
    p.add_argument("--out", help="output directory")
    p.add_argument("--precision", type=int, help="significant digits written to CSV files (default 6)")
    p.add_argument("--workers", type=int, help="threads used to run cases concurrently")
    p.add_argument("--models", choices=("vasicek", "lhw", "both"), help="restrict the model set")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tva", description="TVA of interest-rate swaps under Vasicek and Levy Hull-White models")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="swap rate, notional, cap prices and the calibrated IG parameter")
    _common(p)

    p = sub.add_parser("price", help="clean swap and cap/caplet prices at time 0")
    _common(p)

    p = sub.add_parser("tva", help="run the configured TVA cases and write all reports")
    _common(p)
    p.add_argument("--csa", action="append", help="only run the CSA with this identifier (repeatable)")
    p.add_argument("--direction", choices=("receiver", "payer", "both"), help="restrict the swap direction")

    p = sub.add_parser("reproduce-paper", help="run the 20-case study and compare with the reference table")
    _common(p)
    return parser


def _config_from_args(args):
    cfg = load_config(args.config) if args.config else default_paper_config()
    changes = {}
    if args.paths is not None:
        changes["paths"] = args.paths
    if args.steps is not None:
        try:
            changes["grid"] = GridSpec(cfg.grid.horizon, args.steps)
        except ValueError as exc:
            raise ConfigError(f"--steps: {exc}") from None
    if args.out is not None:
        changes["output_dir"] = args.out
    if args.precision is not None:
        changes["precision"] = args.precision
    if args.workers is not None:
        changes["workers"] = args.workers
    if args.models is not None:
        changes["models"] = ("vasicek", "lhw") if args.models == "both" else (args.models,)
    seed = args.seed if args.seed is not None else cfg.seed
    changes["seed"] = seed_from_env(seed)
    if getattr(args, "csa", None):
        wanted = set(args.csa)
        unknown = wanted - {c.name for c in cfg.csas}
        if unknown:
            raise ConfigError(f"--csa: unknown CSA identifier(s) {sorted(unknown)}")
        changes["csas"] = tuple(c for c in cfg.csas if c.name in wanted)
    direction = getattr(args, "direction", None)
    if direction and direction != "both":
        changes["directions"] = (direction,)
    try:
        return replace(cfg, **changes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _print_summary(summary, precision):
    for key, value in summary.items():
        print(f"{key:>16s}  {_fmt(value, precision)}")


def cmd_calibrate(cfg):
    _, _, summary = build_models(cfg)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "calibration.csv", ["quantity", "value"], [(k, _fmt(v, cfg.precision)) for k, v in summary.items()])
    _print_summary(summary, cfg.precision)


def cmd_price(cfg):
    models, swap, summary = build_models(cfg)
    cap = CapSpec(cfg.cap_resets, cfg.cap_delta, summary["swap_rate"], cfg.notional)
    rows = [("swap", "curve", "", _fmt(summary["fixed_leg"], cfg.precision))]
    for T in cap.resets:
        v = cfg.notional * caplet_vasicek(T, cap.delta, cap.K, cfg.vasicek)
        rows.append(("caplet", "vasicek", _fmt(T, cfg.precision), _fmt(v, cfg.precision)))
        if "lhw" in models:
            w = cfg.notional * caplet_lhw_fourier(T, cap.delta, cap.K, models["lhw"].params)
            rows.append(("caplet", "lhw", _fmt(T, cfg.precision), _fmt(w, cfg.precision)))
    rows.append(("cap", "vasicek", "", _fmt(summary["cap_vasicek"], cfg.precision)))
    if "cap_lhw" in summary:
        rows.append(("cap", "lhw", "", _fmt(summary["cap_lhw"], cfg.precision)))
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "prices.csv", ["instrument", "model", "reset", "value"], rows)
    print(f"swap rate K = {_fmt(summary['swap_rate'], cfg.precision)}, fixed leg = {_fmt(summary['fixed_leg'], cfg.precision)}")
    print("clean swap price at t=0: 0 (par)")
    for kind, model, reset, value in rows[1:]:
        print(f"{kind:>7s} {model:>8s} {reset:>6s}  {value}")


def _print_table(bundle, precision, compare=False):
    head = f"{'model':8s} {'dir':8s} {'csa':>3s} {'TVA':>9s} {'CVA':>9s} {'DVA':>9s} {'LVA':>9s} {'RC':>9s}"
    print(head + ("  max|diff| vs reference" if compare else ""))
    worst = 0.0
    for c in bundle.cases:
        vals = (c.theta0, c.cva, c.dva, c.lva, c.rc)
        line = f"{c.model:8s} {c.direction:8s} {c.csa_id:>3s} " + " ".join(f"{v:9.4f}" for v in vals)
        ref = REFERENCE_TABLE.get(c.key)
        if compare and ref is not None:
            diff = max(abs(a - b) for a, b in zip(vals, ref))
            worst = max(worst, diff)
            line += f"  {diff:.3f}"
        if c.ci_low is not None:
            line += f"  CI [{c.ci_low:.4f}, {c.ci_high:.4f}]"
        print(line)
    return worst


def cmd_tva(cfg, compare=False):
    bundle = run_experiment(cfg)
    _print_summary(bundle.calibration, cfg.precision)
    if bundle.cases:
        worst = _print_table(bundle, cfg.precision, compare=compare)
        if compare:
            print(f"largest deviation from the reference table: {worst:.3f}")
    print(f"reports written to {cfg.output_dir}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        if args.command == "calibrate":
            cmd_calibrate(cfg)
        elif args.command == "price":
            cmd_price(cfg)
        elif args.command == "tva":
            cmd_tva(cfg)
        else:
            cmd_tva(cfg, compare=True)
    except ConfigError as exc:
        return _fail("config", exc)
    except (ArithmeticError, FloatingPointError) as exc:
        return _fail("numerical", exc)
    except OSError as exc:
        return _fail("io", exc)
    except ValueError as exc:
        return _fail("numerical", exc)
    return 0


def _fail(category, exc) -> int:
    print(f"error[{category}]: {exc}", file=sys.stderr)
    return EXIT_CODES[category]


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
