"""Experiment configuration, the 20-case study and CSV report emission.

Configuration files use INI syntax (read with :mod:`configparser`)::

    [model]
    models = both            # vasicek | lhw | both
    a = 0.25
    k = 0.05
    sigma = 0.004
    r0 = 0.02
    alpha = 0.25
    varsigma = calibrate     # a number, or "calibrate"
    cap_target = 20.161      # a number, or "vasicek" for the Vasicek closed-form cap

    [simulation]
    horizon = 10
    steps = 200
    paths = 10000
    seed = 2013
    q = 5

    [swap]
    maturity = 10            # yearly payment dates 1..maturity
    rate = par               # a number, or "par"
    notional = 310.136066
    directions = receiver, payer

    [cap]
    resets = 1, 2, 3, 4, 5, 6, 7, 8, 9, 10
    delta = 1

    [tva]                    # defaults shared by every CSA section
    gamma = 0.10
    ...

    [csa 1]                  # one section per CSA specification
    r_frak = 0.4
    close_out = clean        # clean | pre_default
    collateral = none        # none | continuous_clean | continuous_pre_default

See ``configs/default.ini`` for the complete default file.
"""

from __future__ import annotations

import configparser
import csv
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from .calibration import calibrate_varsigma
from .curves import LhwModel, LhwParams, VasicekModel, VasicekParams
from .pricing import PAYER, RECEIVER, CapSpec, SwapSpec, cap_lhw, cap_vasicek, clean_prices_on_paths, fixed_leg_value, swap_rate
from .simulation import GridSpec, record_fixings, simulate
from .tva import CLEAN, NO_COLLATERAL, CONTINUOUS_CLEAN, PRE_DEFAULT, TERMS, CsaSpec, decompose_tva, linear_tva_mc, solve_tva_bsde

MODELS = ("vasicek", "lhw")
SAMPLE_PATHS = 20

TVA_TABLE_HEADER = ["model", "direction", "csa_id", "TVA", "CVA", "DVA", "LVA", "RC", "ci_low", "ci_high"]
PROFILE_HEADER = ["model", "direction", "csa_id", "term", "time", "value"]
CALIBRATION_HEADER = ["quantity", "value"]
PATHS_HEADER = ["model", "path", "step", "time", "rate", "clean_price"]
TVA_PATHS_HEADER = ["model", "direction", "csa_id", "path", "step", "time", "theta"]
CURVES_HEADER = ["time", "zero_rate", "forward", "discount", "kappa"]

# (TVA, CVA, DVA, LVA, RC) of the 20-case reference study, keyed by (model, direction, csa id)
REFERENCE_TABLE = {
    ("vasicek", RECEIVER, "1"): (1.47, -0.06, 1.75, 0.71, -0.92),
    ("vasicek", RECEIVER, "2"): (1.40, -0.06, 1.75, 0.64, -0.91),
    ("vasicek", RECEIVER, "3"): (0.40, -0.06, 0.00, 0.76, -0.29),
    ("vasicek", RECEIVER, "4"): (0.66, -0.08, 0.00, 0.74, 0.00),
    ("vasicek", RECEIVER, "5"): (0.43, 0.00, 0.00, 0.72, -0.29),
    ("vasicek", PAYER, "1"): (-1.90, -2.45, 0.04, -0.68, 1.17),
    ("vasicek", PAYER, "2"): (-2.64, -2.45, 0.04, -1.92, 1.67),
    ("vasicek", PAYER, "3"): (-2.67, -2.45, 0.00, -1.92, 1.68),
    ("vasicek", PAYER, "4"): (-3.59, -1.77, 0.00, -1.83, 0.00),
    ("vasicek", PAYER, "5"): (-0.50, 0.00, 0.00, -0.81, 0.31),
    ("lhw", RECEIVER, "1"): (1.34, -0.90, 2.34, 0.72, -0.85),
    ("lhw", RECEIVER, "2"): (0.93, -0.90, 2.34, 0.15, -0.68),
    ("lhw", RECEIVER, "3"): (-0.45, -0.90, 0.00, 0.32, 0.12),
    ("lhw", RECEIVER, "4"): (-0.43, -0.76, 0.00, 0.32, 0.00),
    ("lhw", RECEIVER, "5"): (0.44, 0.00, 0.00, 0.72, -0.29),
    ("lhw", PAYER, "1"): (-2.08, -3.28, 0.64, -0.66, 1.25),
    ("lhw", PAYER, "2"): (-3.17, -3.28, 0.64, -2.41, 1.92),
    ("lhw", PAYER, "3"): (-3.59, -3.28, 0.00, -2.38, 2.11),
    ("lhw", PAYER, "4"): (-4.80, -2.49, 0.00, -2.26, 0.00),
    ("lhw", PAYER, "5"): (-0.51, 0.00, 0.00, -0.81, 0.31),
}


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    models: Tuple[str, ...] = MODELS
    vasicek: VasicekParams = VasicekParams(a=0.25, k=0.05, sigma=0.004, r0=0.02)
    alpha: float = 0.25
    varsigma: Optional[float] = None
    calibrate: bool = True
    cap_target: Optional[float] = 20.161
    cap_resets: Tuple[float, ...] = tuple(float(x) for x in range(1, 11))
    cap_delta: float = 1.0
    grid: GridSpec = GridSpec(10.0, 200)
    paths: int = 10_000
    seed: int = 2013
    q: int = 5
    swap_dates: Tuple[float, ...] = tuple(float(x) for x in range(11))
    swap_rate: Optional[float] = None
    notional: float = 310.136066
    directions: Tuple[str, ...] = (RECEIVER, PAYER)
    csas: Tuple[CsaSpec, ...] = ()
    output_dir: str = "out"
    precision: int = 6
    workers: int = 1

    def __post_init__(self):
        bad = [m for m in self.models if m not in MODELS]
        if bad or not self.models:
            raise ConfigError(f"model.models: unknown model(s) {bad}; use vasicek, lhw or both")
        for d in self.directions:
            if d not in (RECEIVER, PAYER):
                raise ConfigError(f"swap.directions: unknown direction {d!r}")
        if "lhw" in self.models and self.varsigma is None and not self.calibrate:
            raise ConfigError("model.varsigma: give a value or 'calibrate' when the LHW model is used")
        if self.paths < 1:
            raise ConfigError("simulation.paths must be positive")
        if not 1 <= self.q <= self.paths:
            raise ConfigError("simulation.q must lie between 1 and the number of paths")
        for t in self.swap_dates:
            try:
                self.grid.index_of(t)
            except ValueError as exc:
                raise ConfigError(f"swap: {exc}") from None
        if self.swap_dates[-1] > self.grid.horizon + 1e-12:
            raise ConfigError("swap: last payment date lies beyond the simulation horizon")
        ids = [c.name for c in self.csas]
        if len(set(ids)) != len(ids):
            raise ConfigError(f"csa: duplicate CSA identifiers {ids}")
        if self.precision < 1:
            raise ConfigError("precision must be at least 1")


def study_csa_specs() -> Tuple[CsaSpec, ...]:
    base = dict(gamma=0.10, p=0.5, p_bar=0.7, b_plus=0.015, b_minus=0.015, lambda_plus=0.015, lambda_bar=0.045)
    rows = [
        ("1", 0.4, 0.4, 0.4, CLEAN, NO_COLLATERAL),
        ("2", 1.0, 0.4, 0.4, CLEAN, NO_COLLATERAL),
        ("3", 1.0, 1.0, 0.4, CLEAN, NO_COLLATERAL),
        ("4", 1.0, 1.0, 0.4, PRE_DEFAULT, NO_COLLATERAL),
        ("5", 1.0, 0.4, 0.4, CLEAN, CONTINUOUS_CLEAN),
    ]
    return tuple(
        CsaSpec(r_frak=rf, rho=rho, rho_bar=rho_bar, close_out=co, collateral=coll, name=name, **base)
        for name, rf, rho, rho_bar, co, coll in rows
    )


def default_paper_config(**overrides) -> ExperimentConfig:
    """The two-model, two-direction, five-CSA study with its reference parameters."""
    cfg = ExperimentConfig(csas=study_csa_specs())
    return replace(cfg, **overrides) if overrides else cfg


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

_CSA_FIELDS = {
    "gamma": float,
    "p": float,
    "p_bar": float,
    "rho": float,
    "rho_bar": float,
    "r_frak": float,
    "b_plus": float,
    "b_minus": float,
    "lambda_plus": float,
    "lambda_bar": float,
    "close_out": str,
    "collateral": str,
}


def _line_of(text: str, section: str, key: Optional[str]) -> Optional[int]:
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        m = re.match(r"\[(.+)\]", stripped)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return lineno
            continue
        if current == section and key is not None and re.match(rf"{re.escape(key)}\s*[=:]", stripped):
            return lineno
    return None


def load_config(path) -> ExperimentConfig:
    text = Path(path).read_text()
    return parse_config(text, source=str(path))


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None

    def where(section, key=None):
        line = _line_of(text, section, key)
        loc = f"{source}:{line}" if line else source
        return f"{loc}: [{section}]" + (f" {key}" if key else "")

    def get(section, key, conv, default):
        if not parser.has_option(section, key):
            return default
        raw = parser.get(section, key).strip()
        try:
            return conv(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where(section, key)}: cannot read {raw!r} ({exc})") from None

    def floats(raw):
        return tuple(float(x) for x in raw.replace(",", " ").split())

    def words(raw):
        return tuple(x for x in raw.replace(",", " ").split())

    known = {"model", "simulation", "swap", "cap", "tva", "output"}
    for sec in parser.sections():
        if sec not in known and not sec.startswith("csa"):
            raise ConfigError(f"{where(sec)}: unknown section")

    models = get("model", "models", words, MODELS)
    if models == ("both",):
        models = MODELS
    try:
        vasicek = VasicekParams(
            a=get("model", "a", float, 0.25),
            k=get("model", "k", float, 0.05),
            sigma=get("model", "sigma", float, 0.004),
            r0=get("model", "r0", float, 0.02),
        )
    except ValueError as exc:
        raise ConfigError(f"{where('model')}: {exc}") from None
    raw_vs = get("model", "varsigma", str, "calibrate").lower()
    calibrate = raw_vs == "calibrate"
    varsigma = None if calibrate else get("model", "varsigma", float, None)
    raw_target = get("model", "cap_target", str, "20.161").lower()
    cap_target = None if raw_target == "vasicek" else get("model", "cap_target", float, None)

    horizon = get("simulation", "horizon", float, 10.0)
    steps = get("simulation", "steps", int, 200)
    try:
        grid = GridSpec(horizon, steps)
    except ValueError as exc:
        raise ConfigError(f"{where('simulation')}: {exc}") from None

    maturity = get("swap", "maturity", int, 10)
    raw_rate = get("swap", "rate", str, "par").lower()
    rate = None if raw_rate == "par" else get("swap", "rate", float, None)

    tva_defaults = {}
    for key, conv in _CSA_FIELDS.items():
        if parser.has_option("tva", key):
            tva_defaults[key] = get("tva", key, conv, None)
    for key in parser.options("tva") if parser.has_section("tva") else ():
        if key not in _CSA_FIELDS:
            raise ConfigError(f"{where('tva', key)}: unknown field")

    csas = []
    for sec in parser.sections():
        if not sec.startswith("csa"):
            continue
        name = sec[3:].strip() or str(len(csas) + 1)
        values = dict(tva_defaults)
        for key in parser.options(sec):
            if key not in _CSA_FIELDS:
                raise ConfigError(f"{where(sec, key)}: unknown field")
            values[key] = get(sec, key, _CSA_FIELDS[key], None)
        try:
            csas.append(CsaSpec(name=name, **values))
        except ValueError as exc:
            raise ConfigError(f"{where(sec)}: {exc}") from None

    try:
        return ExperimentConfig(
            models=models,
            vasicek=vasicek,
            alpha=get("model", "alpha", float, 0.25),
            varsigma=varsigma,
            calibrate=calibrate,
            cap_target=cap_target,
            cap_resets=get("cap", "resets", floats, tuple(float(x) for x in range(1, 11))),
            cap_delta=get("cap", "delta", float, 1.0),
            grid=grid,
            paths=get("simulation", "paths", int, 10_000),
            seed=get("simulation", "seed", int, 2013),
            q=get("simulation", "q", int, 5),
            swap_dates=tuple(float(x) for x in range(maturity + 1)),
            swap_rate=rate,
            notional=get("swap", "notional", float, 310.136066),
            directions=get("swap", "directions", words, (RECEIVER, PAYER)),
            csas=tuple(csas),
            output_dir=get("output", "dir", str, "out"),
            precision=get("output", "precision", int, 6),
            workers=get("simulation", "workers", int, 1),
        )
    except ConfigError as exc:
        if str(exc).startswith(source):
            raise
        raise ConfigError(f"{source}: {exc}") from None


# ---------------------------------------------------------------------------
# running the study
# ---------------------------------------------------------------------------


@dataclass
class CaseResult:
    model: str
    direction: str
    csa_id: str
    theta0: float
    cva: float
    dva: float
    lva: float
    rc: float
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    profiles: Dict[str, np.ndarray] = field(default_factory=dict, repr=False)
    theta_sample: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def key(self):
        return (self.model, self.direction, self.csa_id)


@dataclass
class ReportBundle:
    calibration: Dict[str, object]
    cases: List[CaseResult]
    files: Dict[str, Path]


def build_models(config: ExperimentConfig):
    """Both models plus the calibration summary."""
    vas = VasicekModel(config.vasicek)
    curve = vas.curve
    swap = SwapSpec(config.swap_dates, 0.0, config.notional)
    K = swap_rate(swap, curve) if config.swap_rate is None else config.swap_rate
    swap = swap.with_rate(K)
    cap = CapSpec(config.cap_resets, config.cap_delta, K, config.notional)
    cap_vas = cap_vasicek(cap, config.vasicek)
    summary = {
        "swap_rate": K,
        "notional": config.notional,
        "fixed_leg": fixed_leg_value(swap, curve),
        "cap_vasicek": cap_vas,
    }
    models = {"vasicek": vas}
    if "lhw" in config.models:
        if config.calibrate:
            target = cap_vas if config.cap_target is None else config.cap_target
            vs = calibrate_varsigma(target, config.alpha, curve, cap)
            summary["cap_target"] = target
            summary["varsigma_source"] = "calibrated"
        else:
            vs = config.varsigma
            summary["varsigma_source"] = "fixed"
        lhw = LhwModel(LhwParams(alpha=config.alpha, varsigma=vs, curve=curve))
        summary["varsigma"] = vs
        summary["cap_lhw"] = cap_lhw(cap, lhw.params)
        models["lhw"] = lhw
    return {k: models[k] for k in config.models}, swap, summary


def _run_case(model_name, paths, prices, swap, csa, q, direction):
    sw = swap.with_direction(direction)
    P = prices if direction == RECEIVER else -prices
    surface = solve_tva_bsde(paths, csa, sw, q=q, prices=P)
    dec = decompose_tva(paths, surface, csa, sw, prices=P)
    res = CaseResult(model_name, direction, csa.name, surface.theta0, dec.cva, dec.dva, dec.lva, dec.rc)
    if csa.linear_kind is not None:
        lin = linear_tva_mc(paths, csa, sw, prices=P)
        res.ci_low, res.ci_high = lin.ci_low, lin.ci_high
    res.profiles = {name: dec.profiles[name] for name in TERMS}
    res.profiles.update({f"{name}_undiscounted": dec.raw_profiles[name] for name in TERMS})
    res.profiles["TVA_mean"] = surface.theta.mean(axis=0)
    res.theta_sample = surface.theta[:SAMPLE_PATHS].copy()
    return res


def run_experiment(config: ExperimentConfig, write: bool = True) -> ReportBundle:
    models, swap, summary = build_models(config)
    cases: List[CaseResult] = []
    samples = {}
    times = config.grid.times
    for name, model in models.items():
        paths = record_fixings(simulate(model, config.grid, config.paths, config.seed), swap)
        prices = clean_prices_on_paths(paths, swap.with_direction(RECEIVER))
        samples[name] = (paths.rates[:SAMPLE_PATHS], prices[:SAMPLE_PATHS])
        jobs = [(d, c) for d in config.directions for c in config.csas]
        if config.workers > 1 and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                futs = [pool.submit(_run_case, name, paths, prices, swap, c, config.q, d) for d, c in jobs]
                cases.extend(f.result() for f in futs)
        else:
            cases.extend(_run_case(name, paths, prices, swap, c, config.q, d) for d, c in jobs)

    files = {}
    if write:
        files = write_reports(config, summary, cases, samples, models, times)
    return ReportBundle(calibration=summary, cases=cases, files=files)


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------


def _fmt(x, precision):
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return f"{float(x):.{precision}g}"


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_reports(config, summary, cases, samples, models, times) -> Dict[str, Path]:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    pr = config.precision
    fmt = lambda x: _fmt(x, pr)  # noqa: E731
    files = {}

    files["calibration"] = out / "calibration.csv"
    _write_csv(files["calibration"], CALIBRATION_HEADER, [(k, fmt(v)) for k, v in summary.items()])

    files["tva_table"] = out / "tva_table.csv"
    _write_csv(
        files["tva_table"],
        TVA_TABLE_HEADER,
        [
            (c.model, c.direction, c.csa_id, fmt(c.theta0), fmt(c.cva), fmt(c.dva), fmt(c.lva), fmt(c.rc), fmt(c.ci_low), fmt(c.ci_high))
            for c in cases
        ],
    )

    files["exposure_profiles"] = out / "exposure_profiles.csv"
    rows = []
    for c in cases:
        for term, values in c.profiles.items():
            rows.extend((c.model, c.direction, c.csa_id, term, fmt(t), fmt(v)) for t, v in zip(times, values))
    _write_csv(files["exposure_profiles"], PROFILE_HEADER, rows)

    files["paths_sample"] = out / "paths_sample.csv"
    rows = []
    for name, (rates, prices) in samples.items():
        for j in range(rates.shape[0]):
            rows.extend((name, j, i, fmt(times[i]), fmt(rates[j, i]), fmt(prices[j, i])) for i in range(rates.shape[1]))
    _write_csv(files["paths_sample"], PATHS_HEADER, rows)

    files["tva_paths"] = out / "tva_paths.csv"
    rows = []
    for c in cases:
        th = c.theta_sample
        for j in range(th.shape[0]):
            rows.extend((c.model, c.direction, c.csa_id, j, i, fmt(times[i]), fmt(th[j, i])) for i in range(th.shape[1]))
    _write_csv(files["tva_paths"], TVA_PATHS_HEADER, rows)

    files["curves"] = out / "curves.csv"
    curve = next(iter(models.values())).curve
    kappa = models["lhw"].kappa(times) if "lhw" in models else [None] * len(times)
    _write_csv(
        files["curves"],
        CURVES_HEADER,
        [(fmt(t), fmt(curve.zero_rate(t)), fmt(curve.forward(t)), fmt(curve.discount(t)), fmt(kp)) for t, kp in zip(times, kappa)],
    )
    return files


def seed_from_env(default: int) -> int:
    raw = os.environ.get("TVA_SEED")
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"TVA_SEED must be an integer, got {raw!r}") from None
