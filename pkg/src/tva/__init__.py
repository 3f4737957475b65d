"""Total valuation adjustment (CVA, DVA, LVA, RC) of interest-rate swaps.

Short-rate models (Vasicek and a Hull-White model driven by an inverse
Gaussian subordinator), clean pricing, cap calibration, a regression
solver for the nonlinear TVA equation and a linear Monte Carlo benchmark.
"""

from .calibration import calibrate_varsigma
from .curves import (
    InitialCurve,
    LhwModel,
    LhwParams,
    VasicekModel,
    VasicekParams,
    ig_cumulant,
    lhw_bond,
    lhw_coefficients,
    lhw_kappa,
    vasicek_bond,
    vasicek_coefficients,
    vasicek_initial_curve,
)
from .experiment import ConfigError, ExperimentConfig, default_paper_config, load_config, parse_config, run_experiment
from .kernels import BACKEND
from .pricing import (
    PAYER,
    RECEIVER,
    CapSpec,
    SwapSpec,
    cap_lhw,
    cap_vasicek,
    caplet_lhw_fourier,
    caplet_lhw_mc,
    caplet_vasicek,
    caplets_lhw_mc,
    clean_prices_on_paths,
    collateralized_swap_price,
    fixed_leg_value,
    fra_price,
    swap_price,
    swap_rate,
)
from .simulation import GridSpec, PathSet, record_fixings, sample_ig_increment, simulate, simulate_lhw, simulate_vasicek
from .tva import (
    CsaSpec,
    TvaDecomposition,
    TvaSurface,
    LinearTvaEstimate,
    decompose_tva,
    knn_regress,
    linear_tva_mc,
    solve_tva_bsde,
    tva_coefficient,
    tva_terms,
)

__version__ = "0.1.0"

__all__ = [
    "calibrate_varsigma",
    "InitialCurve",
    "LhwModel",
    "LhwParams",
    "VasicekModel",
    "VasicekParams",
    "ig_cumulant",
    "lhw_bond",
    "lhw_coefficients",
    "lhw_kappa",
    "vasicek_bond",
    "vasicek_coefficients",
    "vasicek_initial_curve",
    "ConfigError",
    "ExperimentConfig",
    "default_paper_config",
    "load_config",
    "parse_config",
    "run_experiment",
    "BACKEND",
    "PAYER",
    "RECEIVER",
    "CapSpec",
    "SwapSpec",
    "cap_lhw",
    "cap_vasicek",
    "caplet_lhw_fourier",
    "caplet_lhw_mc",
    "caplet_vasicek",
    "caplets_lhw_mc",
    "clean_prices_on_paths",
    "collateralized_swap_price",
    "fixed_leg_value",
    "fra_price",
    "swap_price",
    "swap_rate",
    "GridSpec",
    "PathSet",
    "record_fixings",
    "sample_ig_increment",
    "simulate",
    "simulate_lhw",
    "simulate_vasicek",
    "CsaSpec",
    "TvaDecomposition",
    "TvaSurface",
    "LinearTvaEstimate",
    "decompose_tva",
    "knn_regress",
    "linear_tva_mc",
    "solve_tva_bsde",
    "tva_coefficient",
    "tva_terms",
]
