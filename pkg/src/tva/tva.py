"""TVA coefficient, regression BSDE solver, linear Monte Carlo benchmark and
the CVA/DVA/LVA/RC decomposition.

Sign conventions: ``P`` is the bank's clean value of the contract (positive
when the bank owes), the TVA ``theta`` is subtracted from ``P`` to get the
bank's price.  Positive TVA terms are deal facilitating, negative ones deal
hindering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from . import kernels
from .pricing import clean_prices_on_paths

# close-out conventions
CLEAN = "clean"  # Q = P
PRE_DEFAULT = "pre_default"  # Q = P - theta

# collateral conventions
NO_COLLATERAL = "none"  # Gamma = 0
CONTINUOUS_CLEAN = "continuous_clean"  # Gamma = Q = P
CONTINUOUS_PRE_DEFAULT = "continuous_pre_default"  # Gamma = Q = P - theta

TERMS = ("CVA", "DVA", "LVA", "RC")


@dataclass(frozen=True)
class CsaSpec:
    gamma: float = 0.10
    p: float = 0.5
    p_bar: float = 0.7
    rho: float = 0.4
    rho_bar: float = 0.4
    r_frak: float = 0.4
    b_plus: float = 0.015
    b_minus: float = 0.015
    lambda_plus: float = 0.015
    lambda_bar: float = 0.045
    close_out: str = CLEAN
    collateral: str = NO_COLLATERAL
    name: str = ""

    def __post_init__(self):
        for fld in ("p", "p_bar", "rho", "rho_bar", "r_frak"):
            v = getattr(self, fld)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{fld} must lie in [0, 1], got {v}")
        if self.gamma < 0:
            raise ValueError("default intensity gamma must be nonnegative")
        if self.close_out not in (CLEAN, PRE_DEFAULT):
            raise ValueError(f"unknown close-out convention {self.close_out!r}")
        if self.collateral not in (NO_COLLATERAL, CONTINUOUS_CLEAN, CONTINUOUS_PRE_DEFAULT):
            raise ValueError(f"unknown collateral convention {self.collateral!r}")
        if self.collateral == CONTINUOUS_CLEAN and self.close_out != CLEAN:
            raise ValueError("collateral Gamma = Q = P requires the clean close-out Q = P")
        if self.collateral == CONTINUOUS_PRE_DEFAULT and self.close_out != PRE_DEFAULT:
            raise ValueError("collateral Gamma = Q = P - theta requires the pre-default close-out")

    @property
    def lambda_tilde(self) -> float:
        """External borrowing basis net of the bank's credit spread."""
        return self.lambda_bar - self.gamma * self.p * (1.0 - self.r_frak)

    @property
    def linear_kind(self) -> Optional[str]:
        """``"clean"`` or ``"pre_default"`` when the TVA equation is linear, else ``None``."""
        if self.close_out == CLEAN and self.collateral in (NO_COLLATERAL, CONTINUOUS_CLEAN):
            if abs(self.lambda_plus - self.lambda_tilde) <= 1e-12:
                return CLEAN
        if self.collateral == CONTINUOUS_PRE_DEFAULT and self.b_plus == self.b_minus:
            return PRE_DEFAULT
        return None


def _pos(x):
    return np.maximum(x, 0.0)


def _neg(x):
    return np.maximum(-x, 0.0)


def close_out_and_collateral(csa: CsaSpec, P, theta):
    """``(Q, Gamma)`` implied by the CSA conventions."""
    Q = P if csa.close_out == CLEAN else P - theta
    if csa.collateral == NO_COLLATERAL:
        Gamma = np.zeros_like(np.asarray(P, dtype=float))
    else:
        Gamma = Q
    return Q, Gamma


def tva_terms(csa: CsaSpec, P, theta):
    """The CVA, DVA, LVA and RC drift terms at clean value ``P`` and TVA ``theta``."""
    P = np.asarray(P, dtype=float)
    theta = np.asarray(theta, dtype=float)
    Q, Gamma = close_out_and_collateral(csa, P, theta)
    chi = Q - Gamma
    residual = P - theta - Gamma
    cva = -csa.gamma * csa.p_bar * (1.0 - csa.rho_bar) * _neg(chi)
    dva = csa.gamma * csa.p * (1.0 - csa.rho) * _pos(chi)
    lva = (
        csa.b_plus * _pos(Gamma)
        - csa.b_minus * _neg(Gamma)
        + csa.lambda_plus * _pos(residual)
        - csa.lambda_tilde * _neg(residual)
    )
    rc = csa.gamma * (P - theta - Q)
    return cva, dva, lva, rc


def tva_coefficient(csa: CsaSpec, r, P, theta):
    """Full BSDE driver: the four TVA terms minus ``r * theta``."""
    cva, dva, lva, rc = tva_terms(csa, P, theta)
    return cva + dva + lva + rc - np.asarray(r, dtype=float) * theta


def knn_regress(x, y, q: int = 5):
    """q-nearest-neighbour average of ``y`` in the one-dimensional state ``x``.

    Each point's neighbourhood contains the point itself; distance ties go to
    the left neighbour in sorted order.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    m = x.size
    if y.size != m:
        raise ValueError("x and y must have the same length")
    if not 1 <= q <= m:
        raise ValueError(f"neighbour count q={q} must lie in [1, {m}]")
    order = np.argsort(x, kind="stable")
    xs = np.ascontiguousarray(x[order])
    ys = np.ascontiguousarray(y[order])
    lo = kernels.knn_windows(xs, q)
    out = np.empty(m)
    out[order] = kernels.window_means(ys, lo, q)
    return out


# ---------------------------------------------------------------------------
# discrete discounting consistent with the explicit backward scheme
# ---------------------------------------------------------------------------


def scheme_discount(rates, spread, h):
    """Discount weights ``D[:, i] = prod_{l=1}^{i-1} (1 - (r_l + spread) h)``.

    These are the weights with which the explicit backward recursion
    ``theta_i = E_i[theta_{i+1} + h (G_{i+1} - c_{i+1} theta_{i+1})]`` discounts
    the source term ``G_i``; ``D[:, 0] = D[:, 1] = 1``.
    """
    rates = np.asarray(rates, dtype=float)
    spread = np.broadcast_to(np.asarray(spread, dtype=float), rates.shape) if np.ndim(spread) else spread
    factors = 1.0 - (rates + spread) * h
    out = np.ones_like(rates)
    if rates.shape[1] > 2:
        np.cumprod(factors[:, 1:-1], axis=1, out=out[:, 2:])
    return out


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class TvaSurface:
    theta: np.ndarray
    times: np.ndarray

    @property
    def theta0(self) -> float:
        return float(self.theta[:, 0].mean())


@dataclass(eq=False)
class LinearTvaEstimate:
    theta0: float
    stderr: float
    ci_low: float
    ci_high: float


@dataclass(eq=False)
class TvaDecomposition:
    cva: float
    dva: float
    lva: float
    rc: float
    times: np.ndarray
    profiles: Dict[str, np.ndarray] = field(default_factory=dict)
    raw_profiles: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def total(self) -> float:
        return self.cva + self.dva + self.lva + self.rc

    def as_dict(self) -> Dict[str, float]:
        return {"CVA": self.cva, "DVA": self.dva, "LVA": self.lva, "RC": self.rc}


# ---------------------------------------------------------------------------
# solvers
# ---------------------------------------------------------------------------


def _prices(paths, swap, model, prices):
    if prices is not None:
        return prices
    return clean_prices_on_paths(paths, swap, model)


def solve_tva_bsde(
    paths,
    csa: CsaSpec,
    swap,
    model=None,
    q: int = 5,
    prices: Optional[np.ndarray] = None,
    coefficient: Optional[Callable] = None,
) -> TvaSurface:
    """Backward regression scheme for the pre-default TVA BSDE.

    ``theta_n = 0`` and ``theta_i = E_i[theta_{i+1} + h g(t_{i+1}, r_{i+1}, theta_{i+1})]``
    with the conditional expectation estimated by q-nearest-neighbour
    averaging in the short rate.  At ``i = 0`` every path sits at ``r_0`` and
    the estimate is the plain sample mean.

    ``coefficient(i, r, P, theta)`` overrides the CSA driver.
    """
    P = _prices(paths, swap, model, prices)
    rates = paths.rates
    m, n1 = rates.shape
    if q > m:
        raise ValueError(f"neighbour count q={q} exceeds the number of paths {m}")
    h = paths.h
    if coefficient is None:
        def coefficient(i, r, p, th):
            return tva_coefficient(csa, r, p, th)

    theta = np.zeros((m, n1))
    for i in range(n1 - 2, -1, -1):
        nxt = theta[:, i + 1]
        target = nxt + h * coefficient(i + 1, rates[:, i + 1], P[:, i + 1], nxt)
        if i == 0 or np.ptp(rates[:, i]) == 0.0:
            theta[:, i] = target.mean()
        else:
            theta[:, i] = knn_regress(rates[:, i], target, q)
    return TvaSurface(theta=theta, times=paths.times)


def linear_tva_mc(paths, csa: CsaSpec, swap, model=None, prices: Optional[np.ndarray] = None) -> LinearTvaEstimate:
    """Plain Monte Carlo TVA for CSA specifications with a linear equation.

    Clean close-out with equal lending and net borrowing bases: source term
    ``-(gamma p_bar (1-rho_bar) + lam) eps^- + (gamma p (1-rho) + lam) eps^+
    + b^+ Gamma^+ - b^- Gamma^-`` with ``eps = P - Gamma``, discounted at
    ``r + gamma + lam``.  Pre-default close-out with continuous collateral and
    equal collateral bases: source ``b P`` discounted at ``r + b``.
    """
    kind = csa.linear_kind
    if kind is None:
        raise ValueError("CSA specification does not give a linear TVA equation")
    P = _prices(paths, swap, model, prices)
    rates = paths.rates
    h = paths.h
    if kind == CLEAN:
        lam = csa.lambda_plus
        Gamma = np.zeros_like(P) if csa.collateral == NO_COLLATERAL else P
        eps = P - Gamma
        source = (
            -(csa.gamma * csa.p_bar * (1.0 - csa.rho_bar) + lam) * _neg(eps)
            + (csa.gamma * csa.p * (1.0 - csa.rho) + lam) * _pos(eps)
            + csa.b_plus * _pos(Gamma)
            - csa.b_minus * _neg(Gamma)
        )
        spread = csa.gamma + lam
    else:
        source = csa.b_plus * P
        spread = csa.b_plus
    disc = scheme_discount(rates, spread, h)
    per_path = h * np.sum(disc[:, 1:] * source[:, 1:], axis=1)
    mean = float(per_path.mean())
    se = float(per_path.std(ddof=1) / np.sqrt(per_path.size)) if per_path.size > 1 else 0.0
    return LinearTvaEstimate(theta0=mean, stderr=se, ci_low=mean - 1.96 * se, ci_high=mean + 1.96 * se)


def decompose_tva(paths, surface: TvaSurface, csa: CsaSpec, swap, model=None, prices: Optional[np.ndarray] = None) -> TvaDecomposition:
    """CVA/DVA/LVA/RC profiles and time-0 totals along the solved TVA surface.

    Profiles are path averages of the discounted drift terms at each grid
    time (``raw_profiles`` are the undiscounted averages); totals integrate
    the discounted profiles with the right-endpoint rule.
    """
    P = _prices(paths, swap, model, prices)
    theta = surface.theta
    h = paths.h
    disc = scheme_discount(paths.rates, 0.0, h)
    terms = tva_terms(csa, P, theta)
    profiles = {}
    raw = {}
    totals = {}
    for name, term in zip(TERMS, terms):
        raw[name] = term.mean(axis=0)
        profiles[name] = (disc * term).mean(axis=0)
        totals[name] = float(h * profiles[name][1:].sum())
    return TvaDecomposition(
        cva=totals["CVA"],
        dva=totals["DVA"],
        lva=totals["LVA"],
        rc=totals["RC"],
        times=paths.times,
        profiles=profiles,
        raw_profiles=raw,
    )
