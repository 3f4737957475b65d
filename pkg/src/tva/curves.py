"""Initial term structure and the two affine short-rate models.

Both models price zero-coupon bonds as ``exp(m(t, T) + n(t, T) r_t)``.
The Vasicek coefficients are closed form; the Levy Hull-White (LHW) model,
driven by an inverse Gaussian subordinator, needs one time integral of the
cumulant, done by composite Gauss-Legendre quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

NODES_PER_YEAR = 64


@lru_cache(maxsize=None)
def _legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def gauss_legendre(lo: float, hi: float, nodes_per_year: int = NODES_PER_YEAR):
    """Nodes and weights of a composite Gauss-Legendre rule on ``[lo, hi]``.

    One panel per (started) year of span, ``nodes_per_year`` nodes per panel.
    """
    span = hi - lo
    if span <= 0.0:
        return np.zeros(0), np.zeros(0)
    panels = max(1, int(np.ceil(span - 1e-12)))
    x, w = _legendre(nodes_per_year)
    width = span / panels
    starts = lo + width * np.arange(panels)
    nodes = (starts[:, None] + 0.5 * width * (x[None, :] + 1.0)).ravel()
    weights = np.tile(0.5 * width * w, panels)
    return nodes, weights


# ---------------------------------------------------------------------------
# parameters and the initial curve
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VasicekParams:
    a: float
    k: float
    sigma: float
    r0: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"mean-reversion speed a must be positive, got {self.a}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")

    @property
    def r_inf(self) -> float:
        return self.k - self.sigma**2 / (2.0 * self.a**2)


@dataclass(frozen=True)
class InitialCurve:
    """Vasicek-generated initial curve: zero rates, discount factors, forwards.

    All methods accept scalars or arrays of maturities in years.
    """

    params: VasicekParams

    def zero_rate(self, T):
        p = self.params
        T = np.asarray(T, dtype=float)
        safe = np.where(T > 0, T, 1.0)
        g = -np.expm1(-p.a * safe) / (p.a * safe)
        conv = p.sigma**2 / (4.0 * p.a**3 * safe) * np.expm1(-p.a * safe) ** 2
        out = p.r_inf - (p.r_inf - p.r0) * g + conv
        return np.where(T > 0, out, p.r0)[()]

    def discount(self, T):
        T = np.asarray(T, dtype=float)
        return np.exp(-T * self.zero_rate(T))[()]

    def forward(self, T):
        p = self.params
        e = np.exp(-p.a * np.asarray(T, dtype=float))
        return (p.k + e * (p.r0 - p.k) - p.sigma**2 / (2.0 * p.a**2) * (1.0 - e) ** 2)[()]

    def forward_slope(self, T):
        p = self.params
        e = np.exp(-p.a * np.asarray(T, dtype=float))
        return (-p.a * e * (p.r0 - p.k) - p.sigma**2 / p.a * (1.0 - e) * e)[()]

    @property
    def r0(self) -> float:
        return self.params.r0


def vasicek_initial_curve(params: VasicekParams) -> InitialCurve:
    return InitialCurve(params)


@dataclass(frozen=True)
class LhwParams:
    alpha: float
    varsigma: float
    curve: InitialCurve

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.varsigma > 0:
            raise ValueError(f"varsigma must be positive, got {self.varsigma}")


# ---------------------------------------------------------------------------
# inverse Gaussian cumulant
# ---------------------------------------------------------------------------


def ig_cumulant(z, varsigma: float):
    """Cumulant ``log E[exp(z Z_1)]`` of the IG subordinator.

    Defined for ``Re z <= varsigma**2 / 2``; complex arguments use the
    principal square root.
    """
    z = np.asarray(z)
    bound = 0.5 * varsigma * varsigma
    if np.any(np.real(z) > bound * (1.0 + 1e-14)):
        raise ValueError(f"IG cumulant argument exceeds varsigma^2/2 = {bound}")
    w = 1.0 - 2.0 * z / varsigma**2
    if np.iscomplexobj(w):
        root = np.sqrt(w)
    else:
        root = np.sqrt(np.maximum(w, 0.0))
    return (varsigma * (1.0 - root))[()]


def ig_cumulant_prime(z, varsigma: float):
    z = np.asarray(z, dtype=float)
    bound = 0.5 * varsigma * varsigma
    if np.any(z >= bound):
        raise ValueError(f"IG cumulant derivative needs z < varsigma^2/2 = {bound}")
    return (1.0 / (varsigma * np.sqrt(1.0 - 2.0 * z / varsigma**2)))[()]


# ---------------------------------------------------------------------------
# bond coefficients
# ---------------------------------------------------------------------------


def _check_times(t, T):
    t = np.asarray(t, dtype=float)
    T = np.asarray(T, dtype=float)
    if np.any(t > T + 1e-12):
        raise ValueError("bond valuation time t must not exceed maturity T")
    return t, T


def vasicek_coefficients(t, T, params: VasicekParams):
    """``(m_va(t, T), n_va(t, T))`` broadcast over ``t`` and ``T``."""
    t, T = _check_times(t, T)
    a = params.a
    tau = np.maximum(T - t, 0.0)
    e = -np.expm1(-a * tau)
    m = params.r_inf * (e / a - tau) - params.sigma**2 / (4.0 * a**3) * e * e
    n = -e / a
    return m, n


def vasicek_bond(t, T, r, params: VasicekParams):
    m, n = vasicek_coefficients(t, T, params)
    return np.exp(m + n * np.asarray(r, dtype=float))[()]


def _u(x, alpha):
    # (e^{-alpha x} - 1) / alpha, always <= 0
    return np.expm1(-alpha * np.asarray(x, dtype=float)) / alpha


def lhw_kappa(t, params: LhwParams):
    """Time-dependent mean-reversion level fitting the initial curve."""
    t = np.asarray(t, dtype=float)
    al, vs, curve = params.alpha, params.varsigma, params.curve
    u = _u(t, al)
    return (
        curve.forward(t)
        + curve.forward_slope(t) / al
        + ig_cumulant(u, vs)
        - ig_cumulant_prime(u, vs) * np.exp(-al * t) / al
    )[()]


def _lhw_integral(t: float, T, params: LhwParams, nodes_per_year: int):
    # \int_0^t [psi(u(T - s)) - psi(u(t - s))] ds for one t and an array of T
    s, w = gauss_legendre(0.0, t, nodes_per_year)
    if s.size == 0:
        return np.zeros_like(T)
    al, vs = params.alpha, params.varsigma
    inner = ig_cumulant(_u(T[:, None] - s[None, :], al), vs) - ig_cumulant(_u(t - s, al), vs)[None, :]
    return inner @ w


def lhw_coefficients(t, T, params: LhwParams, nodes_per_year: int = NODES_PER_YEAR):
    """``(m_le(t, T), n_le(t, T))`` broadcast over ``t`` and ``T``."""
    t, T = _check_times(t, T)
    t, T = np.broadcast_arrays(t, T)
    al, vs, curve = params.alpha, params.varsigma, params.curve
    n = _u(np.maximum(T - t, 0.0), al)
    integral = np.empty(t.shape)
    flat_t = t.ravel()
    flat_T = T.ravel()
    flat_int = integral.reshape(-1)
    for tv in np.unique(flat_t):
        sel = flat_t == tv
        flat_int[sel] = _lhw_integral(float(tv), flat_T[sel], params, nodes_per_year)
    log_ratio = np.log(curve.discount(T) / curve.discount(t))
    m = log_ratio - n * (curve.forward(t) + ig_cumulant(_u(t, al), vs)) - integral
    return m[()], n[()]


def lhw_bond(t, T, r, params: LhwParams, nodes_per_year: int = NODES_PER_YEAR):
    m, n = lhw_coefficients(t, T, params, nodes_per_year)
    return np.exp(m + n * np.asarray(r, dtype=float))[()]


# ---------------------------------------------------------------------------
# model objects
# ---------------------------------------------------------------------------


class VasicekModel:
    name = "vasicek"

    def __init__(self, params: VasicekParams):
        self.params = params
        self.curve = vasicek_initial_curve(params)

    @property
    def r0(self) -> float:
        return self.params.r0

    def bond_coefficients(self, t, T):
        return vasicek_coefficients(t, T, self.params)

    def bond(self, t, T, r):
        return vasicek_bond(t, T, r, self.params)

    def __repr__(self):
        return f"VasicekModel({self.params})"


class LhwModel:
    name = "lhw"

    def __init__(self, params: LhwParams, nodes_per_year: int = NODES_PER_YEAR):
        self.params = params
        self.curve = params.curve
        self.nodes_per_year = nodes_per_year

    @classmethod
    def from_curve(cls, curve: InitialCurve, alpha: float, varsigma: float):
        return cls(LhwParams(alpha=alpha, varsigma=varsigma, curve=curve))

    @property
    def r0(self) -> float:
        return float(self.curve.forward(0.0))

    def kappa(self, t):
        return lhw_kappa(t, self.params)

    def bond_coefficients(self, t, T):
        return lhw_coefficients(t, T, self.params, self.nodes_per_year)

    def bond(self, t, T, r):
        return lhw_bond(t, T, r, self.params, self.nodes_per_year)

    def __repr__(self):
        p = self.params
        return f"LhwModel(alpha={p.alpha}, varsigma={p.varsigma})"
