"""Counterparty-clean prices: FRAs, swaps, caplets and caps.

Amounts are per unit notional unless a function takes ``N``.  Swap values
follow the receiver convention (the bank pays floating, receives fixed);
payer values are the exact negation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import ndtr

from .curves import (
    InitialCurve,
    LhwModel,
    LhwParams,
    VasicekParams,
    gauss_legendre,
    ig_cumulant,
    vasicek_initial_curve,
)
from . import kernels

RECEIVER = "receiver"
PAYER = "payer"


@dataclass(frozen=True)
class SwapSpec:
    """Fixed-for-floating swap on the schedule ``dates = (T_0, T_1, ..., T_n)``."""

    dates: tuple
    K: float
    N: float = 1.0
    direction: str = RECEIVER

    def __post_init__(self):
        d = np.asarray(self.dates, dtype=float)
        if d.ndim != 1 or d.size < 2:
            raise ValueError("swap schedule needs an inception and at least one payment date")
        if np.any(np.diff(d) <= 0):
            raise ValueError("swap dates must be strictly increasing")
        if self.direction not in (RECEIVER, PAYER):
            raise ValueError(f"direction must be '{RECEIVER}' or '{PAYER}'")
        object.__setattr__(self, "dates", tuple(float(x) for x in d))

    @classmethod
    def yearly(cls, maturity: int, K: float, N: float = 1.0, direction: str = RECEIVER, start: float = 0.0):
        return cls(tuple(start + np.arange(maturity + 1, dtype=float)), K, N, direction)

    @property
    def T0(self) -> float:
        return self.dates[0]

    @property
    def payment_dates(self) -> np.ndarray:
        return np.asarray(self.dates[1:])

    @property
    def deltas(self) -> np.ndarray:
        return np.diff(np.asarray(self.dates))

    @property
    def sign(self) -> float:
        return 1.0 if self.direction == RECEIVER else -1.0

    def with_direction(self, direction: str) -> "SwapSpec":
        return SwapSpec(self.dates, self.K, self.N, direction)

    def with_rate(self, K: float) -> "SwapSpec":
        return SwapSpec(self.dates, K, self.N, self.direction)


@dataclass(frozen=True)
class CapSpec:
    """Cap made of caplets reset at ``resets`` and paying ``delta`` later."""

    resets: tuple
    delta: float
    K: float
    N: float = 1.0

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("caplet accrual delta must be positive")
        object.__setattr__(self, "resets", tuple(float(x) for x in self.resets))

    @property
    def K_bar(self) -> float:
        return 1.0 + self.delta * self.K


# ---------------------------------------------------------------------------
# FRA and swaps
# ---------------------------------------------------------------------------


def _bonds(t, T, r, model):
    if r is None:
        if np.any(np.asarray(t) != 0.0):
            raise ValueError("a short rate is needed for valuation after time 0")
        curve = model if isinstance(model, InitialCurve) else model.curve
        return curve.discount(T)
    m, n = model.bond_coefficients(t, T)
    return np.exp(m + n * r)


def fra_price(t, T, delta, K, N, model, r=None):
    """Time-t value of the FRA paying ``N delta (L_T(T, T+delta) - K)`` at ``T+delta``."""
    if t > T:
        raise ValueError("FRA valuation time must not exceed its inception")
    K_bar = 1.0 + delta * K
    return N * (_bonds(t, T, r, model) - K_bar * _bonds(t, T + delta, r, model))


def swap_rate(swap: SwapSpec, curve) -> float:
    """Par rate at time 0 on the initial curve (or a model's curve)."""
    curve = curve if isinstance(curve, InitialCurve) else curve.curve
    if swap.T0 < 0:
        raise ValueError("swap must start at or after time 0")
    annuity = float(np.sum(swap.deltas * curve.discount(swap.payment_dates)))
    if annuity <= 0:
        raise ValueError("zero annuity")
    return float((curve.discount(swap.T0) - curve.discount(swap.dates[-1])) / annuity)


def fixed_leg_value(swap: SwapSpec, curve) -> float:
    curve = curve if isinstance(curve, InitialCurve) else curve.curve
    return float(swap.N * swap.K * np.sum(swap.deltas * curve.discount(swap.payment_dates)))


def _next_index(t, dates):
    # index k of the smallest T_k strictly greater than t
    return int(np.searchsorted(dates, t, side="right"))


def swap_price(t, r, swap: SwapSpec, model, last_fixing=None, basis: float = 0.0):
    """Clean value of the swap at time ``t`` and short rate(s) ``r``.

    For ``t`` inside a period, ``last_fixing`` is ``1 / B_{T_{k-1}}(T_k)`` of
    the running period.  With a nonzero ``basis`` every cash flow paid at
    ``T`` is additionally discounted by ``exp(-basis (T - t))``.
    """
    dates = np.asarray(swap.dates)
    if t >= dates[-1]:
        raise ValueError("swap has matured")
    r = np.asarray(r, dtype=float)
    K = swap.K
    deltas = swap.deltas
    k = _next_index(t, dates)
    pay = dates[max(k, 1):]
    m, n = model.bond_coefficients(t, pay)
    bonds = np.exp(m[None, :] + n[None, :] * r.reshape(-1, 1))
    shift = np.exp(-basis * (pay - t))
    if k == 0:
        m0, n0 = model.bond_coefficients(t, dates[0])
        b_start = np.exp(m0 + n0 * r.reshape(-1))
        prev = np.concatenate([b_start[:, None], bonds[:, :-1]], axis=1)
        flows = (prev - bonds - K * deltas[None, :] * bonds) * shift[None, :]
        value = flows.sum(axis=1)
    else:
        if last_fixing is None:
            if abs(t - dates[k - 1]) > 1e-12:
                raise ValueError("in-life valuation needs the running period's fixing")
            m1, n1 = model.bond_coefficients(t, dates[k])
            last_fixing = np.exp(-(m1 + n1 * r.reshape(-1)))
        fix = np.broadcast_to(np.asarray(last_fixing, dtype=float).reshape(-1), (r.size,))
        first = (fix - 1.0 - K * deltas[k - 1]) * bonds[:, 0] * shift[0]
        if basis == 0.0:
            rest = -bonds[:, -1] + bonds[:, 0] - K * (deltas[k:][None, :] * bonds[:, 1:]).sum(axis=1)
        else:
            rest = ((bonds[:, :-1] - bonds[:, 1:] - K * deltas[k:][None, :] * bonds[:, 1:]) * shift[None, 1:]).sum(axis=1)
        value = first + rest
    value = swap.sign * swap.N * value
    return value.reshape(r.shape)[()]


def collateralized_swap_price(t, r, swap: SwapSpec, model, basis: float, last_fixing=None):
    """Fully collateralised value with equal collateral basis ``basis``.

    Every cash flow is discounted at ``r + basis`` instead of ``r``.
    """
    return swap_price(t, r, swap, model, last_fixing=last_fixing, basis=basis)


def clean_prices_on_paths(paths, swap: SwapSpec, model=None) -> np.ndarray:
    """Clean swap value at every node of ``paths``, shape ``(m, n+1)``.

    Uses the fixings stored on ``paths``; the value at and after the last
    payment date is zero.
    """
    model = paths.model if model is None else model
    if paths.fixings is None:
        raise ValueError("paths carry no fixings; call record_fixings first")
    times = paths.times
    dates = np.asarray(swap.dates)
    deltas = swap.deltas
    K = swap.K
    pay = dates[1:]
    m_coef, n_coef = _coefficient_table(model, times, pay)
    out = np.zeros_like(paths.rates)
    for i, t in enumerate(times):
        if t >= dates[-1] - 1e-12:
            continue
        k = _next_index(t + 1e-9, dates)
        r = paths.rates[:, i]
        if k == 0:
            m0, n0 = model.bond_coefficients(t, dates[0])
            b_start = np.exp(m0 + n0 * r)
            bonds = np.exp(m_coef[i][None, :] + n_coef[i][None, :] * r[:, None])
            out[:, i] = b_start - bonds[:, -1] - K * bonds @ deltas
            continue
        sl = slice(k - 1, None)
        bonds = np.exp(m_coef[i, sl][None, :] + n_coef[i, sl][None, :] * r[:, None])
        fix = paths.fixings[:, k - 1]
        out[:, i] = (fix - K * deltas[k - 1]) * bonds[:, 0] - bonds[:, -1] - K * (bonds[:, 1:] @ deltas[k:])
    return swap.sign * swap.N * out


def _coefficient_table(model, times, pay):
    tt = np.minimum(times[:, None], pay[None, :])
    return model.bond_coefficients(tt, np.broadcast_to(pay, tt.shape))


# ---------------------------------------------------------------------------
# caplets: Vasicek closed form
# ---------------------------------------------------------------------------


def caplet_vasicek(T, delta, K, params: VasicekParams):
    """Time-0 caplet price per unit notional (a put on ``B_T(T+delta)``)."""
    curve = vasicek_initial_curve(params)
    K_bar = 1.0 + delta * K
    b_T = float(curve.discount(T))
    b_Td = float(curve.discount(T + delta))
    a = params.a
    xi2 = params.sigma**2 / (2.0 * a**3) * (-np.expm1(-2.0 * a * T)) * np.expm1(-a * delta) ** 2
    if xi2 <= 0.0 or T <= 0:
        return max(b_T - K_bar * b_Td, 0.0)
    xi = np.sqrt(xi2)
    d_plus = np.log(b_Td / b_T * K_bar) / xi + 0.5 * xi
    d_minus = d_plus - xi
    return float(b_T * ndtr(-d_minus) - K_bar * b_Td * ndtr(-d_plus))


def cap_vasicek(cap: CapSpec, params: VasicekParams) -> float:
    return cap.N * sum(caplet_vasicek(T, cap.delta, cap.K, params) for T in cap.resets)


# ---------------------------------------------------------------------------
# caplets: LHW damped Fourier inversion
# ---------------------------------------------------------------------------


class _CapletMgf:
    """Moment generating function of ``log(1 / B_T(T+delta))`` under the (T+delta)-forward measure."""

    def __init__(self, T, delta, params: LhwParams, nodes_per_year=64):
        self.params = params
        al, vs = params.alpha, params.varsigma
        s, w = gauss_legendre(0.0, T, nodes_per_year)
        self.w = w
        self.sig_end = -np.expm1(-al * (T + delta - s)) / al
        self.sig_reset = -np.expm1(-al * (T - s)) / al
        i_end = w @ ig_cumulant(-self.sig_end, vs)
        i_reset = w @ ig_cumulant(-self.sig_reset, vs)
        curve = params.curve
        self.const = -i_end
        self.drift = np.log(curve.discount(T) / curve.discount(T + delta)) + i_end - i_reset

    def max_real_argument(self, R: float) -> float:
        return float(np.max((R - 1.0) * self.sig_end - R * self.sig_reset)) if self.w.size else 0.0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        arg = (z[:, None] - 1.0) * self.sig_end[None, :] - z[:, None] * self.sig_reset[None, :]
        tail = ig_cumulant(arg, self.params.varsigma) @ self.w
        return np.exp(self.const + z * self.drift + tail)


def caplet_lhw_fourier(T, delta, K, params: LhwParams, R: float = 1.5, tol: float = 1e-14, max_v: float = 1e7):
    """Time-0 caplet price per unit notional by damped Fourier inversion.

    The integrand is conjugate-symmetric in ``v``, so only the half line is
    integrated, on Gauss-Legendre panels whose width grows geometrically from
    ``R - 1`` to 25, stays at 25 up to ``v = 100`` and then doubles until a
    panel contributes less than ``tol``.
    """
    if not R > 1:
        raise ValueError("damping R must exceed 1")
    K_bar = 1.0 + delta * K
    b_Td = float(params.curve.discount(T + delta))
    if T <= 0:
        return max(float(params.curve.discount(T)) - K_bar * b_Td, 0.0)
    mgf = _CapletMgf(T, delta, params)
    bound = 0.5 * params.varsigma**2
    if mgf.max_real_argument(R) > bound:
        raise ValueError(f"damping R={R} puts the cumulant outside its domain")
    x, w = _legendre_panel()
    log_k = np.log(K_bar)
    total = 0.0
    # the factor 1 / (1 + iv - R) peaks over a width R - 1 around v = 0
    lo, width = 0.0, min(25.0, R - 1.0)
    while True:
        v = lo + 0.5 * width * (x + 1.0)
        iv = 1j * v
        f = np.exp((1.0 + iv - R) * log_k) * mgf(R - iv) / ((iv - R) * (1.0 + iv - R))
        part = float(np.real(f) @ w) * 0.5 * width
        total += part
        lo += width
        if abs(part) < tol and lo > 100.0:
            break
        if lo > max_v:
            raise ArithmeticError("Fourier integral did not converge within the truncation limit")
        if lo >= 100.0 or width < 25.0:
            width = 2.0 * width if lo >= 100.0 else min(25.0, 2.0 * width)
    # far out of the money the inversion leaves round-off of either sign
    return max(b_Td / np.pi * total, 0.0)


@lru_cache(maxsize=None)
def _legendre_panel(n=96):
    return np.polynomial.legendre.leggauss(n)


def cap_lhw(cap: CapSpec, params: LhwParams, R: float = 1.5) -> float:
    return cap.N * sum(caplet_lhw_fourier(T, cap.delta, cap.K, params, R=R) for T in cap.resets)


# ---------------------------------------------------------------------------
# caplets: LHW Monte Carlo
# ---------------------------------------------------------------------------


def caplets_lhw_mc(resets, delta, K, params: LhwParams, m: int = 100_000, seed: int = 0, steps_per_year: int = 100):
    """Monte Carlo caplet prices for several reset dates from one simulation.

    Euler scheme with IG increments; the discount integral uses the
    trapezoidal rule.  Returns ``(prices, standard_errors)`` per unit notional.
    """
    if m < 1000:
        raise ValueError("use at least 1000 paths")
    resets = np.asarray(resets, dtype=float)
    model = LhwModel(params)
    h = 1.0 / steps_per_year
    stops = {int(round(T / h)): T for T in resets}
    for i, T in stops.items():
        if abs(i * h - T) > 1e-9:
            raise ValueError(f"reset {T} is not a multiple of the step {h}")
    n_steps = max(stops)
    times = h * np.arange(n_steps + 1)
    kappa = np.asarray(model.kappa(times[:-1]))
    al, vs = params.alpha, params.varsigma
    K_bar = 1.0 + delta * K
    rng = np.random.default_rng(seed)
    r = np.full(m, model.r0)
    integral = np.zeros(m)
    prices = {}
    if 0 in stops:
        payoff = K_bar * np.maximum(1.0 / K_bar - model.bond(0.0, delta, r), 0.0)
        prices[0] = payoff
    for i in range(n_steps):
        dz = kernels.ig_transform(h / vs, h * h, rng.standard_normal(m), rng.random(m))
        r_next = r + al * (kappa[i] - r) * h + dz
        integral += 0.5 * h * (r + r_next)
        r = r_next
        if i + 1 in stops:
            T = stops[i + 1]
            bond = model.bond(T, T + delta, r)
            prices[i + 1] = K_bar * np.exp(-integral) * np.maximum(1.0 / K_bar - bond, 0.0)
    est = np.array([prices[int(round(T / h))].mean() for T in resets])
    se = np.array([prices[int(round(T / h))].std(ddof=1) / np.sqrt(m) for T in resets])
    return est, se


def caplet_lhw_mc(T, delta, K, params: LhwParams, m: int = 100_000, seed: int = 0, steps_per_year: int = 100):
    est, se = caplets_lhw_mc([T], delta, K, params, m=m, seed=seed, steps_per_year=steps_per_year)
    return float(est[0]), float(se[0])
