"""Co-calibration of the LHW model to a target cap price."""

from __future__ import annotations

from scipy.optimize import brentq

from .curves import InitialCurve, LhwParams
from .pricing import CapSpec, cap_lhw


def calibrate_varsigma(
    target_cap: float,
    alpha: float,
    curve: InitialCurve,
    cap: CapSpec,
    bounds=(1.0, 100.0),
    tol: float = 1e-4,
    R: float = 1.5,
) -> float:
    """IG parameter varsigma for which the LHW cap price equals ``target_cap``.

    The cap price decreases in varsigma (larger varsigma, smaller jumps), so
    a sign change over ``bounds`` brackets a unique root; Brent's method
    finds it.
    """
    if not target_cap > 0:
        raise ValueError("target cap price must be positive")

    def objective(vs):
        return cap_lhw(cap, LhwParams(alpha=alpha, varsigma=vs, curve=curve), R=R) - target_cap

    lo, hi = bounds
    f_lo, f_hi = objective(lo), objective(hi)
    if f_lo * f_hi > 0:
        raise ValueError(
            f"no calibration bracket in {bounds}: cap - target = {f_lo:.6g} and {f_hi:.6g}"
        )
    root = brentq(objective, lo, hi, xtol=1e-10, rtol=1e-14)
    miss = objective(root)
    if abs(miss) > tol:
        raise ArithmeticError(f"calibration stopped {miss:.3g} away from the target")
    return float(root)
