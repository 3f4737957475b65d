"""Path generation on a uniform time grid.

Randomness is drawn per path from ``SeedSequence(seed, spawn_key=(j,))``,
so the rows of a :class:`PathSet` do not depend on how many paths are
requested alongside them or on how the work is scheduled.
"""

from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .curves import LhwModel, VasicekModel, VasicekParams, LhwParams


@dataclass(frozen=True)
class GridSpec:
    horizon: float = 10.0
    steps: int = 200

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("grid needs at least one step")
        if not self.horizon > 0:
            raise ValueError("grid horizon must be positive")

    @property
    def h(self) -> float:
        return self.horizon / self.steps

    @property
    def times(self) -> np.ndarray:
        return self.h * np.arange(self.steps + 1)

    def index_of(self, t: float) -> int:
        """Grid index of a date that must lie on the grid."""
        i = int(round(t / self.h))
        if i < 0 or i > self.steps or abs(i * self.h - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"date {t} is not on the grid (h={self.h})")
        return i


@dataclass(frozen=True, eq=False)
class PathSet:
    """Simulated short-rate paths, ``rates[j, i]`` at ``times[i]``.

    ``fixings[j, k]`` is ``1 / B_{T_k}(T_{k+1})`` observed on path ``j`` at the
    k-th reset date; it is filled in by :func:`record_fixings`.
    """

    grid: GridSpec
    rates: np.ndarray
    model: object
    seed: Optional[int] = None
    fixings: Optional[np.ndarray] = None
    reset_dates: Optional[np.ndarray] = None

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @property
    def h(self) -> float:
        return self.grid.h

    @property
    def n_paths(self) -> int:
        return self.rates.shape[0]

    def integrated_rate(self, spread: float = 0.0) -> np.ndarray:
        """Left-endpoint sums ``h * sum_{l<i} (r_l + spread)``, shape ``(m, n+1)``."""
        out = np.zeros_like(self.rates)
        np.cumsum((self.rates[:, :-1] + spread) * self.h, axis=1, out=out[:, 1:])
        return out

    def discount_factors(self, spread: float = 0.0) -> np.ndarray:
        return np.exp(-self.integrated_rate(spread))

    def to_csv(self, path, max_paths: Optional[int] = None) -> None:
        """Debug dump with header ``path,step,time,rate``."""
        m = self.n_paths if max_paths is None else min(max_paths, self.n_paths)
        times = self.times
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["path", "step", "time", "rate"])
            for j in range(m):
                for i, t in enumerate(times):
                    w.writerow([j, i, f"{t:.10g}", repr(float(self.rates[j, i]))])


def path_rng(seed: int, path: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(path,)))


def _draws(seed: int, m: int, n: int, uniforms: bool):
    normals = np.empty((m, n))
    unif = np.empty((m, n)) if uniforms else None
    for j in range(m):
        rng = path_rng(seed, j)
        normals[j] = rng.standard_normal(n)
        if uniforms:
            unif[j] = rng.random(n)
    return normals, unif


def sample_ig_increment(h: float, varsigma: float, rng: np.random.Generator, size=None):
    """Increment of the IG subordinator over a step ``h``: IG(h/varsigma, h^2).

    Uses exactly one normal and one uniform per draw.
    """
    if not h > 0 or not varsigma > 0:
        raise ValueError("h and varsigma must be positive")
    normals = np.asarray(rng.standard_normal(size))
    unif = np.asarray(rng.random(size))
    out = kernels.ig_transform(h / varsigma, h * h, np.atleast_1d(normals), np.atleast_1d(unif))
    return out.reshape(normals.shape)[()]


def simulate_vasicek(model, grid: GridSpec, m: int, seed: int) -> PathSet:
    if isinstance(model, VasicekParams):
        model = VasicekModel(model)
    if m < 1:
        raise ValueError("need at least one path")
    p = model.params
    normals, _ = _draws(seed, m, grid.steps, uniforms=False)
    rates = kernels.euler_vasicek(p.r0, p.a, p.k, p.sigma, grid.h, normals)
    return PathSet(grid=grid, rates=rates, model=model, seed=seed)


def simulate_lhw(model, grid: GridSpec, m: int, seed: int) -> PathSet:
    if isinstance(model, LhwParams):
        model = LhwModel(model)
    if m < 1:
        raise ValueError("need at least one path")
    vs = model.params.varsigma
    h = grid.h
    normals, unif = _draws(seed, m, grid.steps, uniforms=True)
    jumps = kernels.ig_transform(h / vs, h * h, normals, unif)
    kappa = np.asarray(model.kappa(grid.times[:-1]), dtype=float)
    rates = kernels.euler_lhw(model.r0, model.params.alpha, kappa, h, jumps)
    return PathSet(grid=grid, rates=rates, model=model, seed=seed)


def simulate(model, grid: GridSpec, m: int, seed: int) -> PathSet:
    if isinstance(model, VasicekModel):
        return simulate_vasicek(model, grid, m, seed)
    if isinstance(model, LhwModel):
        return simulate_lhw(model, grid, m, seed)
    raise TypeError(f"unsupported model {model!r}")


def record_fixings(paths: PathSet, swap, model=None) -> PathSet:
    """Store ``1 / B_{T_k}(T_{k+1})`` at every reset date ``T_0 .. T_{n-1}``."""
    model = paths.model if model is None else model
    resets = np.asarray(swap.dates[:-1], dtype=float)
    pays = np.asarray(swap.dates[1:], dtype=float)
    idx = [paths.grid.index_of(t) for t in resets]
    m_coef, n_coef = model.bond_coefficients(resets, pays)
    r_at = paths.rates[:, idx]
    fixings = np.exp(-(m_coef[None, :] + n_coef[None, :] * r_at))
    return dataclasses.replace(paths, fixings=fixings, reset_dates=resets)
