"""Hot numeric loops.

Every kernel has a vectorised numpy implementation (``*_np``) and a loop
implementation compiled with numba (``*_nb``).  The public names at the
bottom of the module point at one or the other depending on
:data:`tva._accel.USE_NUMBA`.  Both variants consume the same pre-drawn
random numbers, so switching backends never changes the random stream.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

# ---------------------------------------------------------------------------
# inverse Gaussian increments
# ---------------------------------------------------------------------------


def ig_transform_np(mu, lam, normals, uniforms):
    """Map (normal, uniform) pairs to IG(mu, lam) draws.

    Transformation method of Michael, Schucany and Haas.  The smaller root
    of the quadratic is written as ``mu / (1 + a + sqrt(a^2 + 2a))`` with
    ``a = mu y / (2 lam)``, which avoids the cancellation of the textbook form.
    """
    y = normals * normals
    a = mu * y / (2.0 * lam)
    x = mu / (1.0 + a + np.sqrt(a * a + 2.0 * a))
    return np.where(uniforms * (mu + x) <= mu, x, mu * mu / x)


@njit
def ig_transform_nb(mu, lam, normals, uniforms):
    flat_n = normals.ravel()
    flat_u = uniforms.ravel()
    out = np.empty(flat_n.size)
    for i in range(flat_n.size):
        y = flat_n[i] * flat_n[i]
        a = mu * y / (2.0 * lam)
        x = mu / (1.0 + a + np.sqrt(a * a + 2.0 * a))
        if flat_u[i] * (mu + x) <= mu:
            out[i] = x
        else:
            out[i] = mu * mu / x
    return out.reshape(normals.shape)


# ---------------------------------------------------------------------------
# Euler schemes
# ---------------------------------------------------------------------------


def euler_vasicek_np(r0, a, k, sigma, h, normals):
    m, n = normals.shape
    rates = np.empty((m, n + 1))
    rates[:, 0] = r0
    vol = sigma * np.sqrt(h)
    for i in range(n):
        r = rates[:, i]
        rates[:, i + 1] = r + a * (k - r) * h + vol * normals[:, i]
    return rates


@njit
def euler_vasicek_nb(r0, a, k, sigma, h, normals):
    m, n = normals.shape
    rates = np.empty((m, n + 1))
    vol = sigma * np.sqrt(h)
    for j in range(m):
        r = r0
        rates[j, 0] = r
        for i in range(n):
            r = r + a * (k - r) * h + vol * normals[j, i]
            rates[j, i + 1] = r
    return rates


def euler_lhw_np(r0, alpha, kappa, h, jumps):
    """``kappa`` holds the mean-reversion level at the left end of each step."""
    m, n = jumps.shape
    rates = np.empty((m, n + 1))
    rates[:, 0] = r0
    for i in range(n):
        r = rates[:, i]
        rates[:, i + 1] = r + alpha * (kappa[i] - r) * h + jumps[:, i]
    return rates


@njit
def euler_lhw_nb(r0, alpha, kappa, h, jumps):
    m, n = jumps.shape
    rates = np.empty((m, n + 1))
    for j in range(m):
        r = r0
        rates[j, 0] = r
        for i in range(n):
            r = r + alpha * (kappa[i] - r) * h + jumps[j, i]
            rates[j, i + 1] = r
    return rates


# ---------------------------------------------------------------------------
# one-dimensional q-nearest-neighbour averaging
# ---------------------------------------------------------------------------


def knn_windows_np(xs, q):
    """Left end of the q-neighbour window of every point of sorted ``xs``.

    The window of position ``s`` grows one point at a time from ``[s, s]``,
    taking the nearer of the two outside points and the left one on a tie.
    """
    m = xs.size
    pos = np.arange(m)
    lo = pos.copy()
    hi = pos.copy()
    for _ in range(q - 1):
        left_ok = lo > 0
        right_ok = hi < m - 1
        dl = np.where(left_ok, xs - xs[np.maximum(lo - 1, 0)], np.inf)
        dr = np.where(right_ok, xs[np.minimum(hi + 1, m - 1)] - xs, np.inf)
        take_left = dl <= dr
        lo = np.where(take_left, lo - 1, lo)
        hi = np.where(take_left, hi, hi + 1)
    return lo


@njit
def knn_windows_nb(xs, q):
    m = xs.size
    lo = np.empty(m, dtype=np.int64)
    for s in range(m):
        a = s
        b = s
        for _ in range(q - 1):
            dl = xs[s] - xs[a - 1] if a > 0 else np.inf
            dr = xs[b + 1] - xs[s] if b < m - 1 else np.inf
            if dl <= dr:
                a -= 1
            else:
                b += 1
        lo[s] = a
    return lo


def window_means_np(ys, lo, q):
    idx = lo[:, None] + np.arange(q)[None, :]
    return ys[idx].sum(axis=1) / q


@njit
def window_means_nb(ys, lo, q):
    m = lo.size
    out = np.empty(m)
    for s in range(m):
        acc = 0.0
        for t in range(q):
            acc += ys[lo[s] + t]
        out[s] = acc / q
    return out


if USE_NUMBA:
    ig_transform = ig_transform_nb
    euler_vasicek = euler_vasicek_nb
    euler_lhw = euler_lhw_nb
    knn_windows = knn_windows_nb
    window_means = window_means_nb
else:
    ig_transform = ig_transform_np
    euler_vasicek = euler_vasicek_np
    euler_lhw = euler_lhw_np
    knn_windows = knn_windows_np
    window_means = window_means_np

BACKEND = "numba" if USE_NUMBA else "numpy"
