"""Grid construction and vectorized golden-section search."""

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
P_MAX = 1.0e4


def _clean(values):
    values = np.asarray(values, dtype=float)
    return np.where(np.isnan(values), -np.inf, values)


def golden_max(fun, lo, hi, iters=100):
    """Maximize ``fun`` elementwise on brackets ``[lo, hi]``.

    ``fun`` receives an array shaped like ``lo`` and must return values of the
    same shape; element ``i`` of the result depends on element ``i`` of the
    input only. NaN is treated as ``-inf``. Iteration stops once every bracket
    is below ``1e-11`` relative: near a smooth maximum the value is then exact
    to rounding, and further steps only compare noise.

    Returns ``(argmax, max)`` arrays.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc = _clean(fun(c))
    fd = _clean(fun(d))
    for _ in range(iters):
        left = fc >= fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        new_c = hi - INV_PHI * (hi - lo)
        new_d = lo + INV_PHI * (hi - lo)
        x = np.where(left, new_c, new_d)
        fx = _clean(fun(x))
        c, d, fc, fd = (
            np.where(left, x, d),
            np.where(left, c, x),
            np.where(left, fx, fd),
            np.where(left, fc, fx),
        )
        if np.all(hi - lo <= 1e-11 * np.maximum(1.0, np.abs(hi))):
            break
    take_c = fc >= fd
    return np.where(take_c, c, d), np.where(take_c, fc, fd)


def scan_grid(lo, hi, n, p_max=P_MAX):
    """Scan points on ``[lo, hi]``; log-spaced when the domain spans decades.

    An infinite ``hi`` is truncated at ``p_max``.
    """
    top = min(hi, p_max) if math.isinf(hi) else hi
    if top <= lo:
        top = lo + max(1.0, abs(lo))
    if lo > 0 and top / lo > 20.0:
        return np.geomspace(lo, top, n)
    if lo <= 0 and math.isinf(hi):
        return lo + np.concatenate(([0.0], np.geomspace(1e-8, top - lo, n - 1)))
    return np.linspace(lo, top, n)


def search_grid(lo, hi, n, p_max=P_MAX):
    """Grid for maximizations: a scan grid, plus an accumulation toward a finite
    right end ``hi`` (points ``hi - (hi - lo) 2^-k``)."""
    grid = scan_grid(lo, hi, n, p_max)
    if not math.isinf(hi):
        k = np.arange(1, 60)
        grid = np.concatenate((grid, hi - (hi - lo) * 0.5**k))
        grid = np.unique(grid[(grid >= lo) & (grid <= hi)])
    return grid


def maximize_on_grid(objective, grid, iters=100):
    """Coarse pass over ``grid`` followed by golden refinement per column.

    ``objective(t)`` takes an array of abscissae shaped ``(n_cases, k)`` and
    returns values of the same shape. Returns ``(argmax, max, index)`` with
    ``index`` the position of the coarse maximizer in ``grid``.
    """
    grid = np.asarray(grid, dtype=float)
    values = _clean(objective(grid[None, :]))
    idx = np.argmax(values, axis=1)
    best = values[np.arange(values.shape[0]), idx]
    lo = grid[np.maximum(idx - 1, 0)]
    hi = grid[np.minimum(idx + 1, grid.size - 1)]
    arg, val = golden_max(lambda t: objective(t[:, None])[:, 0], lo, hi, iters)
    better = val > best
    arg = np.where(better, arg, grid[idx])
    best = np.where(better, val, best)
    return arg, best, idx
