"""Young-Fenchel (Legendre) conjugation on the real line.

``legendre(g, q) = sup_{p in dom g} (p |q| - g(p))``. The sup is located by
a coarse grid pass and refined by golden-section search on the bracket
around the grid maximizer; when ``g`` is convex the objective is concave and
the refinement is exact to rounding. Unbounded domains are truncated at
``p_max`` and the truncation has to be certified: either the maximizer is
interior, or the objective provably diverges (returned as ``+inf``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._search import P_MAX, maximize_on_grid, search_grid
from .errors import TruncationUncertain
from .scalar_fn import CONVEX, INCREASING, ScalarFunction, from_table, write_header_csv


def _parametrize(g):
    """Return ``(t_lo, t_hi, x(t), y(t), growth)`` so that graph(g) = {(x(t), y(t))}."""
    if g.inverse_of is not None:
        h = g.inverse_of

        def xs(t):
            with np.errstate(all="ignore"):
                return np.asarray(h.fn(t), dtype=float)

        return h.domain_lo, h.domain_hi, xs, (lambda t: t), None

    def ys(t):
        with np.errstate(all="ignore"):
            v = np.asarray(g.fn(t), dtype=float)
        return np.where(np.isnan(v), np.inf, v)

    return g.domain_lo, g.domain_hi, (lambda t: t), ys, g.growth


def _legendre_flat(g, qa, p_max, n_grid):
    t_lo, t_hi, xs, ys, growth = _parametrize(g)
    grid = search_grid(t_lo, t_hi, n_grid, p_max)
    q_col = qa[:, None]

    def objective(t):
        t = np.broadcast_to(t, np.broadcast_shapes(t.shape, q_col.shape))
        with np.errstate(all="ignore"):
            return xs(t) * q_col - ys(t)

    arg, val, idx = maximize_on_grid(objective, grid)
    if math.isinf(t_hi):
        at_end = idx == grid.size - 1
        if np.any(at_end):
            val = val.copy()
            tail = objective(grid[None, -4:])
            slopes = np.diff(tail, axis=1) / np.diff(grid[-4:])
            for i in np.flatnonzero(at_end):
                if growth is not None and qa[i] > growth:
                    val[i] = math.inf
                elif growth is None and np.all(slopes[i] > 0) and np.all(np.diff(slopes[i]) >= 0):
                    val[i] = math.inf
                else:
                    raise TruncationUncertain(
                        f"sup for q={qa[i]:.6g} not attained before p_max={grid[-1]:.6g}",
                        lower_bound=float(val[i]),
                    )
    return arg, val


MAX_TRUNCATION = 1e12


def legendre(g, q, p_max=P_MAX, n_grid=512, return_argmax=False):
    """Young-Fenchel transform of ``g`` at ``q`` (scalar or array).

    An uncertified truncation at ``p_max`` is retried with ``p_max`` widened
    by factors of 100, up to ``MAX_TRUNCATION``.

    Returns ``+inf`` where divergence is certified: the catalog growth rate
    ``lim g(p)/p`` is below ``|q|``, or (without closed-form growth) the
    objective is increasing with nondecreasing slope at the truncation point.

    Raises:
        TruncationUncertain: maximizer sits at ``p_max`` without a divergence
            certificate; ``lower_bound`` holds the attained value.
    """
    q = np.asarray(q, dtype=float)
    qa = np.abs(q).ravel()
    while True:
        try:
            arg, val = _legendre_flat(g, qa, p_max, n_grid)
            break
        except TruncationUncertain:
            if p_max >= MAX_TRUNCATION:
                raise
            p_max *= 100.0
    if g.inverse_of is not None:
        with np.errstate(all="ignore"):
            arg = np.asarray(g.inverse_of.fn(arg), dtype=float)
    val = val.reshape(q.shape)
    arg = arg.reshape(q.shape)
    if q.ndim == 0:
        val, arg = float(val), float(arg)
    return (val, arg) if return_argmax else val


def conjugate_function(g, p_max=P_MAX, n_grid=512, q_hi=math.inf):
    """``g*`` as a :class:`ScalarFunction` on ``[0, q_hi]``.

    The derivative is the maximizer of the sup (envelope theorem).
    """
    return ScalarFunction(
        fn=lambda q: legendre(g, q, p_max, n_grid),
        deriv=lambda q: legendre(g, q, p_max, n_grid, return_argmax=True)[1],
        domain_lo=0.0,
        domain_hi=q_hi,
        monotonicity=INCREASING if g.domain_lo >= 0 else None,
        convexity=CONVEX,
        tag="conjugate",
        params={"of": g.describe()},
    )


@dataclass(frozen=True)
class ConjugateResult:
    q_grid: np.ndarray
    values: np.ndarray
    argmax_trace: np.ndarray

    def to_csv(self, path):
        write_header_csv(path, None, ["q", "value", "argmax"],
                         zip(self.q_grid, self.values, self.argmax_trace))


def conjugate_table(g, q_grid, p_max=P_MAX):
    q_grid = np.asarray(q_grid, dtype=float)
    values, arg = legendre(g, q_grid, p_max, return_argmax=True)
    return ConjugateResult(q_grid, np.asarray(values), np.asarray(arg))


def biconjugate(g, p_grid, p_max=P_MAX):
    """Tabulated ``g**`` on ``p_grid``: the closed convex envelope of ``g``.

    Only slopes ``q >= 0`` enter (the transform is even in ``q``), so the
    envelope is taken over nondecreasing affine minorants; for the
    increasing functions this package works with this is the full envelope.
    Slopes are searched up to twice the steepest slope of ``g`` on
    ``p_grid``, which contains every maximizer for interior points.
    """
    p_grid = np.asarray(p_grid, dtype=float)
    slopes = np.abs(np.asarray(g.derivative(p_grid), dtype=float))
    q_hi = 2.0 * float(np.max(slopes[np.isfinite(slopes)], initial=0.0)) + 1.0
    gstar = conjugate_function(g, p_max, q_hi=q_hi)
    values = legendre(gstar, p_grid, p_max)
    return from_table(p_grid, np.atleast_1d(values), convexity=CONVEX)


def _grid_values(g, n, grid, p_max):
    if grid is None:
        if n < 3:
            raise ValueError("need n >= 3")
        grid = np.linspace(g.domain_lo, min(g.domain_hi, p_max), n)
    with np.errstate(all="ignore"):
        y = np.asarray(g.fn(np.asarray(grid, dtype=float)), dtype=float)
    return y[np.isfinite(y)]


def midpoint_gap(y):
    """Largest ``y[i] - (y[i-k] + y[i+k])/2`` over equally spaced samples ``y``."""
    worst = -math.inf
    for k in range(1, (y.size - 1) // 2 + 1):
        gap = y[k:-k] - 0.5 * (y[: -2 * k] + y[2 * k:])
        worst = max(worst, float(gap.max()))
    return worst


def _scale(y):
    return max(1.0, float(np.max(np.abs(y)))) if y.size else 1.0


def convexity_defect(g, n=257, grid=None, p_max=P_MAX):
    """Largest midpoint gap ``g((x+z)/2) - (g(x)+g(z))/2`` over equally spaced triples.

    Non-positive (up to rounding) iff ``g`` is midpoint convex on the grid.
    An unbounded domain is truncated at ``p_max``.
    """
    return midpoint_gap(_grid_values(g, n, grid, p_max))


def defect_scale(g, n=257, grid=None, p_max=P_MAX):
    """``max(1, max |g|)`` over the same grid as :func:`convexity_defect`."""
    return _scale(_grid_values(g, n, grid, p_max))


def relative_convexity_defect(g, n=257, grid=None, p_max=P_MAX):
    y = _grid_values(g, n, grid, p_max)
    return midpoint_gap(y) / _scale(y)


def brute_force_legendre(g, q, lo, hi, n=1_000_000):
    """Dense-grid sup on ``[lo, hi]``; independent check for :func:`legendre`."""
    p = np.linspace(lo, hi, n)
    with np.errstate(all="ignore"):
        vals = p * abs(q) - np.asarray(g.fn(p), dtype=float)
    return float(np.nanmax(vals))


__all__ = [
    "ConjugateResult",
    "biconjugate",
    "brute_force_legendre",
    "conjugate_function",
    "conjugate_table",
    "convexity_defect",
    "defect_scale",
    "legendre",
    "midpoint_gap",
    "relative_convexity_defect",
]
