"""Recovering a generating function from a fundamental function.

Steps, for a fundamental function ``phi`` on ``(0, delta_max]``:

1. ``N(z) = 1 / phi^{-1}(1/z)``, the map that undoes ``theta``;
2. ``V*(z) = ln(C + N(z))``, required to be convex;
3. ``V = (V*)*``;
4. ``psi(p) = p / V^{-1}(p)``.

Everything is tabulated: in practice ``phi`` arrives as data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conjugate import convexity_defect, defect_scale, legendre
from .errors import AllNonConvex, DomainError, NonConvex, NotMonotone, OutOfRange
from .gls_core import GeneratingFunction
from .scalar_fn import (
    CONVEX,
    INCREASING,
    ScalarFunction,
    check_monotone,
    evaluate,
    from_table,
    invert_monotone,
    load_table,
    save_table,
)

ZERO_LIMIT_TOL = 1e-2
CONVEXITY_GATE = 1e-4


def _zero_limit_estimate(phi, lo):
    """Extrapolate ``phi(0+)``.

    Fundamental functions of these spaces decay only like a power of
    ``1/ln(1/delta)``, so the limit is estimated in the variable
    ``t = 1/ln(1/delta)`` by Aitken's delta-squared on ``t, t/2, t/4`` anchored
    at the smallest available ``delta``. Exact for ``c0 + c t**s``.
    """
    t_min = 1.0 / math.log(1.0 / lo) if lo < 1 else 0.5
    ts = np.array([4 * t_min, 2 * t_min, t_min])
    deltas = np.exp(-1.0 / ts)
    y = np.asarray(evaluate(phi, deltas), dtype=float)
    d1, d2 = y[1] - y[0], y[2] - y[1]
    if d1 == 0:
        return float(y[2])
    r = d2 / d1
    if not 0 <= r < 1:
        return float(y[2])
    return float(y[2] - d2 * r / (r - 1.0))


@dataclass(frozen=True, eq=False)
class FundamentalFunction:
    """A strictly increasing ``phi`` on ``(0, delta_max]`` with ``phi(0+) = 0``."""

    phi: ScalarFunction

    def __post_init__(self):
        f = self.phi
        if f.is_table and f.table[0].size < 2:
            raise DomainError("fundamental function needs at least two knots")
        report = check_monotone(f.with_meta(monotonicity=INCREASING) if f.monotonicity is None else f)
        if not report.ok or report.direction != INCREASING:
            raise NotMonotone(
                "fundamental function must be strictly increasing",
                hypothesis="phi must be strictly increasing and continuous",
            )
        lo = self.delta_min
        if not f.is_table:
            k = np.arange(0, 41)
            seq = np.asarray(evaluate(f, np.maximum(self.delta_max * 0.5**k, lo)), dtype=float)
            if np.any(np.diff(seq) > 0):
                raise NotMonotone("phi does not decrease along delta = 2^-k")
        limit = _zero_limit_estimate(f, lo)
        if abs(limit) > ZERO_LIMIT_TOL * float(evaluate(f, self.delta_max)):
            raise DomainError(
                f"phi(0+) extrapolates to {limit:.4g}, not 0",
                hypothesis="phi must vanish at 0+",
            )

    @property
    def delta_min(self):
        lo = self.phi.domain_lo
        return lo if lo > 0 else 2.0**-40

    @property
    def delta_max(self):
        return self.phi.domain_hi

    @classmethod
    def from_table(cls, deltas, values, rule="loglog"):
        return cls(from_table(deltas, values, rule=rule, monotonicity=INCREASING))

    @classmethod
    def from_csv(cls, path):
        return cls(load_table(path, rule="loglog").with_meta(monotonicity=INCREASING))

    def __call__(self, delta):
        return evaluate(self.phi, delta)

    @property
    def z_range(self):
        """Arguments ``z`` on which ``N`` is determined: ``1/phi`` over the domain."""
        return (1.0 / float(self(self.delta_max)), 1.0 / float(self(self.delta_min)))


def orlicz_from_fundamental(phi, z):
    """``N(z) = 1 / phi^{-1}(1/z)``.

    Raises:
        OutOfRange: ``1/z`` is not a value of ``phi``.
    """
    z = np.asarray(z, dtype=float)
    if np.any(~(z > 0)):
        raise OutOfRange("z must be positive")
    delta = invert_monotone(phi.phi, 1.0 / z)
    out = 1.0 / np.asarray(delta, dtype=float)
    return float(out) if out.ndim == 0 else out


def log_orlicz(phi, C):
    """``V*(z) = ln(C + N(z))`` on the determined range of ``z``."""
    if not C > 0:
        raise DomainError("C must be positive")
    z_lo, z_hi = phi.z_range
    return ScalarFunction(
        fn=lambda z: np.log(C + orlicz_from_fundamental(phi, z)),
        domain_lo=z_lo,
        domain_hi=z_hi,
        monotonicity=INCREASING,
        tag="log_orlicz",
        params={"C": C},
    )


def log_orlicz_defect(phi, C, n=257):
    """Relative convexity defect of ``ln(C + N(z))``; the grid is equally spaced in ``z``."""
    vstar = log_orlicz(phi, C)
    grid = np.linspace(vstar.domain_lo, vstar.domain_hi, n)
    return convexity_defect(vstar, grid=grid) / defect_scale(vstar, grid=grid)


def save_recovered(gen, path):
    """Write a recovered ``psi`` as ``x,value`` CSV with a ``# C=... defect=...`` header."""
    save_table(gen.psi, path, extra={k: format(gen.notes[k], ".17g") for k in ("C", "defect")})


def psi_from_fundamental(phi, C=None, p_grid=None):
    """Recover ``psi`` on ``p_grid`` from ``phi``.

    ``C`` defaults to :func:`choose_C`. The conjugate ``V`` is trusted only
    where its maximizer lies strictly inside the determined ``z`` range;
    outside, :class:`OutOfRange` is raised instead of extrapolating.

    Raises:
        NonConvex: ``ln(C + N)`` fails the convexity gate.
        NotMonotone: ``V`` is not invertible on the grid.
        OutOfRange: some ``p`` is not covered by the data.
    """
    if C is None:
        C = choose_C(phi)
    if p_grid is None:
        p_grid = np.geomspace(1.5, 20.0, 64)
    p_grid = np.asarray(p_grid, dtype=float)
    vstar = log_orlicz(phi, C)
    defect = log_orlicz_defect(phi, C)
    if defect > CONVEXITY_GATE:
        raise NonConvex(
            f"ln(C + N(z)) is not convex for C={C:.6g} (relative defect {defect:.3g})",
            hypothesis="ln(C + N(z)) must be continuous and convex",
        )
    z_lo, z_hi = vstar.domain_lo, vstar.domain_hi
    h = 1e-6 * z_hi
    x_lo = float((vstar(z_lo + h) - vstar(z_lo)) / h)
    x_hi = float((vstar(z_hi) - vstar(z_hi - h)) / h)
    V = ScalarFunction(
        fn=lambda x: legendre(vstar, x),
        domain_lo=x_lo,
        domain_hi=x_hi,
        monotonicity=INCREASING,
        convexity=CONVEX,
        tag="V",
    )
    x = np.asarray(invert_monotone(V, p_grid, tol=1e-12), dtype=float)
    _, zarg = legendre(vstar, x, return_argmax=True)
    inside = (zarg > z_lo * (1 + 1e-9)) & (zarg < z_hi * (1 - 1e-9))
    if not np.all(inside):
        bad = p_grid[~inside]
        raise OutOfRange(
            f"p in [{bad.min():.4g}, {bad.max():.4g}] is not determined by the "
            f"tabulated range of phi",
        )
    values = p_grid / x
    mono = INCREASING if np.all(np.diff(values) > 0) else None
    table = from_table(p_grid, values, rule="loglog", monotonicity=mono)
    return GeneratingFunction(table, float(p_grid[0]), float(p_grid[-1]),
                              notes={"C": C, "defect": defect})


def choose_C(phi, grid=None):
    """The ``C`` in ``[1e-4, 1e4]`` (log grid) minimizing the convexity defect of
    ``ln(C + N)``; near-ties go to the candidate closest to 1.

    Raises:
        AllNonConvex: no candidate passes the convexity gate.
    """
    if not isinstance(phi, FundamentalFunction):
        raise DomainError("choose_C needs a validated FundamentalFunction")
    cs = np.geomspace(1e-4, 1e4, 33) if grid is None else np.asarray(grid, dtype=float)
    defects = np.array([log_orlicz_defect(phi, c) for c in cs])
    best = defects.min()
    if best > CONVEXITY_GATE:
        raise AllNonConvex(
            f"ln(C + N) is not convex for any C in [{cs[0]:.3g}, {cs[-1]:.3g}] "
            f"(smallest relative defect {best:.3g})"
        )
    tied = np.flatnonzero(defects <= best + 1e-12)
    return float(cs[tied[np.argmin(np.abs(np.log(cs[tied])))]])
