"""Generating functions, fundamental functions and the forward pipeline.

Given a generating function ``psi`` on ``[a, b)`` the module computes

* the fundamental function ``phi(delta) = sup_p delta**(1/p) / psi(p)``
  directly, by maximizing over ``p``;
* ``nu``, the inverse of ``p -> p / psi(p)``;
* the Young function ``N(u) = exp(nu*(u)) - exp(nu*(0))``;
* ``theta(delta) = 1 / N^{-1}(1/delta)``,

and tabulates ``phi`` against ``theta``. The two agree up to a bounded
ratio, not exactly (for ``psi(p) = sqrt(p)`` the ratio tends to about 1.166),
so the comparison reports ratios and never asserts equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._search import P_MAX, maximize_on_grid, scan_grid, search_grid
from .conjugate import legendre, midpoint_gap
from .errors import (
    DomainError,
    GLSError,
    NotIncreasing,
    NonYoung,
    OutOfRange,
    TruncationUncertain,
)
from .scalar_fn import (
    CONVEX,
    INCREASING,
    ScalarFunction,
    check_monotone,
    evaluate,
    from_callable,
    inverse,
    invert_monotone,
    parse_spec,
    scaled,
    write_header_csv,
)

TAIL_P_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class GeneratingFunction:
    """``psi`` together with its support ``[a, b)``.

    Validated on construction: ``psi`` positive on the support; for an
    unbounded support also strictly increasing.
    """

    psi: ScalarFunction
    a: float = 1.0
    b: float = math.inf
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.a < self.b:
            raise DomainError(f"empty support [{self.a}, {self.b})")
        if self.a < self.psi.domain_lo or self.b > self.psi.domain_hi:
            raise DomainError("support must lie inside the domain of psi")
        grid = scan_grid(self.a, self.b, 1024)
        vals = np.asarray(evaluate(self.psi, grid), dtype=float)
        finite = vals[np.isfinite(vals)]
        if finite.size == 0 or np.any(finite <= 0) or np.any(np.isnan(vals)):
            raise DomainError("generating function must be positive on its support",
                              hypothesis="psi must be continuous and positive on its support")
        if math.isinf(self.b):
            report = check_monotone(self.psi.with_meta(monotonicity=INCREASING), 1024)
            if not report.ok:
                raise DomainError(
                    f"psi must be strictly increasing on [a, inf); violation near p={report.location:.6g}",
                    hypothesis="psi must be strictly increasing to infinity when b is infinite",
                )

    def __call__(self, p):
        return evaluate(self.psi, p)

    @property
    def inf_value(self):
        """``inf psi`` over the support (scan-based)."""
        grid = search_grid(self.a, self.b, 2048)
        vals = np.asarray(evaluate(self.psi, grid), dtype=float)
        return float(np.min(vals[np.isfinite(vals)]))

    def scaled(self, C):
        return GeneratingFunction(scaled(self.psi, C), self.a, self.b)

    def describe(self):
        return self.psi.describe()


def parse_psi(spec):
    """Generating function from a catalog spec (``power:m=2``, ``grand:beta=1,b=2``,
    ``scaled:C=2,inner=...``, ``csv:path``)."""
    f = parse_spec(spec)
    return GeneratingFunction(f, f.domain_lo, f.domain_hi)


# -- direct fundamental function -------------------------------------------


def _sup_over_p(log_objective, gen, log_tail_bound, p_max):
    """Maximize ``log_objective(p)`` over the support; certify the tail for b = inf.

    ``log_objective`` takes a ``(n_cases, k)`` array of ``p``; ``log_tail_bound(P)``
    returns, per case, the log of an upper bound for the objective on ``[P, inf)``.
    Returns ``(log_max, argmax)``.
    """
    P = p_max
    while True:
        grid = search_grid(gen.a, gen.b, 256, P)
        arg, best, _ = maximize_on_grid(log_objective, grid)
        if not math.isinf(gen.b):
            return best, arg
        tail = log_tail_bound(grid[-1])
        if np.all(tail <= best):
            return best, arg
        if P >= TAIL_P_LIMIT:
            raise TruncationUncertain(
                "tail of the sup over p not certified up to p = %.3g" % P,
                lower_bound=np.exp(best),
            )
        P *= 100.0


def fundamental_direct(psi, delta, p_max=P_MAX):
    """``sup_{a <= p < b} delta**(1/p) / psi(p)`` for ``delta > 0`` (scalar or array).

    For ``b = inf`` the truncation at ``P`` is certified by
    ``sup_{p >= P} delta**(1/p)/psi(p) <= max(delta, 1)**(1/P) / psi(P)``, valid
    because ``psi`` increases; ``P`` grows until the bound falls below the
    attained maximum.
    """
    delta = np.asarray(delta, dtype=float)
    if np.any(~(delta > 0)):
        raise DomainError("delta must be positive")
    logd = np.log(delta).ravel()[:, None]

    def objective(p):
        with np.errstate(all="ignore"):
            return logd / p - np.log(np.asarray(evaluate(psi.psi, p), dtype=float))

    def tail(P):
        return np.maximum(logd[:, 0], 0.0) / P - math.log(float(evaluate(psi.psi, P)))

    best, _ = _sup_over_p(objective, psi, tail, p_max)
    out = np.exp(best).reshape(delta.shape)
    return float(out) if out.ndim == 0 else out


# -- forward pipeline ---------------------------------------------------------


def ratio_function(psi):
    """``p -> p / psi(p)`` on the support."""
    f = psi.psi
    return from_callable(
        lambda p: np.asarray(p, dtype=float) / f.fn(p),
        psi.a,
        psi.b,
        monotonicity=INCREASING,
        tag="ratio",
        params={"psi": psi.describe()},
    )


def nu_from_psi(psi):
    """``nu``: inverse of ``p -> p/psi(p)``, extended by ``+inf`` off its domain.

    Raises:
        NotIncreasing: ``p/psi(p)`` is not strictly increasing on the scan.
    """
    r = ratio_function(psi)
    report = check_monotone(r)
    if not report.ok:
        raise NotIncreasing(
            f"p/psi(p) is not strictly increasing for psi={psi.describe()}: "
            f"worst step {report.worst_violation:.3g} near p={report.location:.6g}",
            report=report,
        )
    return inverse(r, outside_value=math.inf)


@dataclass(frozen=True, eq=False)
class OrliczFunction:
    """Even Young function, stored through its right branch on ``[0, inf)``."""

    right: ScalarFunction
    notes: dict = field(default_factory=dict)

    def __call__(self, u):
        return evaluate(self.right, np.abs(np.asarray(u, dtype=float)))

    def derivative(self, u):
        u = np.asarray(u, dtype=float)
        return np.sign(u) * self.right.derivative(np.abs(u))

    def inverse(self, y, tol=1e-12):
        """Nonnegative solution of ``N(u) = y``."""
        return invert_monotone(self.right, y, tol)

    def elasticity(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(all="ignore"):
            return u * self.right.derivative(u) / self(u)


def young_scan_limit(N, ceiling=1e6):
    """First doubling point ``u >= 2`` where ``N(u)`` exceeds ``ceiling``."""
    u = 1.0
    while float(N.right.fn(np.asarray(2.0 * u))) <= ceiling and u < 1e6:
        u *= 2.0
    return 2.0 * u


def validate_young(N, n=257, u_hi=None, tol=1e-8, windows=3):
    """Raise :class:`NonYoung` unless ``N(0) = 0``, ``N`` increases and is convex on a scan.

    Besides ``[0, u_hi]`` the convexity scan is repeated on ``[0, u_hi / 4^k]``,
    ``k = 1..windows``, each relative to its own scale, so that a concave
    stretch near the origin is not masked by the size of ``N`` further out.
    """
    if float(N(0.0)) != 0.0:
        raise NonYoung(f"N(0) = {float(N(0.0)):.3g} != 0")
    u_hi = u_hi or young_scan_limit(N)
    worst = -math.inf
    for k in range(windows + 1):
        grid = np.linspace(0.0, u_hi / 4.0**k, n if k == 0 else 65)
        with np.errstate(all="ignore"):
            vals = np.asarray(N.right.fn(grid), dtype=float)
        if np.any(np.diff(vals) <= 0):
            raise NonYoung("N is not strictly increasing on the scan")
        finite = vals[np.isfinite(vals)]
        defect = midpoint_gap(finite) / max(1.0, float(np.abs(finite).max()))
        if defect > tol:
            raise NonYoung(
                f"N is not convex on [0, {grid[-1]:.4g}] (relative defect {defect:.3g})"
            )
        worst = max(worst, defect)
    return worst


def orlicz_from_psi(psi, validate=True):
    """``N(u) = exp(nu*(u)) - exp(nu*(0))`` for ``u >= 0``."""
    nu = nu_from_psi(psi)
    base = math.exp(legendre(nu, 0.0))

    def fn(u):
        with np.errstate(over="ignore"):
            return np.exp(legendre(nu, u)) - base

    def deriv(u):
        val, arg = legendre(nu, u, return_argmax=True)
        with np.errstate(over="ignore"):
            return np.exp(val) * arg

    right = ScalarFunction(
        fn=fn,
        deriv=deriv,
        domain_lo=0.0,
        monotonicity=INCREASING,
        convexity=CONVEX,
        tag="orlicz",
        params={"psi": psi.describe()},
    )
    N = OrliczFunction(right, notes={"nu_star_at_0": math.log(base), "nu": nu})
    u_hi = young_scan_limit(N)
    N = OrliczFunction(right.with_meta(scan_limit=u_hi), notes=N.notes)
    if validate:
        validate_young(N, u_hi=u_hi)
    return N


def theta(psi, delta, N=None):
    """``1 / N^{-1}(1/delta)``; pass a precomputed ``N`` to skip rebuilding it."""
    delta = np.asarray(delta, dtype=float)
    if np.any(~(delta > 0)):
        raise DomainError("delta must be positive")
    N = N or orlicz_from_psi(psi)
    u = N.inverse(1.0 / delta)
    out = 1.0 / np.asarray(u, dtype=float)
    return float(out) if out.ndim == 0 else out


# -- comparison ----------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonReport:
    """Paired tabulation ``(lhs, rhs)`` with ``ratio = rhs / lhs`` per row.

    Invalid rows (pipeline error) carry NaN and ``valid = False``.
    """

    key_name: str
    keys: np.ndarray
    lhs_name: str
    lhs: np.ndarray
    rhs_name: str
    rhs: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def ratio(self):
        with np.errstate(all="ignore"):
            return self.rhs / self.lhs

    @property
    def valid(self):
        r = self.ratio
        return np.isfinite(r) & (r > 0)

    @property
    def ratio_min(self):
        r = self.ratio[self.valid]
        return float(r.min()) if r.size else math.nan

    @property
    def ratio_max(self):
        r = self.ratio[self.valid]
        return float(r.max()) if r.size else math.nan

    @property
    def log_ratio_at_smallest_key(self):
        """``log rhs / log lhs`` at the smallest key (e.g. smallest delta)."""
        if not self.valid.any():
            return math.nan
        i = int(np.argmin(np.where(self.valid, self.keys, np.inf)))
        return float(math.log(self.rhs[i]) / math.log(self.lhs[i]))

    def __len__(self):
        return len(self.keys)

    def to_csv(self, path):
        write_header_csv(
            path,
            self.meta,
            [self.key_name, self.lhs_name, self.rhs_name, "ratio"],
            zip(self.keys, self.lhs, self.rhs, self.ratio),
        )


DEFAULT_DELTAS = np.geomspace(1e-8, 1.0, 200)


def _rowwise(fn, xs):
    """Apply a vectorized ``fn``; on failure fall back to per-row calls with NaN."""
    try:
        return np.asarray(fn(xs), dtype=float)
    except GLSError:
        out = np.full(xs.shape, np.nan)
        for i, x in enumerate(xs):
            try:
                out[i] = fn(x)
            except GLSError:
                pass
        return out


def compare_fundamental(psi, delta_grid=None, N=None):
    """Tabulate the direct fundamental function against ``theta``."""
    deltas = np.asarray(DEFAULT_DELTAS if delta_grid is None else delta_grid, dtype=float)
    N = N or orlicz_from_psi(psi)
    phi = _rowwise(lambda d: fundamental_direct(psi, d), deltas)
    th = _rowwise(lambda d: theta(psi, d, N), deltas)
    return ComparisonReport("delta", deltas, "phi_direct", phi, "theta", th,
                            meta={"psi": psi.describe().replace(" ", "")})


__all__ = [
    "ComparisonReport",
    "GeneratingFunction",
    "OrliczFunction",
    "OutOfRange",
    "compare_fundamental",
    "fundamental_direct",
    "nu_from_psi",
    "orlicz_from_psi",
    "parse_psi",
    "ratio_function",
    "theta",
    "validate_young",
]
