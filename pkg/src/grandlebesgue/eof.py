"""Exponential Orlicz functions and Grand Lebesgue spaces over infinite measure.

``N(W, u) = exp(W(ln u))`` for ``u >= e^2``; below ``e^2`` the function is
continued by the power ``c u^kappa`` matching value and log-log slope at
``e^2`` (``kappa = W'(2)``), which is convex iff ``kappa >= 1``.

:func:`alpha_patch` replaces the bottom of a Young function by
``C1 u^alpha`` on ``[0, C2]``, the line ``C3 + C4 u`` on ``(C2, C5]`` and the
original function above ``C5``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import factorial

import numpy as np

from ._search import P_MAX
from .conjugate import conjugate_function, relative_convexity_defect
from .errors import DomainError, ExtensionNotConvex, NonConvex, NonYoung, NoValidC5
from .gls_core import (
    ComparisonReport,
    GeneratingFunction,
    OrliczFunction,
    fundamental_direct,
    validate_young,
)
from .norms import TRUNCATED_INFINITE, gls_norm, luxemburg_norm
from .scalar_fn import CONVEX, INCREASING, ScalarFunction, check_monotone, evaluate, from_callable

E2 = math.exp(2.0)


@dataclass(frozen=True, eq=False)
class WFunction:
    """Convex, strictly increasing ``W`` on ``[2, inf)`` with ``W' -> inf``.

    ``superlinear=False`` skips the ``W' -> inf`` scan, which lets linear
    ``W`` (giving pure powers ``N(u) = u^m``) through.
    """

    W: ScalarFunction
    superlinear: bool = True

    def __post_init__(self):
        w = self.W
        if w.domain_lo > 2.0:
            raise DomainError("W must be defined on [2, inf)")
        top = self.scan_top
        grid = np.linspace(2.0, top, 257)
        vals = np.asarray(evaluate(w, grid), dtype=float)
        if np.any(np.diff(vals) <= 0):
            raise DomainError("W must be strictly increasing",
                              hypothesis="W must be strongly increasing")
        if relative_convexity_defect(w, grid=grid) > 1e-8:
            raise NonConvex("W must be convex", hypothesis="W must be downward convex")
        if self.superlinear:
            d = np.asarray(w.derivative(np.array([2.0, top])), dtype=float)
            if not d[1] > 10.0 * max(1.0, d[0]):
                raise DomainError("W' does not grow on the scan",
                                  hypothesis="W'(u) must tend to infinity")

    @property
    def scan_top(self):
        top = 4.0
        while top < P_MAX and float(evaluate(self.W, 2.0 * top)) < 1e300:
            top *= 2.0
        return top

    def __call__(self, z):
        return evaluate(self.W, z)


def _exponential_orlicz(w, tag, params):
    kappa = float(w.derivative(2.0))
    if kappa < 1.0:
        raise ExtensionNotConvex(f"log-log slope at e^2 is {kappa:.6g} < 1")
    n_e2 = math.exp(float(evaluate(w, 2.0)))
    c = n_e2 / math.exp(2.0 * kappa)

    def fn(u):
        u = np.asarray(u, dtype=float)
        low = u < E2
        with np.errstate(all="ignore"):
            top = np.exp(np.asarray(w.fn(np.log(np.maximum(u, E2))), dtype=float))
            return np.where(low, c * np.power(u, kappa), top)

    def deriv(u):
        u = np.asarray(u, dtype=float)
        low = u < E2
        z = np.log(np.maximum(u, E2))
        with np.errstate(all="ignore"):
            top = fn(np.maximum(u, E2)) * np.asarray(w.derivative(z), dtype=float) / np.maximum(u, E2)
            return np.where(low, c * kappa * np.power(u, kappa - 1.0), top)

    right = ScalarFunction(fn=fn, deriv=deriv, domain_lo=0.0, monotonicity=INCREASING,
                           convexity=CONVEX, tag=tag, params=params)
    N = OrliczFunction(right, notes={"kappa": kappa, "c": c})
    validate_young(N)
    return N


def eof_from_W(W):
    """``N(u) = exp(W(ln u))`` for ``u >= e^2`` with the power continuation below.

    Raises:
        ExtensionNotConvex: ``W'(2) < 1``.
    """
    return _exponential_orlicz(W.W, "eof", {"W": W.W.describe()})


# -- alpha patch -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AlphaPatch:
    alpha: float
    C1: float
    C2: float
    C3: float
    C4: float
    C5: float
    base: OrliczFunction
    slope_continuous: bool = True
    N: OrliczFunction = field(default=None)

    @property
    def constants(self):
        return {f"C{i}": getattr(self, f"C{i}") for i in range(1, 6)}

    def header(self):
        return {k: format(v, ".17g") for k, v in self.constants.items()}


def _patched(alpha, C1, C2, C3, C4, C5, base):
    def fn(u):
        u = np.asarray(u, dtype=float)
        with np.errstate(all="ignore"):
            hi = np.asarray(base.right.fn(np.maximum(u, C5)), dtype=float)
        return np.where(u <= C2, C1 * np.power(u, alpha), np.where(u <= C5, C3 + C4 * u, hi))

    def deriv(u):
        u = np.asarray(u, dtype=float)
        hi = np.asarray(base.right.derivative(np.maximum(u, C5)), dtype=float)
        with np.errstate(all="ignore"):
            low = alpha * C1 * np.power(u, alpha - 1.0)
        return np.where(u <= C2, low, np.where(u <= C5, C4, hi))

    right = ScalarFunction(fn=fn, deriv=deriv, domain_lo=0.0, monotonicity=INCREASING,
                           convexity=CONVEX, tag="alpha_patch", params={"alpha": alpha},
                           scan_limit=base.right.scan_limit)
    return OrliczFunction(right)


def alpha_patch(N, alpha, c1=None, n_scan=2048):
    """Build ``N^(alpha)``.

    For ``alpha > 1``: ``C5`` is the largest scan point ``u <= e^2`` whose
    elasticity ``u N'(u)/N(u)`` lies in ``(1, alpha)``; ``C3 + C4 u`` is the
    tangent of ``N`` at ``C5`` and ``C1 u^alpha`` touches that tangent at ``C2``.

    For ``alpha = 1`` a slope-continuous patch needs a point of elasticity 1
    (tangent through the origin). Without one, and if ``c1`` is given, the
    leading slope is set to ``C1 = c1`` and the line from the tangent at
    ``C5 = e^2`` is joined at ``C2 = -C3 / (C4 - C1)``: continuous and convex,
    with a kink at ``C2``.

    Raises:
        NoValidC5: no admissible knot exists.
    """
    if alpha < 1:
        raise DomainError("alpha must be >= 1")
    u = np.linspace(0.0, E2, n_scan + 1)[1:]
    el = np.asarray(N.elasticity(u), dtype=float)
    slope_continuous = True
    if alpha > 1 and np.all(np.abs(el - alpha) <= 1e-9 * alpha):
        C5 = C2 = E2
        C4 = float(N.right.derivative(C5))
        C3 = float(N(C5)) - C4 * C5
        C1 = float(N(C5)) / C5**alpha
    elif alpha > 1:
        ok = np.flatnonzero((el < alpha) & (el > 1.0))
        if ok.size == 0:
            raise NoValidC5(
                f"elasticity never in (1, {alpha}) on (0, e^2]; profile range "
                f"[{el.min():.4g}, {el.max():.4g}]",
                elasticity=el,
            )
        C5 = float(u[ok[-1]])
        C4 = float(N.right.derivative(C5))
        C3 = float(N(C5)) - C4 * C5
        C2 = alpha * (-C3) / (C4 * (alpha - 1.0))
        C1 = C4 / (alpha * C2 ** (alpha - 1.0))
    else:
        tangent = np.flatnonzero(np.abs(el - 1.0) <= 1e-9)
        if tangent.size:
            C5 = float(u[tangent[-1]])
            C4 = float(N.right.derivative(C5))
            C1, C3, C2 = C4, 0.0, 0.5 * C5
        elif c1 is not None:
            C5 = E2
            C4 = float(N.right.derivative(C5))
            C3 = float(N(C5)) - C4 * C5
            C1 = float(c1)
            if not (C3 < 0 and C1 < float(N(C5)) / C5):
                raise NoValidC5(f"leading slope {C1:.6g} incompatible with N at e^2")
            C2 = -C3 / (C4 - C1)
            slope_continuous = False
        else:
            raise NoValidC5(
                "alpha = 1 needs a point of unit elasticity (tangent through the "
                f"origin); elasticity on (0, e^2] is in [{el.min():.4g}, {el.max():.4g}]",
                elasticity=el,
            )
    patched = _patched(alpha, C1, C2, C3, C4, C5, N)
    return AlphaPatch(alpha, C1, C2, C3, C4, C5, N, slope_continuous, patched)


def _one_sided_slopes(fn, x, h):
    """Second-order one-sided difference quotients ``(left, right)`` at ``x``."""
    f0, fl1, fl2 = fn(x), fn(x - h), fn(x - 2 * h)
    fr1, fr2 = fn(x + h), fn(x + 2 * h)
    left = (3 * f0 - 4 * fl1 + fl2) / (2 * h)
    right = (-3 * f0 + 4 * fr1 - fr2) / (2 * h)
    return float(left), float(right)


def knot_report(patch):
    """Relative value and slope jumps at ``C2`` and ``C5`` (one-sided formulas)."""
    a, C1, C2, C3, C4, C5 = patch.alpha, patch.C1, patch.C2, patch.C3, patch.C4, patch.C5
    base = patch.base
    value_c2 = abs(C1 * C2**a - (C3 + C4 * C2)) / max(abs(C3 + C4 * C2), 1e-300)
    value_c5 = abs(C3 + C4 * C5 - float(base(C5))) / float(base(C5))
    fn = lambda x: float(patch.N(x))  # noqa: E731
    out = {"value_C2": value_c2, "value_C5": value_c5}
    for name, k in (("C2", C2), ("C5", C5)):
        left, right = _one_sided_slopes(fn, k, 1e-5 * k)
        out[f"slope_{name}"] = abs(left - right) / abs(right)
    return out


# -- Trudinger family --------------------------------------------------------


def _exp_tail(x, j, terms=60):
    """``exp(x) - sum_{l<=j} x^l/l!`` without cancellation for small ``x``."""
    x = np.asarray(x, dtype=float)
    head = sum(np.power(x, l) / factorial(l) for l in range(j + 1)) if j >= 0 else 0.0
    with np.errstate(over="ignore"):
        direct = np.exp(x) - head
    series = sum(np.power(x, l) / factorial(l) for l in range(j + 1, j + 1 + terms))
    return np.where(x < 1.0, series, direct)


def trudinger(m, j):
    """``exp(|u|^m) - sum_{l=0}^{j} |u|^{ml}/l!``.

    Raises:
        NonYoung: the validation scan fails (e.g. concave near 0 for small m).
    """
    if not (m > 0 and j >= 0):
        raise DomainError("need m > 0 and integer j >= 0")
    j = int(j)

    def fn(u):
        return _exp_tail(np.power(np.abs(u), m), j)

    def deriv(u):
        u = np.asarray(u, dtype=float)
        with np.errstate(all="ignore"):
            return m * np.power(u, m - 1.0) * _exp_tail(np.power(u, m), j - 1)

    right = ScalarFunction(fn=fn, deriv=deriv, domain_lo=0.0, monotonicity=INCREASING,
                           tag="trudinger", params={"m": m, "j": j})
    N = OrliczFunction(right)
    validate_young(N)
    return N


# -- generating functions of exponential type ----------------------------------


def psi_from_W(W, alpha=1.0):
    """``psi(p) = exp(W*(p) / p)`` on ``[alpha, inf)``."""
    wstar = conjugate_function(W.W)

    def fn(p):
        p = np.asarray(p, dtype=float)
        with np.errstate(over="ignore"):
            return np.exp(np.asarray(wstar.fn(p), dtype=float) / p)

    psi = from_callable(fn, alpha, math.inf, monotonicity=INCREASING,
                        tag="psi_W", params={"W": W.W.describe()})
    return GeneratingFunction(psi, alpha, math.inf)


def log_moment_function(psi):
    """``p -> p ln psi(p)`` on the support of ``psi``."""
    f = psi.psi
    return from_callable(
        lambda p: np.asarray(p, dtype=float) * np.log(np.asarray(f.fn(p), dtype=float)),
        psi.a,
        psi.b,
        tag="p_log_psi",
        params={"psi": psi.describe()},
    )


def orlicz_from_psi_eof(psi, p_check=1e3):
    """``N(u) = exp([p ln psi(p)]*(ln u))`` for ``u >= e^2``, power continuation below.

    Raises:
        NonConvex: ``p ln psi(p)`` is not convex on the scan.
    """
    g = log_moment_function(psi)
    grid = np.linspace(psi.a, min(psi.b, p_check), 257)
    defect = relative_convexity_defect(g, grid=grid)
    if defect > 1e-8:
        raise NonConvex(
            f"p ln psi(p) is not convex (relative defect {defect:.3g})",
            hypothesis="p log psi(p) must be convex",
        )
    return _exponential_orlicz(conjugate_function(g), "eof_psi", {"psi": psi.describe()})


# -- infinite-measure comparison ---------------------------------------------


@dataclass(frozen=True)
class TheoremACheck:
    norms: ComparisonReport
    fundamental: ComparisonReport
    patch: AlphaPatch
    total_mass: float


def theorem_a_check(psi, alpha, suite, mu, deltas=None):
    """Luxemburg norm for ``N^(alpha)`` against the GLS norm on ``[alpha, inf)``.

    ``N^(alpha)`` patches the exponential Young function of ``psi``; for
    ``alpha = 1`` its leading slope is ``psi(alpha)^(-alpha)``, which matches the
    two norms on sets of large measure. Also tabulates the direct
    fundamental function against ``1 / N^(alpha)^{-1}(1/delta)`` for ``delta`` in
    ``(0, total_mass)``.
    """
    if mu.kind != TRUNCATED_INFINITE:
        raise DomainError("theorem_a_check needs a truncated_infinite space")
    gen = GeneratingFunction(psi.psi, alpha, psi.b)
    base = orlicz_from_psi_eof(gen)
    patch = alpha_patch(base, alpha, c1=float(gen(alpha)) ** (-alpha))
    M = mu.total_mass
    gls = np.array([gls_norm(f, mu, gen) for f in suite])
    lux = np.array([luxemburg_norm(f, mu, patch.N) for f in suite])
    ids = np.array([f.label or str(i) for i, f in enumerate(suite)], dtype=object)
    meta = {"total_mass": format(M, ".17g"), "atoms": len(mu), **patch.header()}
    norms = ComparisonReport("id", ids, "gls", gls, "orlicz", lux, meta=meta)
    if deltas is None:
        deltas = np.geomspace(1e-6, 0.999 * M, 60)
    deltas = np.asarray(deltas, dtype=float)
    phi = fundamental_direct(gen, deltas)
    th = 1.0 / np.asarray(patch.N.inverse(1.0 / deltas), dtype=float)
    fund = ComparisonReport("delta", deltas, "phi_direct", phi, "theta", th, meta=meta)
    return TheoremACheck(norms, fund, patch, M)


__all__ = [
    "AlphaPatch",
    "TheoremACheck",
    "WFunction",
    "alpha_patch",
    "eof_from_W",
    "knot_report",
    "log_moment_function",
    "orlicz_from_psi_eof",
    "psi_from_W",
    "theorem_a_check",
    "trudinger",
    "NonYoung",
    "check_monotone",
]
