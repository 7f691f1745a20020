"""L_p, Grand Lebesgue and Orlicz norms on weighted atomic measure spaces.

A diffuse measure is approximated by many small atoms. Infinite total mass is
modelled by a ``truncated_infinite`` space whose atoms grow geometrically up
to a finite total mass ``M``; reports carry ``M`` so that convergence in
``M`` can be observed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._search import P_MAX, golden_max
from .errors import BracketFailure, DomainError, TailUncertain, TruncationUncertain
from .gls_core import ComparisonReport, _sup_over_p, orlicz_from_psi
from .scalar_fn import evaluate, read_header_csv

PROBABILITY = "probability"
TRUNCATED_INFINITE = "truncated_infinite"


@dataclass(frozen=True, eq=False)
class DiscreteMeasureSpace:
    weights: np.ndarray
    kind: str = PROBABILITY

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0 or np.any(~(w > 0)):
            raise DomainError("atom weights must be a nonempty list of positive reals")
        if self.kind not in (PROBABILITY, TRUNCATED_INFINITE):
            raise DomainError(f"unknown space kind {self.kind!r}")
        if self.kind == PROBABILITY and abs(w.sum() - 1.0) > 1e-12:
            raise DomainError(f"probability space has total mass {w.sum()!r}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def total_mass(self):
        return float(self.weights.sum())

    def __len__(self):
        return self.weights.size

    @classmethod
    def uniform(cls, n=10_000):
        """``n`` equal atoms of mass ``1/n``."""
        return cls(np.full(n, 1.0 / n), PROBABILITY)

    @classmethod
    def truncated_infinite(cls, total_mass=1e3, n=10_000, breakpoints=()):
        """Geometrically growing atoms with cumulative masses from ``total_mass * 1e-9``
        to ``total_mass``; every mass in ``breakpoints`` is hit exactly by a prefix."""
        cum = np.geomspace(total_mass * 1e-9, total_mass, n)
        extra = [b for b in breakpoints if 0 < b < total_mass]
        cum = np.unique(np.concatenate((cum, extra)))
        w = np.diff(np.concatenate(([0.0], cum)))
        return cls(w, TRUNCATED_INFINITE)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        v = np.abs(np.array(self.values, dtype=float))
        object.__setattr__(self, "values", v)

    def check(self, mu):
        if self.values.shape != mu.weights.shape:
            raise DomainError(f"function has {self.values.size} values, space has {len(mu)} atoms")


def indicator(mu, mass, label=None):
    """Indicator of a prefix of atoms with total mass ``mass`` (must be hit exactly)."""
    cum = np.cumsum(mu.weights)
    k = int(np.searchsorted(cum, mass * (1 + 1e-12), side="right"))
    if k == 0 or abs(cum[k - 1] - mass) > 1e-9 * mass:
        raise DomainError(f"no prefix of atoms has mass {mass!r}; add it as a breakpoint")
    v = np.zeros(len(mu))
    v[:k] = 1.0
    return SampledFunction(v, label or f"indicator({mass:g})")


def load_sampled(path, kind=PROBABILITY):
    """Read ``weight,value`` CSV into a space and a function on it."""
    _, header, rows = read_header_csv(path)
    if [h.strip() for h in header] != ["weight", "value"]:
        raise DomainError(f"{path}: expected header 'weight,value'")
    w = np.array([float(r[0]) for r in rows])
    v = np.array([float(r[1]) for r in rows])
    return DiscreteMeasureSpace(w, kind), SampledFunction(v)


# -- L_p and GLS -------------------------------------------------------------


def _log_lp(f, mu, p):
    """``log |f|_p`` for an array of ``p`` (any shape); ``-inf`` for ``f = 0``."""
    v = f.values
    top = v.max()
    if top == 0:
        return np.full(np.shape(p), -np.inf)
    nz = v > 0
    logr = np.log(v[nz] / top)
    logw = np.log(mu.weights[nz])
    p = np.asarray(p, dtype=float)
    flat = p.reshape(-1, 1)
    s = np.logaddexp.reduce(logw[None, :] + flat * logr[None, :], axis=1)
    return (math.log(top) + s / flat[:, 0]).reshape(p.shape)


def lp_norm(f, mu, p):
    """``(sum_i w_i |f_i|^p)^(1/p)`` for ``p >= 1``, computed in log form."""
    f.check(mu)
    if np.any(np.asarray(p) < 1):
        raise DomainError("p must be >= 1")
    out = np.exp(_log_lp(f, mu, p))
    return float(out) if out.ndim == 0 else out


def gls_norm(f, mu, psi, p_max=P_MAX):
    """``sup_{a <= p < b} |f|_p / psi(p)``.

    For ``b = inf`` the tail beyond the truncation ``P`` is bounded by
    ``||f||_inf / psi(P)`` on probability spaces and by
    ``max(||f||_inf, |f|_a) max(M, 1)^(1/P) / psi(P)`` on truncated infinite
    ones; ``P`` is widened until that bound is below the attained maximum.

    Raises:
        TailUncertain: the tail cannot be certified.
    """
    f.check(mu)
    if mu.kind == TRUNCATED_INFINITE and psi.a < 1:
        raise DomainError("GLS norm on an infinite space needs support starting at a >= 1")
    if f.values.max() == 0:
        return 0.0

    def objective(p):
        with np.errstate(all="ignore"):
            return _log_lp(f, mu, p) - np.log(np.asarray(evaluate(psi.psi, p), dtype=float))

    sup_f = f.values.max()
    if mu.kind == PROBABILITY:
        log_c = math.log(sup_f)
        extra = 0.0
    else:
        log_c = max(math.log(sup_f), float(_log_lp(f, mu, psi.a)))
        extra = math.log(max(mu.total_mass, 1.0))

    def tail(P):
        return np.array([log_c + extra / P - math.log(float(evaluate(psi.psi, P)))])

    try:
        best, _ = _sup_over_p(objective, psi, tail, p_max)
    except TruncationUncertain as exc:
        raise TailUncertain(str(exc), lower_bound=exc.lower_bound) from None
    return float(np.exp(best[0]))


# -- Orlicz ----------------------------------------------------------------


def modular(f, mu, N, k):
    """``sum_i w_i N(|f_i| / k)``; ``N`` is evaluated once per distinct value."""
    vals, inv = np.unique(f.values, return_inverse=True)
    with np.errstate(over="ignore"):
        nv = np.asarray(N(vals / k), dtype=float)
    return float(np.dot(mu.weights, nv[inv]))


def luxemburg_norm(f, mu, N, rtol=1e-13):
    """``inf{k > 0 : sum_i w_i N(|f_i|/k) <= 1}`` by bisection in ``log k``.

    The returned ``k`` is the upper end of the final bracket, so its modular
    is at most 1.
    """
    f.check(mu)
    top = f.values.max()
    if top == 0:
        return 0.0
    lo = hi = top
    while modular(f, mu, N, hi) > 1.0:
        hi *= 2.0
    while modular(f, mu, N, lo) <= 1.0:
        lo /= 2.0
    while hi - lo > rtol * hi:
        mid = math.sqrt(lo * hi)
        if mid <= lo or mid >= hi:
            break
        if modular(f, mu, N, mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


def amemiya(f, mu, N, v_lo=1e-12, v_hi=1e12):
    """Minimize ``F(v) = (1 + sum_i w_i N(v |f_i|)) / v`` over ``v > 0``.

    Golden-section on ``ln v`` after geometric bracket expansion around
    ``v = 1/||f||_inf``. Returns ``(value, v, bracketed)``; when no interior
    minimum is found in ``[v_lo, v_hi]`` the best endpoint is returned with
    ``bracketed = False``.
    """
    f.check(mu)
    top = f.values.max()
    if top == 0:
        return 0.0, math.inf, True

    def F(logv):
        logv = np.atleast_1d(logv)
        out = np.array([(1.0 + modular(f, mu, N, 1.0 / math.exp(x))) * math.exp(-x) for x in logv])
        return out

    lo_lim, hi_lim = math.log(v_lo), math.log(v_hi)
    c = -math.log(top)
    step = 1.0
    a, b = c - step, c + step
    fa, fc, fb = F(a)[0], F(c)[0], F(b)[0]
    while not (fc <= fa and fc <= fb):
        if fa < fc:
            b, fb, c, fc = c, fc, a, fa
            a = c - step
            fa = F(a)[0]
        else:
            a, fa, c, fc = c, fc, b, fb
            b = c + step
            fb = F(b)[0]
        step *= 2.0
        if a < lo_lim or b > hi_lim:
            ends = [(F(lo_lim)[0], lo_lim), (F(hi_lim)[0], hi_lim)]
            val, x = min(ends)
            warnings.warn("Amemiya minimization not bracketed; returning endpoint value",
                          BracketFailure, stacklevel=2)
            return float(val), math.exp(x), False
    x, negval = golden_max(lambda t: -np.array([F(ti)[0] for ti in np.atleast_1d(t)]),
                           np.array([a]), np.array([b]), iters=200)
    val = min(-float(negval[0]), fc)
    return val, math.exp(float(x[0])), True


def orlicz_norm_amemiya(f, mu, N):
    """Amemiya form of the Orlicz norm; ``0`` for ``f = 0``."""
    value, _, _ = amemiya(f, mu, N)
    return value


# -- reports -----------------------------------------------------------------


def equivalence_report(suite, mu, psi, N=None):
    """GLS norm against the Luxemburg norm for ``N = N_psi`` per suite member."""
    if not suite:
        return ComparisonReport("id", np.array([]), "gls", np.array([]), "orlicz", np.array([]))
    N = N or orlicz_from_psi(psi)
    gls = np.array([gls_norm(f, mu, psi) for f in suite])
    orl = np.array([luxemburg_norm(f, mu, N) for f in suite])
    ids = np.array([f.label or str(i) for i, f in enumerate(suite)], dtype=object)
    return ComparisonReport("id", ids, "gls", gls, "orlicz", orl,
                            meta={"total_mass": format(mu.total_mass, ".17g")})


__all__ = [
    "DiscreteMeasureSpace",
    "SampledFunction",
    "amemiya",
    "equivalence_report",
    "gls_norm",
    "indicator",
    "load_sampled",
    "lp_norm",
    "luxemburg_norm",
    "modular",
    "orlicz_norm_amemiya",
]
