"""One-dimensional real functions on intervals.

A :class:`ScalarFunction` is the common carrier for generating functions,
their ratio inverses, conjugates and Young functions. It wraps a vectorized
body (closed-form catalog member, tabulation, or arbitrary callable) together
with its domain and declared shape metadata.

Values outside the domain are either rejected (:class:`DomainError`) or
reported as ``+inf`` when ``outside_value`` is set to ``math.inf``.
"""

from __future__ import annotations

import contextlib
import csv
import math
import sys
import weakref
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from ._search import P_MAX, scan_grid
from .errors import DomainError, NotMonotone, OutOfRange

INCREASING = "increasing"
DECREASING = "decreasing"
CONVEX = "convex"
CONCAVE = "concave"

DEFAULT_TOL = 1e-10

_MONOTONE_CACHE = weakref.WeakKeyDictionary()


@dataclass(frozen=True, eq=False)
class ScalarFunction:
    """A real function on ``[domain_lo, domain_hi]`` (``domain_hi`` may be inf).

    ``fn`` must accept and return numpy arrays. ``growth`` is the limit of
    ``f(x)/x`` as ``x -> inf`` when known in closed form; it lets the
    conjugate certify divergence. ``inverse_of`` is set when this function is
    the inverse of another increasing function, so that sups involving it can
    be taken in the original parametrization.
    """

    fn: Callable
    domain_lo: float
    domain_hi: float = math.inf
    monotonicity: Optional[str] = None
    convexity: Optional[str] = None
    outside_value: Optional[float] = None
    tag: str = "callable"
    params: dict = field(default_factory=dict)
    table: Optional[tuple] = None
    rule: Optional[str] = None
    deriv: Optional[Callable] = None
    growth: Optional[float] = None
    inverse_of: Optional["ScalarFunction"] = None
    scan_limit: Optional[float] = None

    def __post_init__(self):
        if not self.domain_lo < self.domain_hi:
            raise DomainError(f"empty domain [{self.domain_lo}, {self.domain_hi}]")
        if math.isnan(self.domain_lo) or math.isinf(self.domain_lo):
            raise DomainError("domain_lo must be finite")

    @property
    def is_table(self):
        return self.table is not None

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return (x >= self.domain_lo) & (x <= self.domain_hi)

    def __call__(self, x):
        return evaluate(self, x)

    def derivative(self, x):
        """Exact derivative for catalog forms, central differences otherwise."""
        x = np.asarray(x, dtype=float)
        if self.deriv is not None:
            return _scalarize(np.asarray(self.deriv(x), dtype=float))
        h = 1e-6 * np.maximum(1.0, np.abs(x))
        lo = np.maximum(x - h, self.domain_lo)
        hi = np.minimum(x + h, self.domain_hi)
        with np.errstate(all="ignore"):
            out = (self.fn(hi) - self.fn(lo)) / (hi - lo)
        return _scalarize(np.asarray(out, dtype=float))

    def with_meta(self, **changes):
        return replace(self, **changes)

    def describe(self):
        if self.params:
            args = ",".join(f"{k}={v}" for k, v in self.params.items())
            return f"{self.tag}:{args}"
        return self.tag


def _scalarize(a):
    return float(a) if np.ndim(a) == 0 else a


# -- catalog ---------------------------------------------------------------


def power(m, c=1.0, lo=1.0, hi=math.inf):
    """``x -> c * x**(1/m)``."""
    e = 1.0 / m
    growth = 0.0 if e < 1 else (c if e == 1 else math.copysign(math.inf, c))
    return ScalarFunction(
        fn=lambda x: c * np.power(x, e),
        deriv=lambda x: c * e * np.power(x, e - 1.0),
        domain_lo=lo,
        domain_hi=hi,
        monotonicity=INCREASING if c > 0 else DECREASING,
        convexity=(CONVEX if e >= 1 else CONCAVE) if c > 0 else None,
        tag="power",
        params={"m": m} if c == 1.0 else {"m": m, "c": c},
        growth=growth,
    )


def grand(beta, b, lo=1.0):
    """``p -> (b - p)**(-beta)`` on ``[lo, b)``."""

    def fn(p):
        with np.errstate(divide="ignore"):
            return np.power(b - p, -beta)

    return ScalarFunction(
        fn=fn,
        deriv=lambda p: beta * np.power(b - p, -beta - 1.0),
        domain_lo=lo,
        domain_hi=b,
        monotonicity=INCREASING,
        convexity=CONVEX,
        tag="grand",
        params={"beta": beta, "b": b},
    )


def affine(c0, c1, lo=0.0, hi=math.inf):
    return ScalarFunction(
        fn=lambda x: c0 + c1 * np.asarray(x, dtype=float),
        deriv=lambda x: np.full_like(np.asarray(x, dtype=float), c1),
        domain_lo=lo,
        domain_hi=hi,
        monotonicity=INCREASING if c1 > 0 else (DECREASING if c1 < 0 else None),
        convexity=CONVEX,
        tag="affine",
        params={"c0": c0, "c1": c1},
        growth=c1,
    )


def quadratic(a, b=0.0, c=0.0, lo=0.0, hi=math.inf):
    """``x -> a x^2 + b x + c``."""
    return ScalarFunction(
        fn=lambda x: (a * np.asarray(x, dtype=float) + b) * x + c,
        deriv=lambda x: 2.0 * a * np.asarray(x, dtype=float) + b,
        domain_lo=lo,
        domain_hi=hi,
        monotonicity=INCREASING if a >= 0 and 2 * a * lo + b > 0 else None,
        convexity=CONVEX if a >= 0 else CONCAVE,
        tag="quadratic",
        params={"a": a, "b": b, "c": c},
        growth=math.copysign(math.inf, a) if a != 0 else b,
    )


def exponential(c=1.0, k=1.0, lo=0.0, hi=math.inf):
    """``x -> c exp(k x)``."""
    return ScalarFunction(
        fn=lambda x: c * np.exp(k * np.asarray(x, dtype=float)),
        deriv=lambda x: c * k * np.exp(k * np.asarray(x, dtype=float)),
        domain_lo=lo,
        domain_hi=hi,
        monotonicity=INCREASING if c * k > 0 else DECREASING,
        convexity=CONVEX if c > 0 else CONCAVE,
        tag="exp",
        params={"c": c, "k": k},
        growth=math.copysign(math.inf, c) if k > 0 else 0.0,
    )


def exp_rational(k=1.0, s=1.0, c=1.0, lo=1.0, hi=math.inf):
    """``x -> c exp(k x) / x**s`` (positive ``x``)."""

    def fn(x):
        x = np.asarray(x, dtype=float)
        return c * np.exp(k * x - s * np.log(x))

    return ScalarFunction(
        fn=fn,
        deriv=lambda x: fn(x) * (k - s / np.asarray(x, dtype=float)),
        domain_lo=lo,
        domain_hi=hi,
        tag="exp_rational",
        params={"k": k, "s": s, "c": c},
        growth=math.copysign(math.inf, c) if k > 0 else 0.0,
    )


def xlogx(c=1.0, lo=1.0, hi=math.inf):
    """``x -> c x ln x``."""

    def fn(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(x == 0, 0.0, c * x * np.log(x))

    return ScalarFunction(
        fn=fn,
        deriv=lambda x: c * (np.log(x) + 1.0),
        domain_lo=lo,
        domain_hi=hi,
        monotonicity=INCREASING if lo >= 1.0 / math.e and c > 0 else None,
        convexity=CONVEX if c > 0 else CONCAVE,
        tag="xlogx",
        params={"c": c},
        growth=math.copysign(math.inf, c),
    )


def scaled(f, C):
    """``x -> C f(x)``."""
    mono = f.monotonicity
    conv = f.convexity
    if C < 0:
        mono = {INCREASING: DECREASING, DECREASING: INCREASING}.get(mono)
        conv = {CONVEX: CONCAVE, CONCAVE: CONVEX}.get(conv)
    return ScalarFunction(
        fn=lambda x: C * f.fn(x),
        deriv=(lambda x: C * f.deriv(x)) if f.deriv is not None else None,
        domain_lo=f.domain_lo,
        domain_hi=f.domain_hi,
        monotonicity=mono,
        convexity=conv,
        outside_value=f.outside_value,
        tag="scaled",
        params={"C": C, "inner": f.describe()},
        growth=None if f.growth is None else C * f.growth,
    )


def from_callable(fn, lo, hi=math.inf, **meta):
    """Wrap a vectorized callable."""
    return ScalarFunction(fn=fn, domain_lo=lo, domain_hi=hi, **meta)


def from_table(x, y, rule="linear", monotonicity=None, convexity=None, outside_value=None):
    """Tabulation with piecewise-linear or log-log piecewise-linear interpolation."""
    x = np.array(x, dtype=float)
    y = np.array(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape or x.size < 2:
        raise DomainError("tabulation needs at least two (x, y) pairs of equal length")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DomainError("tabulation abscissae and values must be finite")
    if np.any(np.diff(x) <= 0):
        raise DomainError("tabulation abscissae must be strictly increasing")
    if rule not in ("linear", "loglog"):
        raise DomainError(f"unknown interpolation rule {rule!r}")
    if rule == "loglog" and (np.any(x <= 0) or np.any(y <= 0)):
        raise DomainError("log-log interpolation needs positive abscissae and values")
    x.setflags(write=False)
    y.setflags(write=False)
    if rule == "linear":
        fn = lambda t: np.interp(t, x, y)  # noqa: E731
    else:
        lx, ly = np.log(x), np.log(y)
        fn = lambda t: np.exp(np.interp(np.log(t), lx, ly))  # noqa: E731
    return ScalarFunction(
        fn=fn,
        domain_lo=float(x[0]),
        domain_hi=float(x[-1]),
        monotonicity=monotonicity,
        convexity=convexity,
        outside_value=outside_value,
        tag="table",
        table=(x, y),
        rule=rule,
    )


def inverse(h, outside_value=math.inf):
    """The inverse of an increasing function ``h``.

    Domain is the attained range of ``h``; arguments beyond it map to
    ``outside_value``.
    """
    lo = float(h(h.domain_lo))
    hi = float(h(h.domain_hi)) if not math.isinf(h.domain_hi) else math.inf
    if math.isnan(hi):
        hi = math.inf

    def fn(z):
        return _invert(h, z, DEFAULT_TOL, strict=False, fill=outside_value)

    return ScalarFunction(
        fn=fn,
        domain_lo=lo,
        domain_hi=hi,
        monotonicity=INCREASING,
        outside_value=outside_value,
        tag="inverse",
        params={"of": h.describe()},
        inverse_of=h,
    )


# -- operations ------------------------------------------------------------


def evaluate(f, x):
    """Evaluate ``f`` at ``x`` (scalar or array), honoring ``outside_value``."""
    x = np.asarray(x, dtype=float)
    inside = f.contains(x)
    if not np.all(inside):
        if f.outside_value is None:
            bad = x[~inside] if x.ndim else x
            raise DomainError(
                f"x={np.ravel(bad)[0]!r} outside [{f.domain_lo}, {f.domain_hi}]"
            )
        safe = np.where(inside, x, f.domain_lo)
        with np.errstate(all="ignore"):
            out = np.where(inside, f.fn(safe), f.outside_value)
        return _scalarize(np.asarray(out, dtype=float))
    with np.errstate(all="ignore"):
        return _scalarize(np.asarray(f.fn(x), dtype=float))


@dataclass(frozen=True)
class MonotoneReport:
    ok: bool
    direction: Optional[str]
    worst_violation: float
    location: Optional[float]


def check_monotone(f, n=1024, p_max=P_MAX):
    """Scan ``f`` for strict monotonicity.

    Tabulations are checked on their knots; other bodies on ``n`` points
    (log-spaced on long or infinite domains, truncated at ``p_max``).
    """
    if n < 2:
        raise DomainError("need at least two scan points")
    if f.is_table:
        x, y = f.table
    else:
        top = f.scan_limit if f.scan_limit is not None else p_max
        x = scan_grid(f.domain_lo, min(f.domain_hi, top), n, top)
        y = np.asarray(evaluate(f, x), dtype=float)
    with np.errstate(invalid="ignore"):
        d = np.diff(y)
    # an overflow plateau (inf, inf) is not a monotonicity violation
    d = np.where(np.isinf(y[1:]) & (y[1:] == y[:-1]), np.sign(y[1:]), d)
    direction = f.monotonicity
    if direction is None:
        finite = d[np.isfinite(d)]
        direction = INCREASING if finite.sum() >= 0 else DECREASING
    signed = d if direction == INCREASING else -d
    bad = ~(signed > 0)
    if not bad.any():
        return MonotoneReport(True, direction, 0.0, None)
    with np.errstate(invalid="ignore"):
        worst = float(np.nanmax(np.where(bad, -signed, -np.inf)))
    if math.isnan(worst) or math.isinf(worst):
        worst = math.inf
    worst = max(worst, 0.0)
    first = int(np.argmax(bad))
    return MonotoneReport(False, direction, worst, float(x[first]))


def _verified_direction(f):
    report = _MONOTONE_CACHE.get(f)
    if report is None:
        report = _MONOTONE_CACHE[f] = check_monotone(f)
    if not report.ok:
        raise NotMonotone(
            f"{f.describe()} is not strictly {report.direction}: worst step "
            f"{report.worst_violation:.3g} near x={report.location:.6g}",
            report=report,
        )
    return report.direction


def _table_inverse(f, z, strict, fill):
    x, y = f.table
    mono = check_monotone(f)
    if not mono.ok:
        raise NotMonotone(f"tabulation is not strictly monotone near x={mono.location}")
    if mono.direction == DECREASING:
        x, y = x[::-1], y[::-1]
    z = np.asarray(z, dtype=float)
    ok = (z >= y[0]) & (z <= y[-1])
    if strict and not np.all(ok):
        raise OutOfRange(
            f"value outside attained range [{y[0]:.6g}, {y[-1]:.6g}]",
            attained=(float(y[0]), float(y[-1])),
        )
    zc = np.clip(z, y[0], y[-1])
    if f.rule == "loglog":
        with np.errstate(divide="ignore"):
            out = np.exp(np.interp(np.log(zc), np.log(y), np.log(x)))
    else:
        out = np.interp(zc, y, x)
    return np.where(ok, out, fill)


def _invert(f, z, tol, strict=True, fill=np.nan):
    if f.is_table:
        return _scalarize(_table_inverse(f, z, strict, fill))
    z = np.asarray(z, dtype=float)
    sign = 1.0 if _verified_direction(f) == INCREASING else -1.0
    lo = f.domain_lo
    f_lo = float(evaluate(f, lo))
    if math.isinf(f.domain_hi):
        hi = max(lo + 1.0, 2.0 * abs(lo), 1.0)
        target = np.max(sign * z[np.isfinite(z)]) if np.any(np.isfinite(z)) else 0.0
        while sign * float(evaluate(f, hi)) < target and hi < 1e300:
            hi *= 4.0
    else:
        hi = f.domain_hi
    f_hi = float(evaluate(f, hi))
    if math.isnan(f_hi):
        f_hi = sign * math.inf
    zs = sign * z
    ok = (zs >= sign * f_lo) & (zs <= sign * f_hi)
    if not np.all(ok):
        if strict:
            rng = sorted((f_lo, f_hi))
            raise OutOfRange(
                f"value(s) outside attained range [{rng[0]:.6g}, {rng[1]:.6g}] "
                f"of {f.describe()}",
                attained=tuple(rng),
            )
    a = np.full(z.shape, lo, dtype=float)
    b = np.full(z.shape, hi, dtype=float)
    result = np.where(zs == sign * f_lo, lo, np.nan)
    result = np.where(zs == sign * f_hi, hi, result)
    done = ~ok | ~np.isnan(result)
    scale = tol * np.maximum(1.0, np.abs(z))
    for _ in range(2100):
        if done.all():
            break
        mid = 0.5 * (a + b)
        fm = np.asarray(evaluate(f, mid), dtype=float)
        hit = ~done & ((np.abs(fm - z) <= scale) | (mid == a) | (mid == b))
        result = np.where(hit, mid, result)
        done |= hit
        right = sign * (fm - z) < 0
        a = np.where(right, mid, a)
        b = np.where(right, b, mid)
    result = np.where(np.isnan(result) & ok, 0.5 * (a + b), result)
    return _scalarize(np.where(ok, result, fill))


def invert_monotone(f, z, tol=DEFAULT_TOL):
    """Solve ``f(x) = z`` for strictly monotone ``f``.

    Tabulations are inverted exactly through their interpolation rule;
    other bodies by bracketing bisection until
    ``|f(x) - z| <= tol * max(1, |z|)``. Infinite domains are bracketed by
    geometric expansion.

    Raises:
        NotMonotone: the monotonicity scan finds a violation.
        OutOfRange: some ``z`` lies outside the attained range.
    """
    return _invert(f, z, tol, strict=True)


def tabulate(f, grid, rule="linear"):
    """Tabulate ``f`` on ``grid``; shape tags are kept only if the table confirms them."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise DomainError("tabulation grid must be strictly increasing with >= 2 points")
    if not np.all(f.contains(grid)):
        raise DomainError("tabulation grid leaves the function's domain")
    y = np.asarray(evaluate(f, grid), dtype=float)
    d = np.diff(y)
    mono = None
    if f.monotonicity == INCREASING and np.all(d > 0):
        mono = INCREASING
    elif f.monotonicity == DECREASING and np.all(d < 0):
        mono = DECREASING
    conv = None
    if f.convexity is not None and grid.size >= 3:
        slopes = d / np.diff(grid)
        ds = np.diff(slopes)
        tol = 1e-12 * max(1.0, float(np.max(np.abs(slopes))))
        if f.convexity == CONVEX and np.all(ds >= -tol):
            conv = CONVEX
        elif f.convexity == CONCAVE and np.all(ds <= tol):
            conv = CONCAVE
    elif grid.size == 2:
        conv = f.convexity
    return from_table(grid, y, rule=rule, monotonicity=mono, convexity=conv)


# -- CSV -------------------------------------------------------------------


def fmt(v):
    return format(float(v), ".17g")


def write_header_csv(path, header_meta, columns, rows):
    """Write ``# k=v ...`` comment line (if any), a column header and rows.

    ``path = "-"`` writes to standard output.
    """
    with _open_out(path) as fh:
        if header_meta:
            fh.write("# " + " ".join(f"{k}={v}" for k, v in header_meta.items()) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


@contextlib.contextmanager
def _open_out(path):
    if str(path) == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def read_header_csv(path):
    """Return ``(meta, header, rows)`` from a file written by :func:`write_header_csv`."""
    meta = {}
    lines = Path(path).read_text().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            for item in line[1:].replace(",", " ").split():
                if "=" in item:
                    k, v = item.split("=", 1)
                    meta[k.strip()] = v.strip()
        elif line.strip():
            body.append(line)
    reader = list(csv.reader(body))
    if not reader:
        raise DomainError(f"{path}: no header row")
    return meta, reader[0], reader[1:]


def save_table(f, path, extra=None):
    if not f.is_table:
        raise DomainError("only tabulations can be saved; tabulate() first")
    meta = {
        "monotonicity": f.monotonicity or "unknown",
        "convexity": f.convexity or "unknown",
        "rule": f.rule,
    }
    meta.update(extra or {})
    x, y = f.table
    write_header_csv(path, meta, ["x", "value"], zip(x, y))


def load_table(path, rule=None):
    meta, header, rows = read_header_csv(path)
    if [h.strip() for h in header] != ["x", "value"]:
        raise DomainError(f"{path}: expected header 'x,value', got {header}")
    x = [float(r[0]) for r in rows]
    y = [float(r[1]) for r in rows]

    def tag(key):
        v = meta.get(key, "unknown")
        return None if v == "unknown" else v

    return from_table(
        x,
        y,
        rule=rule or meta.get("rule", "linear"),
        monotonicity=tag("monotonicity"),
        convexity=tag("convexity"),
    )


# -- spec strings ----------------------------------------------------------

_CATALOG = {
    "power": lambda p: power(p.pop("m"), c=p.pop("c", 1.0), **p),
    "grand": lambda p: grand(p.pop("beta"), p.pop("b"), **p),
    "affine": lambda p: affine(p.pop("c0", 0.0), p.pop("c1", 1.0), **p),
    "quadratic": lambda p: quadratic(p.pop("a", 1.0), p.pop("b", 0.0), p.pop("c", 0.0), **p),
    "exp": lambda p: exponential(p.pop("c", 1.0), p.pop("k", 1.0), **p),
    "exp_rational": lambda p: exp_rational(p.pop("k", 1.0), p.pop("s", 1.0), p.pop("c", 1.0), **p),
    "xlogx": lambda p: xlogx(p.pop("c", 1.0), **p),
}


def parse_spec(spec):
    """Build a function from ``tag:key=value,...``.

    Tags: ``power`` (m, c), ``grand`` (beta, b), ``affine`` (c0, c1),
    ``quadratic`` (a, b, c), ``exp`` (c, k), ``exp_rational`` (k, s, c),
    ``xlogx`` (c), ``scaled`` (C, inner=<spec>), ``csv:<path>``. Every
    closed form also accepts ``lo`` and ``hi`` for its domain.
    """
    head, _, rest = spec.partition(":")
    head = head.strip()
    if head == "csv":
        return load_table(rest)
    if head == "scaled":
        pre, sep, inner = rest.partition("inner=")
        if not sep:
            raise DomainError("scaled spec needs inner=<spec>")
        params = _parse_params(pre.rstrip(","))
        return scaled(parse_spec(inner), params["C"])
    if head not in _CATALOG:
        raise DomainError(f"unknown function tag {head!r}")
    try:
        return _CATALOG[head](_parse_params(rest))
    except KeyError as exc:
        raise DomainError(f"{head}: missing parameter {exc}") from None
    except TypeError as exc:
        raise DomainError(f"{head}: {exc}") from None


def _parse_params(text):
    params = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise DomainError(f"malformed parameter {item!r}")
        params[key.strip()] = float(value)
    return params
