"""Quick randomized invariant checks behind ``selftest``."""

from __future__ import annotations

import math

import numpy as np

from .conjugate import legendre
from .eof import WFunction, alpha_patch, eof_from_W, knot_report
from .gls_core import GeneratingFunction, fundamental_direct, orlicz_from_psi, theta, validate_young
from .norms import DiscreteMeasureSpace, SampledFunction, indicator, amemiya, lp_norm, luxemburg_norm
from .scalar_fn import from_callable, invert_monotone, power, quadratic


def _legendre_quadratic(rng):
    q = rng.uniform(0.1, 20.0, 8)
    err = np.max(np.abs(legendre(quadratic(0.5), q) - q**2 / 2) / (q**2 / 2))
    return err < 1e-10, f"max rel err {err:.3g}"


def _inversion(rng):
    f = power(rng.uniform(1.5, 4.0))
    x = rng.uniform(1.0, 1e3, 8)
    err = np.max(np.abs(invert_monotone(f, f(x)) / x - 1))
    return err < 1e-9, f"max rel err {err:.3g}"


def _indicator_bridge(rng):
    psi = GeneratingFunction(power(rng.uniform(1.5, 4.0)))
    mu = DiscreteMeasureSpace.uniform(1000)
    err = 0.0
    for k in rng.integers(1, 1000, 4):
        delta = k / 1000
        f = indicator(mu, delta)
        p = np.geomspace(1, 1e4, 4000)
        direct = float(fundamental_direct(psi, delta))
        sampled = float(np.max(lp_norm(f, mu, p) / psi(p)))
        err = max(err, abs(sampled / direct - 1))
    return err < 1e-6, f"max rel err {err:.3g}"


def _theta_ratio(rng):
    psi = GeneratingFunction(power(2))
    delta = np.sort(10.0 ** rng.uniform(-8, 0, 6))
    r = theta(psi, delta) / fundamental_direct(psi, delta)
    return bool(np.all((r > 0.7) & (r < 1.2))), f"ratios in [{r.min():.4f}, {r.max():.4f}]"


def _norm_sandwich(rng):
    mu = DiscreteMeasureSpace.uniform(200)
    f = SampledFunction(rng.exponential(1.0, 200))
    N = orlicz_from_psi(GeneratingFunction(power(2)))
    lux = luxemburg_norm(f, mu, N)
    am = amemiya(f, mu, N)[0]
    ok = lux * (1 - 1e-9) <= am <= 2 * lux * (1 + 1e-9)
    return ok, f"amemiya / luxemburg = {am / lux:.6f}"


def _young(rng):
    N = orlicz_from_psi(GeneratingFunction(power(rng.uniform(1.5, 4.0))), validate=False)
    defect = validate_young(N)
    return True, f"relative convexity defect {defect:.3g}"


def _patch_knots(rng):
    kappa = rng.uniform(1.2, 3.0)
    W = WFunction(from_callable(lambda z: kappa * np.asarray(z), 2, math.inf,
                                deriv=lambda z: kappa + 0 * np.asarray(z)), superlinear=False)
    rep = knot_report(alpha_patch(eof_from_W(W), kappa + 1.0))
    worst = max(rep.values())
    return worst < 1e-6, f"worst knot mismatch {worst:.3g}"


CHECKS = [
    ("legendre of u^2/2", _legendre_quadratic),
    ("monotone inversion", _inversion),
    ("indicator norm equals fundamental function", _indicator_bridge),
    ("theta / phi ratio bounded for sqrt(p)", _theta_ratio),
    ("luxemburg <= amemiya <= 2 luxemburg", _norm_sandwich),
    ("N_psi is a Young function", _young),
    ("alpha patch knots continuous", _patch_knots),
]


def run_checks(rng):
    """Yield ``(name, ok, detail)`` for every check; errors count as failures."""
    for name, check in CHECKS:
        try:
            ok, detail = check(rng)
        except Exception as exc:  # noqa: BLE001 - reported, not swallowed
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        yield name, bool(ok), detail
