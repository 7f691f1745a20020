"""Acceptance criteria, one test group per criterion.

Every clause prints a ``[criterion k] PASS|FAIL|XFAIL`` line and is collected
for the one-line-per-criterion summary at the end of the run. Clauses are
asserted at the stated tolerances; nothing is loosened to make a clause pass.
"""

import math

import numpy as np
import pytest

from acceptance_log import TITLES, record
from oracles import power_N, power_phi, sqrt_theta
from grandlebesgue.conjugate import biconjugate, brute_force_legendre, legendre
from grandlebesgue.eof import alpha_patch, eof_from_W, knot_report, theorem_a_check, WFunction
from grandlebesgue.errors import AllNonConvex, NotIncreasing
from grandlebesgue.gls_core import (
    DEFAULT_DELTAS,
    GeneratingFunction,
    compare_fundamental,
    fundamental_direct,
    orlicz_from_psi,
    parse_psi,
    theta,
)
from grandlebesgue.conjugate import relative_convexity_defect
from grandlebesgue.inverse_problem import (
    FundamentalFunction,
    choose_C,
    orlicz_from_fundamental,
    psi_from_fundamental,
)
from grandlebesgue.norms import (
    DiscreteMeasureSpace,
    SampledFunction,
    gls_norm,
    indicator,
    luxemburg_norm,
    orlicz_norm_amemiya,
)
from grandlebesgue.scalar_fn import (
    exp_rational,
    exponential,
    from_callable,
    grand,
    power,
    quadratic,
    xlogx,
)

TITLES.update({
    1: "indicator bridge",
    2: "forward point oracles",
    3: "theta vs phi equivalence",
    4: "inverse roundtrip",
    5: "Fenchel-Moreau and brute-force Legendre",
    6: "scaling law",
    7: "norm machinery",
    8: "infinite-measure equivalence and alpha patch",
    9: "error paths",
})

CATALOG = {
    "p": lambda: GeneratingFunction(power(1)),
    "sqrt(p)": lambda: GeneratingFunction(power(2)),
    "p^(1/4)": lambda: GeneratingFunction(power(4)),
    "1/(2-p)": lambda: GeneratingFunction(grand(1, 2), 1.0, 2.0),
}
M_OF = {1: "p", 2: "sqrt(p)", 4: "p^(1/4)"}


# -- 1 -------------------------------------------------------------------------


@pytest.fixture(scope="module")
def prob_space():
    return DiscreteMeasureSpace.uniform(10_000)


@pytest.mark.parametrize("name", list(CATALOG))
def test_c1_indicator_bridge(name, prob_space):
    psi = CATALOG[name]()
    worst = 0.0
    for delta in (0.9, 0.5, 0.1, 0.01):
        f = indicator(prob_space, delta)
        direct = fundamental_direct(psi, delta)
        worst = max(worst, abs(gls_norm(f, prob_space, psi) - direct) / direct)
    ok = record(1, f"psi={name}", worst <= 1e-6, f"max rel diff {worst:.3g} (tol 1e-6)")
    assert ok


# -- 2 -------------------------------------------------------------------------


def test_c2_point_oracles():
    psi = CATALOG["sqrt(p)"]()
    N = orlicz_from_psi(psi)
    cases = [
        ("N(1)", float(N(1.0)), 0.63212),
        ("N(4)", float(N(4.0)), 54.2303),
        ("theta(e^-4)", float(theta(psi, math.exp(-4), N)), 0.24979),
        ("phi_direct(e^-4)", float(fundamental_direct(psi, math.exp(-4))), 0.21444),
        ("theta(1)", float(theta(psi, 1.0, N)), 0.76146),
    ]
    all_ok = True
    for label, got, want in cases:
        rel = abs(got / want - 1)
        all_ok &= record(2, label, rel <= 1e-4, f"{got:.7g} vs {want} (rel {rel:.2g}, tol 1e-4)")
    assert all_ok


# -- 3 -------------------------------------------------------------------------

DELTA_GRID = np.geomspace(1e-8, 1.0, 200)


@pytest.mark.xfail(strict=True, raises=NotIncreasing,
                   reason="psi(p) = p has constant p/psi(p); criterion 9 requires this error")
def test_c3_psi_p_is_inapplicable():
    try:
        compare_fundamental(CATALOG["p"](), DELTA_GRID)
    except NotIncreasing:
        record(3, "m=1", False, "raises NotIncreasing (p/psi(p) constant)", expected_error=True)
        raise


@pytest.mark.parametrize("m", [2, 4])
def test_c3_ratio_range(m):
    rep = compare_fundamental(CATALOG[M_OF[m]](), DELTA_GRID)
    ok = bool(rep.valid.all()) and 1 / 3 <= rep.ratio_min and rep.ratio_max <= 3
    record(3, f"m={m} ratio range", ok,
           f"theta/phi in [{rep.ratio_min:.5f}, {rep.ratio_max:.5f}] (need [1/3, 3])")
    assert ok


@pytest.mark.parametrize("m", [2, 4])
def test_c3_log_ratio_at_smallest_delta(m):
    rep = compare_fundamental(CATALOG[M_OF[m]](), np.array([1e-8]))
    dev = abs(rep.log_ratio_at_smallest_key - 1)
    # the pipeline agrees with the closed-form phi, so the deviation is intrinsic
    phi_err = abs(rep.lhs[0] / float(power_phi(m, 1e-8)) - 1)
    ok = dev <= 0.05
    record(3, f"m={m} |log theta/log phi - 1| at 1e-8", ok,
           f"{dev:.4f} (tol 0.05; phi vs closed form rel err {phi_err:.2g})")
    assert ok


def test_c3_sqrt_ratio_at_e4():
    psi = CATALOG["sqrt(p)"]()
    d = math.exp(-4)
    r = float(theta(psi, d)) / float(fundamental_direct(psi, d))
    ok = abs(r - 1.1649) <= 1e-3
    record(3, "sqrt(p) ratio at e^-4", ok, f"{r:.6f} vs 1.1649 +- 1e-3")
    assert ok


# -- 4 -------------------------------------------------------------------------

TABLE_DELTAS = np.geomspace(1e-12, 1.0, 400)
P_GRID = np.geomspace(1.5, 20.0, 32)


@pytest.mark.xfail(strict=True, raises=NotIncreasing,
                   reason="psi(p) = p has no forward pipeline; criterion 9 requires this error")
def test_c4_psi_p_is_inapplicable():
    try:
        orlicz_from_psi(CATALOG["p"]())
    except NotIncreasing:
        record(4, "m=1", False, "raises NotIncreasing (no theta table)", expected_error=True)
        raise


@pytest.mark.parametrize("m", [2, 4])
def test_c4_roundtrip(m):
    psi = CATALOG[M_OF[m]]()
    N = orlicz_from_psi(psi)
    phi = FundamentalFunction.from_table(TABLE_DELTAS, theta(psi, TABLE_DELTAS, N))
    C = math.exp(N.notes["nu_star_at_0"])
    gen = psi_from_fundamental(phi, C=C, p_grid=P_GRID)
    err_psi = float(np.max(np.abs(gen(P_GRID) / psi(P_GRID) - 1)))
    lo, hi = phi.z_range
    z = np.geomspace(lo * (1 + 1e-9), hi * (1 - 1e-9), 200)
    err_N = float(np.max(np.abs(orlicz_from_fundamental(phi, z) / power_N(m, z) - 1)))
    ok_psi = record(4, f"m={m} psi recovery", err_psi <= 0.02,
                    f"max rel err {err_psi:.3g} on [1.5, 20] with C={C:.6g} (tol 0.02)")
    ok_N = record(4, f"m={m} N reproduction", err_N <= 1e-3,
                  f"max rel err {err_N:.3g} on z in [{lo:.3g}, {hi:.3g}] (tol 1e-3)")
    assert ok_psi and ok_N


# -- 5 -------------------------------------------------------------------------

CONVEX_CATALOG = {
    "x^2": (power(0.5), (1.5, 20.0)),
    "x^3": (power(1 / 3), (1.5, 20.0)),
    "quadratic": (quadratic(0.5, 1.0, 2.0), (0.5, 20.0)),
    "exp": (exponential(), (0.5, 10.0)),
    "exp(x)/x": (exp_rational(1.0, 1.0), (1.5, 10.0)),
    "x log x": (xlogx(), (1.5, 20.0)),
    "1/(2-x)": (grand(1, 2), (1.1, 1.9)),
}


@pytest.mark.parametrize("name", list(CONVEX_CATALOG))
def test_c5_fenchel_moreau(name):
    g, (a, b) = CONVEX_CATALOG[name]
    p = np.linspace(a, b, 25)
    err = float(np.max(np.abs(biconjugate(g, p).fn(p) / g(p) - 1)))
    ok = record(5, f"{name} biconjugate", err <= 1e-6, f"max rel err {err:.3g} (tol 1e-6)")
    # brute force on the interval that contains the maximizers
    hi = min(g.domain_hi - 1e-9, 50.0)
    worst = 0.0
    for t in (0.25, 0.5, 0.9):
        q = float((1 - t) * g.derivative(a) + t * g.derivative(b))
        fast = legendre(g, q)
        slow = brute_force_legendre(g, q, g.domain_lo, hi)
        worst = max(worst, abs(fast - slow) / max(1.0, abs(slow)))
    ok &= record(5, f"{name} brute force", worst <= 1e-9, f"max rel diff {worst:.3g} (tol 1e-9)")
    assert ok


# -- 6 -------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["sqrt(p)", "p^(1/4)", "1/(2-p)"])
def test_c6_scaling_law(name):
    psi = CATALOG[name]()
    base = fundamental_direct(psi, DEFAULT_DELTAS)
    worst = 0.0
    for C in (0.5, 2.0, 10.0):
        scaled = fundamental_direct(psi.scaled(C), DEFAULT_DELTAS)
        worst = max(worst, float(np.max(np.abs(scaled * C / base - 1))))
    ok = record(6, f"psi={name}", worst <= 1e-9, f"max rel err {worst:.3g} (tol 1e-9)")
    assert ok


# -- 7 -------------------------------------------------------------------------


@pytest.fixture(scope="module")
def norm_setup():
    rng = np.random.default_rng(20240607)
    mu = DiscreteMeasureSpace.uniform(200)
    suite = [SampledFunction(rng.lognormal(0, 1, 200) * rng.integers(0, 2, 200)) for _ in range(20)]
    psi = CATALOG["sqrt(p)"]()
    return mu, suite, psi, orlicz_from_psi(psi)


def test_c7_luxemburg_amemiya_sandwich(norm_setup):
    mu, suite, _, N = norm_setup
    lux = np.array([luxemburg_norm(f, mu, N) for f in suite])
    am = np.array([orlicz_norm_amemiya(f, mu, N) for f in suite])
    r = am / lux
    ok = bool(np.all(r >= 1 - 1e-12) and np.all(r <= 2 + 1e-12))
    record(7, "luxemburg <= amemiya <= 2 luxemburg", ok,
           f"amemiya/luxemburg in [{r.min():.6f}, {r.max():.6f}] over 20 functions")
    assert ok


def test_c7_norm_axioms(norm_setup):
    mu, suite, psi, N = norm_setup
    norms = {
        "gls": lambda f: gls_norm(f, mu, psi),
        "luxemburg": lambda f: luxemburg_norm(f, mu, N),
        "amemiya": lambda f: orlicz_norm_amemiya(f, mu, N),
    }
    all_ok = True
    for name, nrm in norms.items():
        hom = tri = 0.0
        for f, g in zip(suite[:5], suite[5:10]):
            nf = nrm(f)
            hom = max(hom, abs(nrm(SampledFunction(3.7 * f.values)) / (3.7 * nf) - 1))
            excess = nrm(SampledFunction(f.values + g.values)) - (nf + nrm(g))
            tri = max(tri, excess / (nf + nrm(g)))
        ok = hom <= 1e-9 and tri <= 1e-9
        all_ok &= record(7, f"{name} axioms", ok,
                         f"homogeneity rel err {hom:.3g}, triangle excess {tri:.3g} (tol 1e-9)")
    assert all_ok


def test_c7_luxemburg_of_indicator(prob_space):
    psi = CATALOG["sqrt(p)"]()
    N = orlicz_from_psi(psi)
    worst = 0.0
    for delta in (0.5, 0.1, 0.01):
        lux = luxemburg_norm(indicator(prob_space, delta), prob_space, N)
        exact = float(sqrt_theta(delta))  # theta = 1/N^-1(1/delta)
        worst = max(worst, abs(lux / exact - 1))
    ok = record(7, "luxemburg of indicator", worst <= 1e-8,
                f"max rel err vs 1/N^-1(1/delta) {worst:.3g} (tol 1e-8)")
    assert ok


# -- 8 -------------------------------------------------------------------------

MASSES = (0.5, 1.0, 10.0)


def _theorem_a(m, total_mass, atoms):
    mu = DiscreteMeasureSpace.truncated_infinite(total_mass, atoms, breakpoints=MASSES)
    suite = [indicator(mu, d) for d in MASSES]
    return theorem_a_check(CATALOG[M_OF[m]](), 1.0, suite, mu)


@pytest.mark.parametrize("m", [1, 2])
def test_c8_theorem_a_ratios_and_drift(m):
    base = _theorem_a(m, 1e3, 10_000)
    double = _theorem_a(m, 2e3, 20_000)
    r0, r1 = base.norms.ratio, double.norms.ratio
    in_range = bool(base.norms.valid.all()) and 1 / 8 <= r0.min() and r0.max() <= 8
    drift = float(np.max(np.abs(r1 / r0 - 1)))
    ok = record(8, f"m={m} ratio range", in_range,
                f"orlicz/gls in [{r0.min():.5f}, {r0.max():.5f}] (need [1/8, 8])")
    ok &= record(8, f"m={m} drift under doubling", drift < 0.05,
                 f"max relative drift {drift:.3g} (tol 0.05)")
    assert ok


@pytest.mark.parametrize("m", [1, 2])
def test_c8_patch_checks(m):
    patch = _theorem_a(m, 1e3, 2_000).patch
    knots = knot_report(patch)
    value = max(knots["value_C2"], knots["value_C5"])
    u = np.linspace(0.0, 3 * patch.C5, 513)
    convex = relative_convexity_defect(patch.N.right, grid=u)
    small = max(abs(float(patch.N(t)) / t**patch.alpha / patch.C1 - 1) for t in (1e-3, 1e-4))
    ok = record(8, f"m={m} alpha=1 knot continuity", value <= 1e-8, f"{value:.3g} (tol 1e-8)")
    ok &= record(8, f"m={m} alpha=1 convexity", convex <= 1e-8,
                 f"relative defect {convex:.3g} (tol 1e-8)")
    ok &= record(8, f"m={m} alpha=1 small-u asymptotics", small <= 1e-9,
                 f"N(u)/(C1 u) - 1 = {small:.3g} at u = 1e-3, 1e-4")
    ok &= record(8, f"m={m} alpha=1 slope continuity at C5", knots["slope_C5"] <= 1e-6,
                 f"{knots['slope_C5']:.3g} (tol 1e-6)")
    ok &= record(8, f"m={m} alpha=1 slope continuity at C2", knots["slope_C2"] <= 1e-6,
                 f"{knots['slope_C2']:.3g} (tol 1e-6)")
    assert ok


def test_c8_patch_checks_alpha_above_one():
    W = WFunction(from_callable(lambda z: 2.0 * np.asarray(z, dtype=float), 2, math.inf,
                                deriv=lambda z: 2.0 + 0 * np.asarray(z, dtype=float)),
                  superlinear=False)
    patch = alpha_patch(eof_from_W(W), 3.0)
    knots = knot_report(patch)
    worst_value = max(knots["value_C2"], knots["value_C5"])
    worst_slope = max(knots["slope_C2"], knots["slope_C5"])
    small = max(abs(float(patch.N(t)) / t**3 / patch.C1 - 1) for t in (1e-3, 1e-4))
    ok = worst_value <= 1e-8 and worst_slope <= 1e-6 and small <= 1e-9
    record(8, "alpha=3 patch of u^2", ok,
           f"value {worst_value:.3g}, slope {worst_slope:.3g}, small-u {small:.3g}")
    assert ok


# -- 9 -------------------------------------------------------------------------


@pytest.mark.parametrize("spec", ["power:m=1", "grand:beta=1,b=2"])
def test_c9_not_increasing(spec):
    with pytest.raises(NotIncreasing) as err:
        orlicz_from_psi(parse_psi(spec))
    record(9, f"{spec} raises NotIncreasing", True, err.value.hypothesis)


def test_c9_identity_fundamental_all_nonconvex():
    d = np.geomspace(1e-12, 1.0, 400)
    phi = FundamentalFunction.from_table(d, d)
    with pytest.raises(AllNonConvex) as err:
        choose_C(phi)
    record(9, "phi(delta) = delta raises AllNonConvex", True, str(err.value))
