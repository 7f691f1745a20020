"""Command-line front end.

Every subcommand writes CSV (``-o -`` for standard output). Exit status is 0
on success, 1 when a mathematical hypothesis fails (the message names it) and
2 on I/O errors. ``--config FILE`` supplies ``key=value`` defaults for any
option; flags given on the command line win.
"""

from __future__ import annotations

import functools
import sys

import click
import numpy as np

from .conjugate import conjugate_table
from .eof import knot_report, theorem_a_check
from .errors import GLSError
from .gls_core import GeneratingFunction, compare_fundamental, orlicz_from_psi, parse_psi, theta
from .inverse_problem import FundamentalFunction, psi_from_fundamental, save_recovered
from .norms import (
    PROBABILITY,
    TRUNCATED_INFINITE,
    DiscreteMeasureSpace,
    amemiya,
    gls_norm,
    indicator,
    load_sampled,
    lp_norm,
    luxemburg_norm,
)
from .scalar_fn import fmt, parse_spec, write_header_csv


def read_config(path):
    """Parse ``key=value`` lines (``#`` comments allowed); keys use ``_`` or ``-``."""
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise click.BadParameter(f"{path}:{n}: expected key=value")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def make_grid(lo, hi, n, spacing):
    if not (lo < hi and n >= 2):
        raise click.BadParameter(f"grid needs lo < hi and n >= 2 (got {lo}, {hi}, {n})")
    if spacing == "log":
        if lo <= 0:
            raise click.BadParameter("log spacing needs lo > 0")
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def guarded(fn):
    """Map package errors to exit 1 and I/O errors to exit 2."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except GLSError as exc:
            click.echo(f"error: hypothesis violated: {exc.hypothesis}", err=True)
            if str(exc):
                click.echo(f"  {exc}", err=True)
            sys.exit(1)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper


output_option = click.option("-o", "--output", default="-", show_default=True,
                             help="Output CSV path ('-' for stdout).")
spacing_option = click.option("--spacing", type=click.Choice(["log", "lin"]), default="log",
                              show_default=True)


@click.group()
@click.option("--config", "config_path", type=click.Path(dir_okay=False),
              help="key=value file with option defaults.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for randomized self-tests.")
@click.pass_context
def main(ctx, config_path, seed):
    """Grand Lebesgue space toolkit: fundamental functions, inversion, norms."""
    ctx.ensure_object(dict)
    ctx.obj["seed"] = seed
    if config_path:
        try:
            cfg = read_config(config_path)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        ctx.default_map = {name: dict(cfg) for name in main.commands}


@main.command()
@click.option("--psi", "psi_spec", required=True, help="Generating function, e.g. power:m=2.")
@click.option("--delta-lo", type=float, default=1e-8, show_default=True)
@click.option("--delta-hi", type=float, default=1.0, show_default=True)
@click.option("--n", type=int, default=200, show_default=True)
@spacing_option
@output_option
@guarded
def fundamental(psi_spec, delta_lo, delta_hi, n, spacing, output):
    """Tabulate the direct fundamental function against theta."""
    psi = parse_psi(psi_spec)
    report = compare_fundamental(psi, make_grid(delta_lo, delta_hi, n, spacing))
    report.to_csv(output)
    bad = int((~report.valid).sum())
    if bad:
        click.echo(f"warning: {bad} row(s) failed and are reported as nan", err=True)


@main.command()
@click.option("--phi", "phi_path", required=True, type=click.Path(dir_okay=False),
              help="CSV table (x,value) of the fundamental function.")
@click.option("--C", "c_value", default="auto", show_default=True,
              help="Constant in ln(C + N), or 'auto'.")
@click.option("--p-lo", type=float, default=1.5, show_default=True)
@click.option("--p-hi", type=float, default=20.0, show_default=True)
@click.option("--n", type=int, default=64, show_default=True)
@spacing_option
@output_option
@guarded
def invert(phi_path, c_value, p_lo, p_hi, n, spacing, output):
    """Recover the generating function from a tabulated fundamental function."""
    phi = FundamentalFunction.from_csv(phi_path)
    C = None if str(c_value).lower() == "auto" else float(c_value)
    gen = psi_from_fundamental(phi, C, make_grid(p_lo, p_hi, n, spacing))
    save_recovered(gen, output)


@main.command()
@click.option("--g", "g_spec", required=True, help="Function to conjugate, e.g. quadratic:a=0.5.")
@click.option("--q-lo", type=float, default=0.0, show_default=True)
@click.option("--q-hi", type=float, default=10.0, show_default=True)
@click.option("--n", type=int, default=101, show_default=True)
@click.option("--spacing", type=click.Choice(["log", "lin"]), default="lin", show_default=True)
@output_option
@guarded
def conjugate(g_spec, q_lo, q_hi, n, spacing, output):
    """Tabulate the Young-Fenchel transform with its maximizer."""
    conjugate_table(parse_spec(g_spec), make_grid(q_lo, q_hi, n, spacing)).to_csv(output)


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path(dir_okay=False),
              help="CSV with columns weight,value.")
@click.option("--kind", type=click.Choice([PROBABILITY, TRUNCATED_INFINITE]),
              default=PROBABILITY, show_default=True)
@click.option("--psi", "psi_spec", default=None, help="Generating function for GLS/Orlicz norms.")
@click.option("--p", "ps", type=float, multiple=True, help="Exponent for an L_p norm (repeatable).")
@output_option
@guarded
def norm(data_path, kind, psi_spec, ps, output):
    """Norms of a sampled function: L_p, GLS, Luxemburg and Amemiya."""
    mu, f = load_sampled(data_path, kind)
    rows = [(f"lp[{fmt(p)}]", lp_norm(f, mu, p)) for p in ps]
    if psi_spec:
        psi = parse_psi(psi_spec)
        rows.append(("gls", gls_norm(f, mu, psi)))
        if kind == PROBABILITY:
            N = orlicz_from_psi(psi)
            rows.append(("luxemburg", luxemburg_norm(f, mu, N)))
            rows.append(("amemiya", amemiya(f, mu, N)[0]))
    write_header_csv(output, {"kind": kind, "total_mass": fmt(mu.total_mass)},
                     ["norm", "value"], rows)


@main.command()
@click.option("--psi", "psi_spec", required=True)
@click.option("--delta-lo", type=float, default=1e-12, show_default=True)
@click.option("--delta-hi", type=float, default=1.0, show_default=True)
@click.option("--n", type=int, default=400, show_default=True)
@click.option("--C", "c_value", default="forward", show_default=True,
              help="'forward' (exp(nu*(0)) of the source psi), 'auto', or a number.")
@click.option("--p-lo", type=float, default=1.5, show_default=True)
@click.option("--p-hi", type=float, default=20.0, show_default=True)
@click.option("--p-n", type=int, default=32, show_default=True)
@output_option
@guarded
def roundtrip(psi_spec, delta_lo, delta_hi, n, c_value, p_lo, p_hi, p_n, output):
    """psi -> theta table -> recovered psi, with relative errors."""
    psi = parse_psi(psi_spec)
    deltas = make_grid(delta_lo, delta_hi, n, "log")
    N = orlicz_from_psi(psi)
    phi = FundamentalFunction.from_table(deltas, theta(psi, deltas, N))
    choice = str(c_value).lower()
    if choice == "forward":
        C = float(np.exp(N.notes["nu_star_at_0"]))
    else:
        C = None if choice == "auto" else float(c_value)
    p = make_grid(p_lo, p_hi, p_n, "log")
    gen = psi_from_fundamental(phi, C, p)
    truth = np.asarray(psi(p), dtype=float)
    est = np.asarray(gen(p), dtype=float)
    err = np.abs(est / truth - 1.0)
    meta = {"C": fmt(gen.notes["C"]), "max_rel_err": fmt(err.max())}
    write_header_csv(output, meta, ["p", "psi", "psi_recovered", "rel_err"],
                     zip(p, truth, est, err))
    click.echo(f"max_rel_err={fmt(err.max())} C={fmt(gen.notes['C'])}", err=True)


@main.command()
@click.option("--psi", "psi_spec", required=True)
@click.option("--alpha", type=float, default=1.0, show_default=True)
@click.option("--total-mass", type=float, default=1e3, show_default=True)
@click.option("--atoms", type=int, default=10_000, show_default=True)
@click.option("--masses", default="0.5,1,10", show_default=True,
              help="Comma-separated indicator masses forming the suite.")
@output_option
@click.option("--fundamental-output", default=None,
              help="Optional CSV for the fundamental-function comparison.")
@guarded
def eof(psi_spec, alpha, total_mass, atoms, masses, output, fundamental_output):
    """Alpha-patched exponential Orlicz norm against the GLS norm (infinite measure)."""
    psi = parse_psi(psi_spec)
    gen = GeneratingFunction(psi.psi, alpha, psi.b)
    ms = [float(m) for m in masses.split(",") if m.strip()]
    mu = DiscreteMeasureSpace.truncated_infinite(total_mass, atoms, breakpoints=ms)
    check = theorem_a_check(gen, alpha, [indicator(mu, m) for m in ms], mu)
    check.norms.to_csv(output)
    if fundamental_output:
        check.fundamental.to_csv(fundamental_output)
    knots = knot_report(check.patch)
    click.echo(" ".join(f"{k}={fmt(v)}" for k, v in knots.items()), err=True)


@main.command()
@click.option("--seed", type=int, default=None, help="Overrides the group-level seed.")
@click.pass_context
@guarded
def selftest(ctx, seed):
    """Run a quick suite of invariant checks; exit 1 if any fails."""
    from .selfcheck import run_checks

    rng = np.random.default_rng(ctx.obj["seed"] if seed is None else seed)
    failed = 0
    for name, ok, detail in run_checks(rng):
        click.echo(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failed += not ok
    if failed:
        click.echo(f"{failed} check(s) failed", err=True)
        sys.exit(1)


if __name__ == "__main__":  # pragma: no cover
    main()
