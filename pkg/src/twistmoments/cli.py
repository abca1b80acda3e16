"""Command-line driver.

Every subcommand writes deterministic CSV (or JSON) under --out; floats are
printed with %.17g so identical invocations produce byte-identical files.
Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical-convergence
failure.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import harness, predict, rmt
from .curves import builtin_database_path, load_curves
from .errors import ConvergenceError, DataError, PoleError
from .predict import PredictionConfig
from .theta import cache_load, cache_store

_FLOAT_FMT = "%.17g"


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _FLOAT_FMT % float(v)
    return str(v)


def _write_table(path: Path, header: list[str], rows, fmt: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        payload = [dict(zip(header, [None if v is None else (
            int(v) if isinstance(v, (int, np.integer)) else
            float(v) if isinstance(v, (float, np.floating)) else str(v))
            for v in row])) for row in rows]
        path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    else:
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        path.write_text("\n".join(lines) + "\n")
    click.echo(str(path))


def _write_meta(path: Path, meta: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(meta, indent=1, sort_keys=True, default=float) + "\n")
    click.echo(str(path))


def _curve(ctx):
    recs = load_curves(ctx.obj["curves"])
    name = ctx.obj["curve"]
    if name is None:
        raise click.UsageError("--curve NAME is required for this subcommand")
    for r in recs:
        if r.name == name:
            return r
    raise DataError(f"curve {name!r} not found in database")


def _table_path(ctx, curve) -> Path:
    return Path(ctx.obj["out"]) / f"{curve.name}_x{ctx.obj['xmax']}.coeffs"


def _load_table(ctx, curve):
    path = _table_path(ctx, curve)
    if not path.exists():
        raise DataError(f"coefficient cache {path} missing; run theta-build first")
    return cache_load(curve.name, ctx.obj["xmax"], path)


def _sweep(ctx, curve):
    return harness.sweep(curve, ctx.obj["xmax"], _load_table(ctx, curve))


def _config(ctx) -> PredictionConfig:
    return PredictionConfig(
        p_max=ctx.obj["pmax"], nodes=ctx.obj["nodes"], cache_dir=ctx.obj["out"]
    )


@click.group()
@click.option("--curves", type=click.Path(exists=True, dir_okay=False), default=None,
              help="curve database file (defaults to the bundled fixture)")
@click.option("--curve", default=None, help="curve name, e.g. 11A_i")
@click.option("--xmax", type=int, default=1_000_000, show_default=True,
              help="discriminant bound X")
@click.option("--pmax", type=int, default=10_000, show_default=True,
              help="Euler-product prime bound")
@click.option("--nodes", type=int, default=64, show_default=True,
              help="quadrature nodes per circle")
@click.option("--seed", type=int, default=1, show_default=True, help="RNG seed")
@click.option("--out", type=click.Path(file_okay=False), default="out", show_default=True,
              help="output directory")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
@click.pass_context
def cli(ctx, curves, curve, xmax, pmax, nodes, seed, out, fmt):
    """Quadratic-twist L-value statistics against random-matrix predictions."""
    ctx.obj = {
        "curves": curves or builtin_database_path(),
        "curve": curve,
        "xmax": xmax,
        "pmax": pmax,
        "nodes": nodes,
        "seed": seed,
        "out": out,
        "fmt": fmt,
    }
    Path(out).mkdir(parents=True, exist_ok=True)


@cli.command()
@click.pass_context
def ingest(ctx):
    """Validate the curve database and summarise each record.

    Columns: name, sign, conductor, modulus, kappa, n_forms, n_classes.
    """
    recs = load_curves(ctx.obj["curves"])
    rows = [
        (r.name, r.sign, r.conductor, r.modulus, r.kappa_str,
         len(r.half_form.forms), len(r.residue_classes))
        for r in recs
    ]
    _write_table(
        Path(ctx.obj["out"]) / "ingest.csv",
        ["name", "sign", "conductor", "modulus", "kappa", "n_forms", "n_classes"],
        rows, ctx.obj["fmt"],
    )


@cli.command("theta-build")
@click.pass_context
def theta_build(ctx):
    """Build the coefficient table c(n), n <= xmax, and cache it."""
    curve = _curve(ctx)
    table = curve.coefficient_table(ctx.obj["xmax"])
    path = _table_path(ctx, curve)
    path.parent.mkdir(parents=True, exist_ok=True)
    cache_store(table, path)
    click.echo(str(path))


@cli.command("sweep")
@click.pass_context
def sweep_cmd(ctx):
    """Sweep the family and write per-discriminant samples.

    Columns: d, abs_d, c, lvalue, unit_disc.
    """
    curve = _curve(ctx)
    res = _sweep(ctx, curve)
    absd = np.abs(res.d)
    unit = (absd == 3) | (absd == 4)
    rows = zip(res.d.tolist(), absd.tolist(), res.c.tolist(),
               res.lvalue.tolist(), unit.tolist())
    _write_table(
        Path(ctx.obj["out"]) / f"{curve.name}_sweep.csv",
        ["d", "abs_d", "c", "lvalue", "unit_disc"],
        rows, ctx.obj["fmt"],
    )


@cli.command("moments")
@click.option("--kmax", type=int, default=4, show_default=True)
@click.pass_context
def moments_cmd(ctx, kmax):
    """Empirical moments of the central values.

    Columns: k, samples, raw_sum, mean.
    """
    curve = _curve(ctx)
    res = _sweep(ctx, curve)
    rows = []
    for k in range(1, kmax + 1):
        raw = harness.raw_moment_sum(res, k)
        rows.append((k, res.sample_count, raw, raw / res.sample_count))
    _write_table(
        Path(ctx.obj["out"]) / f"{curve.name}_moments.csv",
        ["k", "samples", "raw_sum", "mean"],
        rows, ctx.obj["fmt"],
    )


@cli.command("histogram")
@click.option("--bins", type=int, default=200, show_default=True)
@click.option("--log-bins", is_flag=True, help="logarithmic bin edges")
@click.pass_context
def histogram_cmd(ctx, bins, log_bins):
    """Value-distribution histogram of the nonzero central values.

    Columns: bin_left, bin_right, count, density; zero counts, the
    small-value constant, and the fitted low-end slope go to the meta JSON.
    """
    curve = _curve(ctx)
    res = _sweep(ctx, curve)
    hist = harness.value_histogram(res, bins=bins, log_bins=log_bins)
    rows = zip(hist.edges[:-1].tolist(), hist.edges[1:].tolist(),
               hist.counts.tolist(), hist.density.tolist())
    base = Path(ctx.obj["out"]) / f"{curve.name}_histogram"
    _write_table(base.with_suffix(".csv"),
                 ["bin_left", "bin_right", "count", "density"],
                 rows, ctx.obj["fmt"])
    slope = harness.small_value_slope(res)
    _write_meta(base.with_name(base.name + "_meta.json"), {
        "curve": curve.name, "bins": bins, "log_bins": bool(log_bins),
        "zero_count": hist.zero_count, "total_count": hist.total_count,
        "small_value_constant": predict.small_value_constant(
            curve, p_max=ctx.obj["pmax"], cache_dir=ctx.obj["out"]),
        "small_value_slope": slope,
    })


@cli.command("clt")
@click.option("--bins", type=int, default=80, show_default=True,
              help="bins for the transformed-sample histogram output")
@click.pass_context
def clt_cmd(ctx, bins):
    """Central-limit transform of log L and its distances to the models.

    Sample file column: t.  Histogram columns: bin_left, bin_right, count,
    density.  KS distances (Gaussian and the N=20 model) go to the meta JSON.
    """
    curve = _curve(ctx)
    res = _sweep(ctx, curve)
    t = harness.clt_transform(res)
    base = Path(ctx.obj["out"]) / f"{curve.name}_clt"
    _write_table(base.with_suffix(".csv"), ["t"], ((v,) for v in t.tolist()),
                 ctx.obj["fmt"])
    counts, edges = np.histogram(t, bins=bins)
    dens = counts / (len(t) * np.diff(edges))
    _write_table(base.with_name(base.name + "_hist.csv"),
                 ["bin_left", "bin_right", "count", "density"],
                 zip(edges[:-1].tolist(), edges[1:].tolist(),
                     counts.tolist(), dens.tolist()),
                 ctx.obj["fmt"])
    grid = np.linspace(t.min() - 0.5, t.max() + 0.5, 2001)
    model = rmt.clt_cdf(20, grid)
    _write_meta(base.with_name(base.name + "_meta.json"), {
        "curve": curve.name, "samples": int(len(t)),
        "zero_excluded": res.vanishing_count,
        "ks_gaussian": harness.ks_to_gaussian(t),
        "ks_rmt_n20": harness.ks_to_grid_cdf(t, grid, model),
    })


@cli.command("dist")
@click.pass_context
def dist_cmd(ctx):
    """Full value-distribution transform and its lognormal distance.

    Column: t; the lognormal KS distance goes to the meta JSON.
    """
    curve = _curve(ctx)
    res = _sweep(ctx, curve)
    t = harness.distribution_transform(res)
    base = Path(ctx.obj["out"]) / f"{curve.name}_dist"
    _write_table(base.with_suffix(".csv"), ["t"], ((v,) for v in t.tolist()),
                 ctx.obj["fmt"])
    _write_meta(base.with_name(base.name + "_meta.json"), {
        "curve": curve.name, "samples": int(len(t)),
        "ks_lognormal": harness.ks_to_lognormal(t),
    })


@cli.command("vanish")
@click.option("--x-step", type=int, default=None, help="grid step (default X/10)")
@click.option("--all-d", is_flag=True, help="count all d, not only prime |d|")
@click.pass_context
def vanish_cmd(ctx, x_step, all_d):
    """Vanishing counts and the normalised flat-curve diagnostic.

    Columns: X, total, vanishing, fraction, normalized; end slope, the
    no-vanishing flag, and torsion metadata go to the meta JSON.
    """
    curve = _curve(ctx)
    res = _sweep(ctx, curve)
    rep = harness.vanishing_report(
        res, curve, prime_only=not all_d, x_step=x_step,
        p_max=ctx.obj["pmax"], cache_dir=ctx.obj["out"],
    )
    rows = zip(rep.grid.tolist(), rep.totals.tolist(), rep.vanishing.tolist(),
               rep.fraction.tolist(), rep.normalized.tolist())
    base = Path(ctx.obj["out"]) / f"{curve.name}_vanish"
    _write_table(base.with_suffix(".csv"),
                 ["X", "total", "vanishing", "fraction", "normalized"],
                 rows, ctx.obj["fmt"])
    _write_meta(base.with_name(base.name + "_meta.json"), {
        "curve": curve.name, "prime_only": rep.prime_only,
        "slope": rep.slope, "no_vanishing": rep.no_vanishing,
        "unit_disc_count": rep.unit_disc_count,
        "torsion_order": curve.torsion_order,
    })


@cli.command("rq")
@click.option("--qmax", type=int, default=100, show_default=True)
@click.pass_context
def rq_cmd(ctx, qmax):
    """Empirical vanishing-ratio splits R_q against both predictions.

    Columns: q, a_q, n_plus, n_minus, r_empirical, r_main, r_refined,
    delta_main, delta_refined (ratio cells empty when no chi = -1
    vanishings exist).
    """
    curve = _curve(ctx)
    res = _sweep(ctx, curve)
    rows = [
        (r.q, r.a_q, r.n_plus, r.n_minus, r.r_empirical, r.r_main,
         r.r_refined, r.delta_main, r.delta_refined)
        for r in harness.rq_report(res, curve, q_max=qmax,
                                   p_max=ctx.obj["pmax"], cache_dir=ctx.obj["out"])
    ]
    _write_table(
        Path(ctx.obj["out"]) / f"{curve.name}_rq.csv",
        ["q", "a_q", "n_plus", "n_minus", "r_empirical", "r_main",
         "r_refined", "delta_main", "delta_refined"],
        rows, ctx.obj["fmt"],
    )


@cli.command("rmt-moments")
@click.option("--nmax", type=int, default=10, show_default=True, help="largest N")
@click.option("--kmax", type=int, default=2, show_default=True)
@click.option("--mc-samples", type=int, default=0, show_default=True,
              help="Monte Carlo draws per N (0 disables)")
@click.pass_context
def rmt_moments_cmd(ctx, nmax, kmax, mc_samples):
    """Moments of |det(I-A)| by product, polynomial, contour, and optional MC.

    Columns: N, k, product, polynomial, contour, mc_mean, mc_stderr (the MC
    cells are empty unless --mc-samples > 0).
    """
    quad = rmt.QuadratureSpec(nodes=ctx.obj["nodes"])
    rows = []
    for n_dim in range(1, nmax + 1):
        draws = (
            rmt.haar_sample_sodd(n_dim, mc_samples, seed=ctx.obj["seed"] + n_dim)
            if mc_samples > 0 else None
        )
        for k in range(1, kmax + 1):
            prod = rmt.mo_product(n_dim, float(k)).real
            poly = float(rmt.mo_polynomial(n_dim, k))
            cont = rmt.mo_contour(n_dim, k, quad)
            if draws is not None:
                vals = draws ** k
                mc = float(vals.mean())
                se = float(vals.std(ddof=1) / math.sqrt(len(vals)))
            else:
                mc = se = None
            rows.append((n_dim, k, prod, poly, cont, mc, se))
    _write_table(
        Path(ctx.obj["out"]) / "rmt_moments.csv",
        ["N", "k", "product", "polynomial", "contour", "mc_mean", "mc_stderr"],
        rows, ctx.obj["fmt"],
    )


@cli.command("rmt-density")
@click.option("--n-dim", "n_dim", type=int, default=20, show_default=True)
@click.option("--mode", type=click.Choice(["density", "clt", "gauss"]),
              default="density", show_default=True)
@click.option("--tmin", type=float, default=None)
@click.option("--tmax", type=float, default=None)
@click.option("--points", type=int, default=400, show_default=True)
@click.pass_context
def rmt_density_cmd(ctx, n_dim, mode, tmin, tmax, points):
    """Tabulate a model density: SO(2N) value density, its CLT rescaling,
    or the standard Gaussian (overlay reference for figure rendering)."""
    if mode == "density":
        lo = tmin if tmin is not None else 1e-4
        hi = tmax if tmax is not None else 16.0
        t = np.sqrt(np.linspace(lo ** 2, hi ** 2, points))
        dens = rmt.density_pn(n_dim, t)
        name = f"rmt_density_N{n_dim}.csv"
    elif mode == "clt":
        lo = tmin if tmin is not None else -6.0
        hi = tmax if tmax is not None else 6.0
        t = np.linspace(lo, hi, points)
        dens = rmt.clt_density(n_dim, t)
        name = f"rmt_clt_N{n_dim}.csv"
    else:
        lo = tmin if tmin is not None else -6.0
        hi = tmax if tmax is not None else 6.0
        t = np.linspace(lo, hi, points)
        dens = np.exp(-t * t / 2.0) / math.sqrt(2.0 * math.pi)
        name = "gaussian.csv"
    _write_table(
        Path(ctx.obj["out"]) / name,
        ["t", "density"],
        zip(t.tolist(), dens.tolist()),
        ctx.obj["fmt"],
    )


@cli.command("upsilon")
@click.option("--k", type=int, default=1, show_default=True)
@click.pass_context
def upsilon_cmd(ctx, k):
    """Moment polynomial by the k-fold residue; writes its JSON form
    (k, sign, coefficients leading-first, p_max, nodes)."""
    curve = _curve(ctx)
    poly = predict.upsilon(curve, None, k, _config(ctx))
    path = Path(ctx.obj["out"]) / f"{curve.name}_upsilon_k{k}.json"
    path.write_text(poly.dumps() + "\n")
    click.echo(str(path))


@cli.command("predict-compare")
@click.option("--kmax", type=int, default=2, show_default=True)
@click.pass_context
def predict_compare_cmd(ctx, kmax):
    """Empirical moment sums against the per-d moment-polynomial prediction.

    Columns: k, samples, empirical_sum, predicted_sum, ratio.
    """
    curve = _curve(ctx)
    res = _sweep(ctx, curve)
    cfg = _config(ctx)
    rows = []
    for k in range(1, kmax + 1):
        poly = predict.upsilon(curve, None, k, cfg)
        pred = predict.moment_prediction(
            curve, None, k, ctx.obj["xmax"], mode="per_d", poly=poly
        )
        emp = harness.raw_moment_sum(res, k)
        rows.append((k, res.sample_count, emp, pred, emp / pred))
    _write_table(
        Path(ctx.obj["out"]) / f"{curve.name}_predict_compare.csv",
        ["k", "samples", "empirical_sum", "predicted_sum", "ratio"],
        rows, ctx.obj["fmt"],
    )


def main(argv=None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.Abort:
        return 1
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, PoleError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
