"""Experiment runner: 1D benchmarks, density estimation, monotone OT,
sliced 2D benchmarks, property suites, timing, and plotting.

Configuration comes from flags plus an optional `key=value` config file
(flags win).  Exit codes: 2 invalid config, 3 training divergence,
4 I/O failure.  `ISL_LAB_THREADS` caps seed-replica parallelism.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import bernstein, metrics, plots, rank, slicing
from .distributions import (Density1D, Density2D, Gaussian2D, Normal,
                            parse_density)
from .nn import Generator
from .rng import STREAM_EVAL, STREAM_INIT, make_rng
from .training import (DivergenceError, TrainConfig, train_classical_isl,
                       train_dual_isl, train_monotone_ot,
                       train_sliced_dual_isl)

RESULTS_HEADER = "target,method,k,seed,metric,value"


# ------------------------------------------------------------- infrastructure


def _fail(code: int, kind: str, message: str):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    sys.exit(code)


def _guard(fn):
    """Map library errors onto the documented exit codes."""

    def wrapped(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DivergenceError as e:
            _fail(3, "divergence", str(e))
        except OSError as e:
            _fail(4, "io", str(e))
        except (ValueError, KeyError) as e:
            _fail(2, "config", str(e))

    wrapped.__name__ = fn.__name__
    wrapped.__doc__ = fn.__doc__
    return wrapped


def _merge_config(ctx: click.Context, config_path, kwargs: dict) -> dict:
    """Fill non-flag parameters from a key=value file; flags override."""
    if not config_path:
        return kwargs
    try:
        lines = Path(config_path).read_text().splitlines()
    except OSError as e:
        _fail(4, "io", str(e))
    for ln, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            _fail(2, "config", f"{config_path}:{ln}: expected key=value")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        val = val.strip()
        if key not in kwargs:
            _fail(2, "config", f"{config_path}:{ln}: unknown key {key!r}")
        src = ctx.get_parameter_source(key)
        if src is not None and src.name == "COMMANDLINE":
            continue
        cur = kwargs[key]
        try:
            if isinstance(cur, bool):
                kwargs[key] = val.lower() in ("1", "true", "yes")
            elif isinstance(cur, int):
                kwargs[key] = int(val)
            elif isinstance(cur, float):
                kwargs[key] = float(val)
            else:
                kwargs[key] = val
        except ValueError:
            _fail(2, "config", f"{config_path}:{ln}: bad value for {key!r}")
    return kwargs


def _parse_seeds(text: str) -> list:
    try:
        seeds = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ValueError(f"bad seeds list {text!r}")
    if not seeds:
        raise ValueError("empty seeds list")
    return seeds


def _replicas(fn, seeds):
    cap = int(os.environ.get("ISL_LAB_THREADS", "1"))
    if cap <= 1 or len(seeds) == 1:
        return [fn(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=cap) as pool:
        return list(pool.map(fn, seeds))


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_results(path, rows) -> None:
    with open(path, "w") as f:
        f.write(RESULTS_HEADER + "\n")
        for target, method, k, seed, metric, value in rows:
            f.write(f"{target},{method},{k},{seed},{metric},{float(value)!r}\n")


def default_generator_1d(seed: int) -> Generator:
    return Generator.init((1, 7, 13, 7, 1), make_rng(seed, STREAM_INIT), "elu")


def default_generator_2d(seed: int) -> Generator:
    return Generator.init((2, 32, 32, 32, 2), make_rng(seed, STREAM_INIT), "elu")


def default_generator_ot(seed: int) -> Generator:
    return Generator.init((1, 16, 16, 32, 32, 16, 1), make_rng(seed, STREAM_INIT), "elu")


def _generator_samples(gen: Generator, n: int, seed: int) -> np.ndarray:
    z = make_rng(seed, STREAM_EVAL).standard_normal((n, gen.latent_dim))
    return gen.forward_numpy(z)


# ------------------------------------------------------------------ commands


@click.group()
def main():
    """Rank-based training of implicit generative models."""


_common = [
    click.option("--config", "config_path", type=click.Path(), default=None,
                 help="key=value config file; flags override"),
    click.option("--out", "out_dir", type=click.Path(), default="results",
                 help="output directory"),
    click.option("--k", default=10, show_default=True),
    click.option("--epochs", default=1000, show_default=True),
    click.option("--batch", "batch_size", default=1000, show_default=True),
    click.option("--lr", "learning_rate", default=1e-2, show_default=True),
    click.option("--seeds", default="1,2,3", show_default=True),
    click.option("--eval-samples", default=10_000, show_default=True),
    click.option("--anneal", default=5.0, show_default=True,
                 help="surrogate temperature start multiplier (linear anneal to 1)"),
    click.option("--lr-decay", default=1.0, show_default=True,
                 help="final lr as a fraction of --lr (linear decay)"),
]


def common_options(fn):
    for opt in reversed(_common):
        fn = opt(fn)
    return fn


def _train_cfg(kw: dict, seed: int, **extra) -> TrainConfig:
    return TrainConfig(k=kw["k"], epochs=kw["epochs"], batch_size=kw["batch_size"],
                       learning_rate=kw["learning_rate"], seed=seed,
                       temperature_anneal=kw["anneal"], lr_decay=kw["lr_decay"],
                       **extra)


@main.command()
@common_options
@click.option("--target", default="normal(4,2)", show_default=True)
@click.option("--methods", default="dual", show_default=True,
              help="comma list from {dual, classical}")
@click.pass_context
@_guard
def bench1d(ctx, config_path, out_dir, k, epochs, batch_size, learning_rate,
            seeds, eval_samples, anneal, lr_decay, target, methods):
    """1D benchmark: train on an analytic target, report per-seed KSD."""
    kw = _merge_config(ctx, config_path, dict(
        out_dir=out_dir, k=k, epochs=epochs, batch_size=batch_size,
        learning_rate=learning_rate, seeds=seeds, eval_samples=eval_samples, anneal=anneal, lr_decay=lr_decay,
        target=target, methods=methods))
    out = _outdir(kw["out_dir"])
    density = parse_density(kw["target"])
    if not isinstance(density, Density1D):
        raise ValueError("bench1d needs a 1D target")
    method_list = [m.strip() for m in kw["methods"].split(",") if m.strip()]
    trainers = {"dual": train_dual_isl, "classical": train_classical_isl}
    rows = []
    for method in method_list:
        if method not in trainers:
            raise ValueError(f"unknown method {method!r}")

        def run(seed, method=method):
            cfg = _train_cfg(kw, seed, orientation=method)
            gen, report = trainers[method](default_generator_1d(seed), density, cfg)
            fake = _generator_samples(gen, kw["eval_samples"], seed).ravel()
            real = density.sample(kw["eval_samples"], make_rng(seed, STREAM_EVAL + 100))
            ksd = metrics.ks_distance(real, fake)
            report.write_trace(out / f"trace_{method}_seed{seed}.csv")
            gen.save(out / f"checkpoint_{method}_seed{seed}.json")
            return seed, ksd

        for seed, ksd in _replicas(run, _parse_seeds(kw["seeds"])):
            rows.append((kw["target"], method, kw["k"], seed, "ksd", ksd))
    _write_results(out / "results.csv", rows)
    for row in rows:
        click.echo(f"{row[1]} seed={row[3]} ksd={row[5]:.4f}")


@main.command()
@common_options
@click.option("--target", default="cauchy(1,2)", show_default=True)
@click.option("--delta", default=0.1, show_default=True)
@click.option("--mc-samples", default=100_000, show_default=True)
@click.pass_context
@_guard
def density1d(ctx, config_path, out_dir, k, epochs, batch_size, learning_rate,
              seeds, eval_samples, anneal, lr_decay, target, delta, mc_samples):
    """Train dual ISL, then estimate the target density from the generator."""
    kw = _merge_config(ctx, config_path, dict(
        out_dir=out_dir, k=k, epochs=epochs, batch_size=batch_size,
        learning_rate=learning_rate, seeds=seeds, eval_samples=eval_samples, anneal=anneal, lr_decay=lr_decay,
        target=target, delta=delta, mc_samples=mc_samples))
    out = _outdir(kw["out_dir"])
    density = parse_density(kw["target"])
    if not isinstance(density, Density1D):
        raise ValueError("density1d needs a 1D target")
    rows = []

    def run(seed):
        cfg = _train_cfg(kw, seed)
        gen, _ = train_dual_isl(default_generator_1d(seed), density, cfg)
        ref = _generator_samples(gen, kw["mc_samples"], seed).ravel()
        real = density.sample(kw["mc_samples"], make_rng(seed, STREAM_EVAL + 100))
        pmf = bernstein.expected_pmf(real, ref, kw["k"])
        xs = np.asarray(density.inverse_cdf(np.linspace(1e-4, 1.0 - 1e-4, 2001)))
        phat = bernstein.density_estimate(pmf, ref, kw["delta"], xs, clamp=False)
        ks = estimated_density_ks(xs, phat, density)
        with open(out / f"density_seed{seed}.csv", "w") as f:
            f.write("x,p_hat,p_true\n")
            for x, ph, pt in zip(xs, np.maximum(phat, 0.0), density.pdf(xs)):
                f.write(f"{float(x)!r},{float(ph)!r},{float(pt)!r}\n")
        return seed, ks

    for seed, ks in _replicas(run, _parse_seeds(kw["seeds"])):
        rows.append((kw["target"], "dual-density", kw["k"], seed, "ks", ks))
    _write_results(out / "results.csv", rows)
    for row in rows:
        click.echo(f"seed={row[3]} ks={row[5]:.4f}")


def estimated_density_ks(xs: np.ndarray, phat: np.ndarray, density: Density1D) -> float:
    """KS distance between the cdf of a gridded density estimate and the
    analytic cdf, anchored at the grid's left edge."""
    dx = np.diff(xs)
    cdf_hat = density.cdf(xs[0]) + np.concatenate(
        [[0.0], np.cumsum(0.5 * (phat[1:] + phat[:-1]) * dx)])
    return float(np.max(np.abs(cdf_hat - density.cdf(xs))))


@main.command()
@common_options
@click.option("--target", default="dualmoon", show_default=True)
@click.option("--projections", "-L", "projections", default=10, show_default=True)
@click.option("--delta", default=0.1, show_default=True)
@click.option("--grid", default=60, show_default=True)
@click.pass_context
@_guard
def density2d(ctx, config_path, out_dir, k, epochs, batch_size, learning_rate,
              seeds, eval_samples, anneal, lr_decay, target, projections, delta, grid):
    """Sliced 2D density estimation on a synthetic target."""
    kw = _merge_config(ctx, config_path, dict(
        out_dir=out_dir, k=k, epochs=epochs, batch_size=batch_size,
        learning_rate=learning_rate, seeds=seeds, eval_samples=eval_samples, anneal=anneal, lr_decay=lr_decay,
        target=target, projections=projections, delta=delta, grid=grid))
    out = _outdir(kw["out_dir"])
    density = parse_density(kw["target"])
    if not isinstance(density, Density2D):
        raise ValueError("density2d needs a 2D target")

    def run(seed):
        cfg = _train_cfg(kw, seed, projections=kw["projections"])
        gen, _ = train_sliced_dual_isl(default_generator_2d(seed), density, cfg)
        ref = _generator_samples(gen, kw["eval_samples"], seed)
        real = density.sample(kw["eval_samples"], make_rng(seed, STREAM_EVAL + 100))
        pset = slicing.ProjectionSet.sample(2, kw["projections"], seed)
        pmf_rng = make_rng(seed, STREAM_EVAL + 200)
        pmfs = [rank.empirical_pmf(slicing.project(real, s), slicing.project(ref, s),
                                   kw["k"], pmf_rng)
                for s in pset.directions]
        ests = slicing.make_slice_estimators(pmfs, ref, pset.directions, kw["delta"])
        lo = np.percentile(real, 1, axis=0)
        hi = np.percentile(real, 99, axis=0)
        xs = np.linspace(lo[0], hi[0], kw["grid"])
        ys = np.linspace(lo[1], hi[1], kw["grid"])
        with open(out / f"field_seed{seed}.csv", "w") as f:
            f.write("x,y,p_hat\n")
            for y in ys:
                for x in xs:
                    ph = slicing.sliced_density_estimate(np.array([x, y]), ests,
                                                         pset.directions)
                    f.write(f"{float(x)!r},{float(y)!r},{float(ph)!r}\n")
        return seed

    for seed in _replicas(run, _parse_seeds(kw["seeds"])):
        click.echo(f"seed={seed} field written")


@main.command()
@common_options
@click.option("--target", default="normal(4,2)", show_default=True)
@click.option("--lam", default=1.0, show_default=True, help="monotonicity weight")
@click.pass_context
@_guard
def ot(ctx, config_path, out_dir, k, epochs, batch_size, learning_rate,
       seeds, eval_samples, anneal, lr_decay, target, lam):
    """Monotone OT: dual ISL plus the monotonicity penalty."""
    kw = _merge_config(ctx, config_path, dict(
        out_dir=out_dir, k=k, epochs=epochs, batch_size=batch_size,
        learning_rate=learning_rate, seeds=seeds, eval_samples=eval_samples, anneal=anneal, lr_decay=lr_decay,
        target=target, lam=lam))
    out = _outdir(kw["out_dir"])
    density = parse_density(kw["target"])
    if not isinstance(density, Density1D):
        raise ValueError("ot needs a 1D target")
    rows = []

    def run(seed):
        cfg = _train_cfg(kw, seed, monotonicity_lambda=kw["lam"])
        gen, _ = train_monotone_ot(default_generator_ot(seed), density, cfg)
        fake = _generator_samples(gen, kw["eval_samples"], seed).ravel()
        real = density.sample(kw["eval_samples"], make_rng(seed, STREAM_EVAL + 100))
        ksd = metrics.ks_distance(real, fake)
        accdf = metrics.accdf_error(np.sort(real), np.sort(fake))
        zs = np.linspace(-3, 3, 601)
        fz = gen.forward_numpy(zs[:, None]).ravel()
        with open(out / f"map_seed{seed}.csv", "w") as f:
            f.write("z,f\n")
            for z, v in zip(zs, fz):
                f.write(f"{float(z)!r},{float(v)!r}\n")
        gen.save(out / f"checkpoint_ot_seed{seed}.json")
        return seed, ksd, accdf

    for seed, ksd, accdf in _replicas(run, _parse_seeds(kw["seeds"])):
        rows.append((kw["target"], "monotone-ot", kw["k"], seed, "ksd", ksd))
        rows.append((kw["target"], "monotone-ot", kw["k"], seed, "accdf", accdf))
    _write_results(out / "results.csv", rows)
    for row in rows:
        click.echo(f"seed={row[3]} {row[4]}={row[5]:.4f}")


@main.command()
@common_options
@click.option("--target", default="dualmoon", show_default=True)
@click.option("--projections", "-L", "projections", default=10, show_default=True)
@click.option("--bins", default=50, show_default=True)
@click.pass_context
@_guard
def bench2d(ctx, config_path, out_dir, k, epochs, batch_size, learning_rate,
            seeds, eval_samples, anneal, lr_decay, target, projections, bins):
    """2D benchmark: sliced dual ISL, grid-KL against the target."""
    kw = _merge_config(ctx, config_path, dict(
        out_dir=out_dir, k=k, epochs=epochs, batch_size=batch_size,
        learning_rate=learning_rate, seeds=seeds, eval_samples=eval_samples, anneal=anneal, lr_decay=lr_decay,
        target=target, projections=projections, bins=bins))
    out = _outdir(kw["out_dir"])
    density = parse_density(kw["target"])
    if not isinstance(density, Density2D):
        raise ValueError("bench2d needs a 2D target")
    rows = []

    def run(seed):
        cfg = _train_cfg(kw, seed, projections=kw["projections"])
        gen, report = train_sliced_dual_isl(default_generator_2d(seed), density, cfg)
        fake = _generator_samples(gen, kw["eval_samples"], seed)
        real = density.sample(kw["eval_samples"], make_rng(seed, STREAM_EVAL + 100))
        kl = metrics.grid_kl(real, fake, bins=kw["bins"])
        report.write_trace(out / f"trace_sliced_seed{seed}.csv")
        gen.save(out / f"checkpoint_sliced_seed{seed}.json")
        return seed, kl

    for seed, kl in _replicas(run, _parse_seeds(kw["seeds"])):
        rows.append((kw["target"], "sliced-dual", kw["k"], seed, "grid_kl", kl))
    _write_results(out / "results.csv", rows)
    for row in rows:
        click.echo(f"seed={row[3]} grid_kl={row[5]:.4f}")


@main.command()
@_guard
def props():
    """Fast numeric property battery; exits 0 iff everything holds."""
    failures = []

    def check(name, ok):
        click.echo(f"{'PASS' if ok else 'FAIL'} {name}")
        if not ok:
            failures.append(name)

    rng = make_rng(7, STREAM_EVAL)
    ts = rng.random(200)
    for k in (1, 5, 10, 15):
        b = bernstein.bernstein_vector(k, ts)
        check(f"partition of unity K={k}", np.max(np.abs(b.sum(axis=1) - 1)) < 1e-12)
        basis = bernstein.DualBasis.build(k)
        check(f"gram row sums K={k}",
              np.max(np.abs(basis.gram @ np.ones(k + 1) - 1 / (k + 1))) < 1e-10)
        check(f"inverse gram row sums K={k}",
              np.max(np.abs(basis.gram_inverse @ np.ones(k + 1) - (k + 1))) < 1e-6)
        check(f"dual basis sum K={k}",
              np.max(np.abs(b @ basis.gram_inverse.T @ np.ones(k + 1) - (k + 1))) < 1e-7)
    p = Normal(0.0, 1.0)
    pmf = rank.exact_pmf(p, p, 7)
    check("uniformity p=ptilde", rank.discrepancy(pmf) < 1e-8)
    check("discrepancy uniform pmf", rank.discrepancy(rank.RankPmf.uniform(9)) == 0.0)
    lhs, rhs = bernstein.sup_deviation_bound_check(Normal(0.5, 1.0), p, 5)
    check("uniform bound N(0.5,1) vs N(0,1)", lhs <= rhs + 1e-8)
    lhs, rhs = slicing.sliced_bound_check(
        Gaussian2D((0.3, 0.0)), Gaussian2D(), 5, 8)
    check("sliced bound", lhs <= rhs)
    if failures:
        sys.stderr.write(json.dumps({"error": "props",
                                     "message": f"{len(failures)} checks failed",
                                     "failed": failures}) + "\n")
        sys.exit(1)


@main.command()
@common_options
@click.option("--target", default="normal(4,2)", show_default=True)
@click.option("--methods", default="dual,classical", show_default=True)
@click.pass_context
@_guard
def timing(ctx, config_path, out_dir, k, epochs, batch_size, learning_rate,
           seeds, eval_samples, anneal, lr_decay, target, methods):
    """Per-epoch wall-time comparison on identical budgets."""
    kw = _merge_config(ctx, config_path, dict(
        out_dir=out_dir, k=k, epochs=epochs, batch_size=batch_size,
        learning_rate=learning_rate, seeds=seeds, eval_samples=eval_samples, anneal=anneal, lr_decay=lr_decay,
        target=target, methods=methods))
    out = _outdir(kw["out_dir"])
    density = parse_density(kw["target"])
    seed = _parse_seeds(kw["seeds"])[0]
    trainers = {"dual": train_dual_isl, "classical": train_classical_isl}
    rows = []
    for method in [m.strip() for m in kw["methods"].split(",") if m.strip()]:
        if method not in trainers:
            raise ValueError(f"unknown method {method!r}")
        cfg = _train_cfg(kw, seed,
                         orientation="classical" if method == "classical" else "dual")
        _, report = trainers[method](default_generator_1d(seed), density, cfg)
        per_epoch = float(np.median(report.epoch_seconds))
        rows.append((kw["target"], method, kw["k"], seed, "epoch_seconds", per_epoch))
        click.echo(f"{method}: median epoch {per_epoch:.4f} s")
    _write_results(out / "results.csv", rows)


@main.command()
@click.argument("csv_path", type=click.Path(exists=True))
@click.option("--kind", type=click.Choice(plots.PLOT_KINDS), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@_guard
def plot(csv_path, kind, out_path):
    """Render a result CSV to a deterministic SVG."""
    plots.emit_plot(csv_path, kind, out_path)
    click.echo(f"wrote {out_path}")


if __name__ == "__main__":
    main()
