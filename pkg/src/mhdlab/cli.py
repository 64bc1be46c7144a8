"""Batch entry point: configuration parsing, experiment dispatch, and
result serialization.

Exit codes: 0 success, 2 validation failure, 3 numerical blow-up,
4 acceptance-check failure.  Config files are JSON; command-line flags
override file values and the full effective config is echoed into
summary.json.
"""

import concurrent.futures
import hashlib
import json
import os
import re
import sys
import time
from dataclasses import asdict, replace

import click
import numpy as np

from . import __version__
from .diagnostics import (CSV_COLUMNS, assemble_functionals, compute_record,
                          fit_decay, theorem_rate)
from .commutator import CommutatorOp, default_cells, ratio_campaign
from .solver import (BlowUpError, RunConfig, Stepper, linear_propagator,
                     make_initial_data, run, check_symmetry)
from .symmetry import check_spectral_constraint
from .fields import single_mode, zero_field
from .grid import Grid
from .solver import MhdState

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BLOWUP = 3
EXIT_ACCEPTANCE = 4


class ConfigError(ValueError):
    pass


def _duplicate_key_hook(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise ConfigError(f"duplicate key {key!r}")
        seen[key] = value
    return seen


def load_config_file(path: str) -> dict:
    """Parse a JSON config; duplicate keys are rejected with line context."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text, object_pairs_hook=_duplicate_key_hook)
    except ConfigError as exc:
        key = str(exc).split("'")[1]
        lines = [i + 1 for i, line in enumerate(text.splitlines())
                 if re.search(rf'"{re.escape(key)}"\s*:', line)]
        raise ConfigError(
            f"{path}: duplicate key {key!r} (lines {lines})") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return data


def build_run_config(file_values: dict, overrides: dict) -> RunConfig:
    """Merge file values and CLI overrides into a validated RunConfig.

    Unknown keys are rejected so typos never pass silently; every violated
    theorem constraint is listed, not just the first.
    """
    known = RunConfig.field_names()
    unknown = sorted(set(file_values) - known)
    if unknown:
        raise ConfigError(
            f"unknown config keys {unknown}; known keys: {sorted(known)}")
    merged = dict(file_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    config = RunConfig(**merged)
    errors = config.validate()
    if errors:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(errors))
    return config


def _hash_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def emit_outputs(records, summary: dict, outdir: str, config: RunConfig | None):
    """Write timeseries.csv, summary.json, and manifest.json.

    Files are written to temporaries and renamed; partial files are removed
    if any write fails.
    """
    os.makedirs(outdir, exist_ok=True)
    written = []
    try:
        if records is not None:
            path = os.path.join(outdir, "timeseries.csv")
            tmp = path + ".tmp"
            with open(tmp, "w", encoding="utf-8", newline="") as fh:
                fh.write(",".join(CSV_COLUMNS) + "\n")
                for rec in records:
                    fh.write(",".join(_fmt(v) for v in rec.csv_values()) + "\n")
            os.replace(tmp, path)
            written.append(path)
        if config is not None:
            summary = dict(summary)
            summary["config"] = asdict(config)
        summary["version"] = __version__
        path = os.path.join(outdir, "summary.json")
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
        written.append(path)
        manifest = {
            "version": __version__,
            "seed": config.seed if config is not None else None,
            "hashes": {os.path.basename(p): _hash_file(p) for p in written},
        }
        path = os.path.join(outdir, "manifest.json")
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except OSError as exc:
        for p in written:
            if os.path.exists(p):
                os.remove(p)
        raise click.ClickException(
            f"failed writing outputs under {outdir}: {exc}")


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("MHDLAB_WORKERS", "1")))
    except ValueError:
        return 1


def _default_rate_fits(records, config: RunConfig) -> list:
    """Rate fits against the theorem exponents.  In the non-resistive
    regime no decay is asserted for b itself."""
    T = records[-1].t
    window = (min(20.0, T / 2.0), T)
    candidates = [
        ("l2_u" if config.regime == "non_resistive" else "l2_pair",
         theorem_rate(config.s, config.delta, "u_decay", 0.0)),
        ("semi_dn_pair_m1",
         theorem_rate(config.s, config.delta, "vertical_decay", 0.0)),
        ("hs_pair", theorem_rate(config.s, config.delta, "growth")),
    ]
    fits = []
    for quantity, exponent in candidates:
        try:
            fits.append(fit_decay(records, quantity, window, exponent).to_dict())
        except ValueError:
            continue
    return fits


def _invariant_checks(state, config: RunConfig) -> dict:
    scale = max(state.scale(), 1e-300)
    return {
        "divergence_rel": state.divergence() / scale,
        "hermitian_defect_rel": max(state.u.hermitian_defect(),
                                    state.b.hermitian_defect()) / scale,
        "mean_zero": bool(state.u.is_mean_zero() and state.b.is_mean_zero()),
        "symmetry_violation": check_symmetry(state, config.symmetry),
        "spectral_constraint": (
            check_spectral_constraint(state.u, state.b, config.regime,
                                      config.symmetry)
            if config.regime in ("non_resistive", "non_viscous") else None),
    }


def _simulate_one(config: RunConfig):
    t0 = time.perf_counter()
    records, final = run(config)
    wall = time.perf_counter() - t0
    report = assemble_functionals(records, config.s, config.delta,
                                  config.regime)
    summary = {
        "functionals": report.to_dict(),
        "rate_fits": _default_rate_fits(records, config),
        "theorem_exponents": {
            "growth": theorem_rate(config.s, config.delta, "growth"),
            "u_decay_l0": theorem_rate(config.s, config.delta, "u_decay", 0.0),
            "vertical_decay_k0": theorem_rate(config.s, config.delta,
                                              "vertical_decay", 0.0),
        },
        "invariant_checks": _invariant_checks(final, config),
        "timings": {"wall_seconds": wall},
    }
    return records, summary


@click.group()
def main():
    """Spectral MHD stability laboratory."""


def _config_options(fn):
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True),
                     help="JSON config file; flags override its values."),
        click.option("--n", type=int, default=None),
        click.option("--resolution", "N", type=int, default=None),
        click.option("--regime", type=click.Choice(
            ["non_resistive", "non_viscous", "general"]), default=None),
        click.option("--symmetry", type=click.Choice(
            ["Sym1", "Sym2", "Unconstrained"]), default=None),
        click.option("--s", "s", type=float, default=None),
        click.option("--delta", type=float, default=None),
        click.option("--epsilon", type=float, default=None),
        click.option("--dt", type=float, default=None),
        click.option("--final-time", "T", type=float, default=None),
        click.option("--band-limit", type=int, default=None),
        click.option("--seed", type=int, default=None),
        click.option("--output-every", type=int, default=None),
        click.option("--resymmetrize/--no-resymmetrize", default=None),
    ]
    for opt in reversed(options):
        fn = opt(fn)
    return fn


def _assemble_config(config_path, **overrides) -> RunConfig:
    file_values = load_config_file(config_path) if config_path else {}
    return build_run_config(file_values, overrides)


@main.command()
@_config_options
@click.option("--outdir", "-o", required=True, type=click.Path())
def simulate(config_path, outdir, **overrides):
    """Run one integration and serialize its diagnostics."""
    try:
        config = _assemble_config(config_path, **overrides)
    except ConfigError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_VALIDATION)
    try:
        records, summary = _simulate_one(config)
    except BlowUpError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_BLOWUP)
    emit_outputs(records, summary, outdir, config)
    click.echo(f"wrote {outdir}")


def _study_run(args):
    config_dict, outdir = args
    config = RunConfig(**config_dict)
    records, summary = _simulate_one(config)
    emit_outputs(records, summary, outdir, config)
    sup_hm = max(r.hm_u + r.hm_b for r in records)
    gamma_total = summary["functionals"]["total"]
    return {
        "outdir": outdir,
        "epsilon": config.epsilon,
        "seed": config.seed,
        "sup_hm_pair": sup_hm,
        "stability_constant": sup_hm / config.epsilon,
        "functional_total": gamma_total,
        "functional_over_eps2": gamma_total / config.epsilon ** 2,
    }


@main.command(name="decay-study")
@_config_options
@click.option("--outdir", "-o", required=True, type=click.Path())
@click.option("--epsilons", default="1e-3,2e-3,4e-3",
              help="Comma-separated initial amplitudes.")
@click.option("--seeds", default="0,1,2", help="Comma-separated seeds.")
def decay_study(config_path, outdir, epsilons, seeds, **overrides):
    """Sweep epsilon and seed, aggregate stability constants and fits."""
    try:
        base = _assemble_config(config_path, **overrides)
        eps_list = [float(x) for x in epsilons.split(",") if x]
        seed_list = [int(x) for x in seeds.split(",") if x]
    except (ConfigError, ValueError) as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_VALIDATION)
    jobs = []
    for eps in eps_list:
        for seed in seed_list:
            cfg = replace(base, epsilon=eps, seed=seed)
            sub = os.path.join(outdir, f"eps{eps:g}_seed{seed}")
            jobs.append((asdict(cfg), sub))
    workers = worker_count()
    try:
        if workers > 1:
            with concurrent.futures.ProcessPoolExecutor(workers) as pool:
                results = list(pool.map(_study_run, jobs))
        else:
            results = [_study_run(job) for job in jobs]
    except BlowUpError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_BLOWUP)
    constants = [r["stability_constant"] for r in results]
    ratios = [r["functional_over_eps2"] for r in results]
    summary = {
        "runs": results,
        "stability_constant": {
            "baseline": constants[0],
            "min": min(constants), "max": max(constants),
            "spread_ok": max(constants) <= 1.5 * constants[0]
                          and min(constants) >= 0.5 * constants[0],
        },
        "functional_over_eps2": {
            "baseline": ratios[0], "min": min(ratios), "max": max(ratios),
            "spread_ok": max(ratios) <= 1.5 * ratios[0]
                          and min(ratios) >= 0.5 * ratios[0],
        },
    }
    emit_outputs(None, summary, outdir, base)
    ok = summary["stability_constant"]["spread_ok"] and \
        summary["functional_over_eps2"]["spread_ok"]
    click.echo(f"wrote {outdir} (stability spread ok: {ok})")
    if not ok:
        sys.exit(EXIT_ACCEPTANCE)


@main.command()
@click.option("--outdir", "-o", required=True, type=click.Path())
@click.option("--n", default=2, type=int)
@click.option("--case", "cases", default="1,2,3,4")
@click.option("--trials", default=100, type=int)
@click.option("--resolutions", default="16,32")
@click.option("--seed", default=0, type=int)
@click.option("--op", "op_kind", default="partial_laplacian_root",
              type=click.Choice(["partial_laplacian_root", "derivative"]))
def commutator(outdir, n, cases, trials, resolutions, seed, op_kind):
    """Run commutator ratio campaigns and serialize the samples."""
    try:
        case_list = [int(c) for c in cases.split(",") if c]
        res_list = [int(r) for r in resolutions.split(",") if r]
    except ValueError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_VALIDATION)
    op = CommutatorOp(op_kind, axes=(0,), axis=n - 1)
    os.makedirs(outdir, exist_ok=True)
    all_stats = []
    rows = []
    for case in case_list:
        stats, samples = ratio_campaign(
            n, case, default_cells(n, case), trials, res_list, op=op,
            seed=seed, collect_samples=True)
        all_stats.extend(s.to_dict() for s in stats)
        rows.extend(samples)
    csv_path = os.path.join(outdir, "samples.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("n,resolution,case,s,l,eta,op_kind,lhs,rhs,ratio,seed\n")
        for r in rows:
            fh.write(f"{r.n},{r.resolution},{r.case},{_fmt(r.s)},{_fmt(r.l)},"
                     f"{_fmt(r.eta)},{r.op_kind},{_fmt(r.lhs)},{_fmt(r.rhs)},"
                     f"{_fmt(r.ratio)},{r.seed}\n")
    growth_ok = True
    for stat in all_stats:
        maxima = [stat["per_resolution_max"][N] for N in sorted(
            stat["per_resolution_max"])]
        for lo, hi in zip(maxima, maxima[1:]):
            if lo > 0 and hi > 1.2 * lo:
                growth_ok = False
    summary = {"cells": all_stats, "resolution_growth_ok": growth_ok,
               "trials": trials, "seed": seed}
    emit_outputs(None, summary, outdir, None)
    click.echo(f"wrote {outdir} (resolution growth ok: {growth_ok})")
    if not growth_ok:
        sys.exit(EXIT_ACCEPTANCE)


@main.command(name="symmetry-check")
@_config_options
@click.option("--outdir", "-o", required=True, type=click.Path())
@click.option("--budget", default=1e-10, type=float)
def symmetry_check(config_path, outdir, budget, **overrides):
    """Integrate without re-symmetrization and report symmetry drift."""
    try:
        config = _assemble_config(config_path, **overrides)
    except ConfigError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_VALIDATION)
    config = replace(config, resymmetrize=False)
    try:
        records, final = run(config)
    except BlowUpError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_BLOWUP)
    drift = check_symmetry(final, config.symmetry)
    constraint = check_spectral_constraint(final.u, final.b, config.regime,
                                           config.symmetry)
    summary = {
        "symmetry_drift": drift,
        "spectral_constraint": constraint,
        "budget": budget,
        "ok": bool(drift <= budget and constraint <= budget),
    }
    emit_outputs(records, summary, outdir, config)
    click.echo(f"symmetry drift {drift:.3e}, constraint {constraint:.3e}")
    if not summary["ok"]:
        sys.exit(EXIT_ACCEPTANCE)


@main.command(name="linear-oracle")
@click.option("--outdir", "-o", required=True, type=click.Path())
@click.option("--n", default=2, type=int)
@click.option("--resolution", "N", default=32, type=int)
@click.option("--modes", default=50, type=int)
@click.option("--dt", default=1e-2, type=float)
@click.option("--final-time", "T", default=5.0, type=float)
@click.option("--seed", default=0, type=int)
@click.option("--tolerance", default=1e-12, type=float)
def linear_oracle(outdir, n, N, modes, dt, T, seed, tolerance):
    """Compare the nonlinear-disabled stepper with the closed-form
    per-mode matrix exponential, in both regimes."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    grid = Grid(n, N)
    steps = int(round(T / dt))
    for mu, nu in ((1.0, 0.0), (0.0, 1.0)):
        stepper = Stepper(grid, dt, mu, nu, nonlinear=False)
        for _ in range(modes):
            k = rng.integers(-grid.max_mode, grid.max_mode + 1, size=n)
            if not np.any(k):
                k[-1] = 1
            kv = k.astype(np.float64)
            # divergence-free complex amplitude vectors
            amp_u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            amp_b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            amp_u -= kv * (kv @ amp_u) / (kv @ kv)
            amp_b -= kv * (kv @ amp_b) / (kv @ kv)
            u = zero_field(grid, n)
            b = zero_field(grid, n)
            idx = tuple(int(ki) % N for ki in k)
            idx_m = tuple((-int(ki)) % N for ki in k)
            for j in range(n):
                u.coeffs[(j,) + idx] = amp_u[j]
                u.coeffs[(j,) + idx_m] = np.conj(amp_u[j])
                b.coeffs[(j,) + idx] = amp_b[j]
                b.coeffs[(j,) + idx_m] = np.conj(amp_b[j])
            state = MhdState(u, b, 0.0, mu, nu)
            for _ in range(steps):
                state = stepper.step(state)
            prop = np.linalg.matrix_power(
                linear_propagator(k, dt, mu, nu), steps)
            exact = prop @ np.vstack([amp_u, amp_b])
            got = np.vstack([
                np.array([state.u.coeffs[(j,) + idx] for j in range(n)]),
                np.array([state.b.coeffs[(j,) + idx] for j in range(n)]),
            ])
            scale = max(np.max(np.abs(exact)), 1e-300)
            worst = max(worst, float(np.max(np.abs(got - exact)) / scale))
    summary = {"max_relative_error": worst, "tolerance": tolerance,
               "ok": bool(worst <= tolerance), "modes": modes,
               "dt": dt, "T": T}
    emit_outputs(None, summary, outdir, None)
    click.echo(f"linear oracle max relative error {worst:.3e}")
    if not summary["ok"]:
        sys.exit(EXIT_ACCEPTANCE)


if __name__ == "__main__":
    main()
