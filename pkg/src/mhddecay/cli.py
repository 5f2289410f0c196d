"""Command-line drivers: linear-decay, simulate, verify-estimates, spectrum.

Each run writes into ``<outdir>/<run-id>/`` where the id hashes the resolved
configuration and seed: the resolved config, delimited series, JSON verdict
files, and rendered figures land side by side.  Exit status is nonzero iff a
verdict fails, so the commands compose with shell pipelines and CI.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import figures
from .config import ConfigError, RunConfig, initial_state, load_config
from .continuum import QuadratureProfile, SemigroupOracle, low_frequency_amplitude
from .decay import (
    compute_monitors,
    fit_exponent,
    monitor_low_norm,
    monitor_lyapunov,
    lyapunov_composite,
    low_frequency_norm,
    predicted_besov_rate,
    torus_fit_window,
)
from .dyadic import BesovSpec
from .harness import standard_suite
from .integrate import SchemeConfig, run
from .model import save_state
from .reports import dump_json, run_id, write_csv
from .symbol import calibrate_threshold, spectrum_sweep


def _prepare_outdir(cfg: RunConfig, outdir: str, command: str) -> Path:
    rid = run_id(f"command={command}\n" + cfg.resolved_text(), cfg.seed)
    path = Path(outdir) / f"{command}-{rid}"
    path.mkdir(parents=True, exist_ok=True)
    (path / "config.resolved").write_text(cfg.resolved_text(), encoding="utf-8")
    return path


def cmd_linear_decay(cfg: RunConfig, outdir: str, jobs: int = 1) -> int:
    """Continuum-oracle decay series and exponent fits per requested sigma."""
    params = cfg.material_params()
    dim = params.dim
    o = cfg["oracle"]
    profile = QuadratureProfile(
        dim=dim,
        j_lo=int(o["j_lo"]),
        j_hi=int(o["j_hi"]),
        amplitude=low_frequency_amplitude(float(cfg["rates"]["sigma1"]), dim),
        n_radial=int(o["n_radial"]),
        n_angular=int(o["n_angular"]),
        n_polar=int(o["n_polar"]),
        n_azimuth=int(o["n_azimuth"]),
        polarization=str(o["polarization"]),
    )
    oracle = SemigroupOracle(profile, params)
    fit_cfg = cfg["fit"]
    times = np.geomspace(
        float(fit_cfg["t_start"]), float(fit_cfg["t_end"]), int(fit_cfg["samples"])
    )
    sigma1 = float(cfg["rates"]["sigma1"])
    p = float(cfg["rates"]["p"])
    sigmas = [float(s) for s in cfg["rates"]["sigma"]]

    def one(sigma: float):
        totals, ladder = oracle.decay_series(times, BesovSpec(sigma, 2.0, 1.0))
        predicted = -predicted_besov_rate(dim, p, sigma1, sigma)
        fit = fit_exponent(
            times,
            totals,
            (float(fit_cfg["t_start"]), float(fit_cfg["t_end"])),
            tolerance=float(fit_cfg["tolerance"]),
            predicted=predicted,
            series_id=f"besov(sigma={sigma:g})",
        )
        return sigma, totals, ladder, fit

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, sigmas))
    else:
        results = [one(s) for s in sigmas]

    out = _prepare_outdir(cfg, outdir, "linear-decay")
    series_rows = []
    block_rows = []
    fits = []
    plot_series, plot_fits = {}, {}
    for sigma, totals, ladder, fit in results:
        sid = fit.series_id
        series_rows += [(t, sid, v) for t, v in zip(times, totals)]
        block_rows += [(t, j, v) for t, j, v in ladder]
        fits.append(fit.to_json())
        plot_series[sid] = (times, totals)
        plot_fits[sid] = fit.to_json()
    write_csv(out / "series.csv", ["t", "series_id", "value"], series_rows)
    write_csv(out / "blocks.csv", ["t", "block_j", "block_norm"], block_rows)
    for i, (sigma, totals, _, _) in enumerate(results):
        write_csv(
            out / f"totals-{i:02d}.csv",
            ["t", "besov_total"],
            list(zip(times, totals)),
        )
    dump_json(out / "fits.json", {"fits": fits})
    figures.decay_figure(out / "decay.png", plot_series, plot_fits)
    failures = [f for f in fits if f["verdict"] == "fail"]
    for f in fits:
        print(
            f"{f['series_id']}: fitted {f['fitted']:+.4f} predicted "
            f"{f['predicted']:+.4f} -> {f['verdict']}"
        )
    return 1 if failures else 0


def cmd_simulate(cfg: RunConfig, outdir: str) -> int:
    """Nonlinear box run with conservation and monotonicity monitors."""
    params = cfg.material_params()
    state = initial_state(cfg)
    s = cfg["scheme"]
    scheme = SchemeConfig(
        method=str(s["method"]),
        dt=float(s["dt"]),
        t_end=float(s["t_end"]),
        dealias_rule=float(s["dealias"]),
        snapshot_every=int(s["snapshot_every"]),
        cfl_limit=float(s["cfl_limit"]),
    )
    p = float(cfg["rates"]["p"])
    sigma1 = float(cfg["rates"]["sigma1"])
    k0 = int(cfg["analysis"]["k0"])

    def observer(step, t, st):
        return {
            "lyapunov": lyapunov_composite(st, p, k0),
            "low_norm": low_frequency_norm(st, sigma1, k0),
        }

    traj = run(state, params, scheme, observer=observer)

    out = _prepare_outdir(cfg, outdir, "simulate")
    diag_cols = ["t", "mean_a", "max_div_h", "dt", "cfl", "lyapunov", "low_norm"]
    write_csv(
        out / "diagnostics.csv",
        diag_cols,
        [[row[c] for c in diag_cols] for row in traj.diagnostics],
    )
    steps_t = np.array([row["t"] for row in traj.diagnostics])
    lyap = np.array([row["lyapunov"] for row in traj.diagnostics])
    low = np.array([row["low_norm"] for row in traj.diagnostics])
    mono = compute_monitors(traj, p, sigma1, k0)
    window = torus_fit_window(scheme.dt, float(cfg["grid"]["length"]), scheme.t_end)
    fits = []
    try:
        fits.append(
            fit_exponent(steps_t, lyap, window, series_id="lyapunov-composite").to_json()
        )
    except ValueError:
        pass  # short runs may not cover the window
    verdicts = {
        "lyapunov": monitor_lyapunov(steps_t, lyap, params.dim, sigma1),
        "low_norm": monitor_low_norm(steps_t, low),
        "mean_a_drift": float(
            np.abs(
                np.array([row["mean_a"] for row in traj.diagnostics])
                - traj.states[0].mean_a()
            ).max(initial=0.0)
        ),
        "max_div_h": float(
            np.array([row["max_div_h"] for row in traj.diagnostics]).max(initial=0.0)
        ),
        "xp_final": float(mono.xp[-1]),
    }
    dump_json(
        out / "monitors.json",
        {
            "verdicts": verdicts,
            "series": mono.to_json(),
            "initial": traj.initial_report,
            "threshold_calibration": calibrate_threshold(params),
        },
    )
    series_rows = [(t, "lyapunov", v) for t, v in zip(steps_t, lyap)]
    series_rows += [(t, "low_norm", v) for t, v in zip(steps_t, low)]
    write_csv(out / "series.csv", ["t", "norm_id", "value"], series_rows)
    dump_json(out / "fits.json", {"fits": fits})
    figures.monitor_figure(out / "monitors.png", steps_t, lyap, low)
    for i, (t, st) in enumerate(zip(traj.times, traj.states)):
        save_state(out / f"snapshot_{i:04d}.bin", st, t)
    ok = (
        verdicts["lyapunov"]["verdict"] == "pass"
        and verdicts["low_norm"]["verdict"] == "pass"
    )
    print(
        f"lyapunov: {verdicts['lyapunov']['verdict']}  "
        f"low_norm: {verdicts['low_norm']['verdict']}  "
        f"mean_a drift {verdicts['mean_a_drift']:.3e}  "
        f"max div H {verdicts['max_div_h']:.3e}"
    )
    return 0 if ok else 1


def cmd_verify_estimates(cfg: RunConfig, outdir: str) -> int:
    """Run the inequality harness; fails if any stability bound escapes."""
    h = cfg["harness"]
    reports = standard_suite(
        n_samples=int(h["samples"]),
        seed=cfg.seed,
        points=int(h["points"]),
        length=float(h["length"]),
    )
    out = _prepare_outdir(cfg, outdir, "verify-estimates")
    dump_json(out / "ratio_reports.json", {"reports": [r.to_json() for r in reports]})
    write_csv(
        out / "series.csv",
        ["estimate_id", "max_ratio", "median_ratio", "resolution_stability"],
        [
            (r.estimate_id, r.max_ratio, r.median_ratio, r.resolution_stability)
            for r in reports
        ],
    )
    dump_json(out / "fits.json", {"fits": []})
    dump_json(out / "monitors.json", {"verdicts": {}})
    figures.ratio_figure(out / "ratios.png", reports)
    bad = []
    for r in reports:
        stable = 0.5 <= r.resolution_stability <= 2.0 and np.isfinite(r.max_ratio)
        print(
            f"{r.estimate_id}: max {r.max_ratio:.4g} stability "
            f"{r.resolution_stability:.4f} -> {'ok' if stable else 'FAIL'}"
        )
        if not stable:
            bad.append(r.estimate_id)
    return 1 if bad else 0


def cmd_spectrum(cfg: RunConfig, outdir: str) -> int:
    """Random-frequency eigenvalue sweep of the linearized system."""
    params = cfg.material_params()
    sp = cfg["spectrum"]
    rows = spectrum_sweep(
        params,
        int(sp["samples"]),
        cfg.seed,
        (float(sp["r_min"]), float(sp["r_max"])),
    )
    out = _prepare_outdir(cfg, outdir, "spectrum")
    write_csv(
        out / "series.csv",
        ["xi_norm", "angle_to_I", "eig_index", "re", "im"],
        [tuple(r) for r in rows],
    )
    dump_json(out / "fits.json", {"fits": []})
    max_re = float(rows[:, 3].max())
    dump_json(out / "monitors.json", {"verdicts": {"max_real_part": max_re}})
    figures.spectrum_figure(out / "spectrum.png", rows)
    print(f"max real part over sweep: {max_re:.3e}")
    return 0 if max_re <= 1e-12 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mhddecay",
        description="Spectral decay diagnostics for the compressible MHD system",
    )
    parser.add_argument(
        "--config",
        type=str,
        action="append",
        default=None,
        help="config file path (repeatable; each runs as its own experiment)",
    )
    parser.add_argument("--seed", type=int, default=None, help="override [run] seed")
    parser.add_argument("--outdir", type=str, default="out", help="output directory")
    parser.add_argument(
        "--dry-run", action="store_true", help="print the resolved config and exit"
    )
    parser.add_argument("--jobs", type=int, default=1, help="parallel experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("linear-decay", "simulate", "verify-estimates", "spectrum"):
        sub.add_parser(name)
    args = parser.parse_args(argv)

    try:
        overrides = {}
        if args.seed is not None:
            overrides[("run", "seed")] = int(args.seed)
        paths = args.config if args.config else [None]
        configs = [load_config(p, overrides=overrides) for p in paths]
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.dry_run:
        for cfg in configs:
            sys.stdout.write(cfg.resolved_text())
        return 0

    def dispatch(cfg: RunConfig) -> int:
        if args.command == "linear-decay":
            return cmd_linear_decay(cfg, args.outdir, jobs=args.jobs)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.outdir)
        if args.command == "verify-estimates":
            return cmd_verify_estimates(cfg, args.outdir)
        return cmd_spectrum(cfg, args.outdir)

    if len(configs) == 1:
        return dispatch(configs[0])
    # independent experiments; each owns its run directory exclusively
    with ThreadPoolExecutor(max_workers=max(args.jobs, 1)) as pool:
        codes = list(pool.map(dispatch, configs))
    return max(codes)


if __name__ == "__main__":
    sys.exit(main())
