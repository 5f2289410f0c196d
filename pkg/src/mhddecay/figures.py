"""Matplotlib renderings written next to the delimited report files."""

from __future__ import annotations

import threading

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

# pyplot keeps global state; concurrent experiment threads render one at a time
_RENDER_LOCK = threading.Lock()


def _locked(fn):
    def wrapper(*args, **kwargs):
        with _RENDER_LOCK:
            return fn(*args, **kwargs)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_locked
def decay_figure(path, series: dict[str, tuple[np.ndarray, np.ndarray]], fits: dict):
    """Log-log norm series with their fitted and predicted slopes."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for name, (t, v) in sorted(series.items()):
        (line,) = ax.loglog(1.0 + t, v, ".", ms=4, label=name)
        fit = fits.get(name)
        if fit is not None:
            t0, t1 = fit["window"]
            tt = np.geomspace(max(t0, t.min()), min(t1, t.max()), 50)
            ref_idx = np.argmin(np.abs(t - tt[0]))
            anchor = v[ref_idx] * ((1.0 + tt) / (1.0 + t[ref_idx])) ** fit["fitted"]
            ax.loglog(1.0 + tt, anchor, "-", color=line.get_color(), lw=1,
                      label=f"{name} fit {fit['fitted']:.3f}")
    ax.set_xlabel("1 + t")
    ax.set_ylabel("norm")
    ax.legend(fontsize=7)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


@_locked
def monitor_figure(path, times, lyapunov, low_norm):
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.4, 5.4), sharex=True)
    ax1.semilogy(times, np.maximum(lyapunov, 1e-300), "-")
    ax1.set_ylabel("composite energy norm")
    ax1.grid(alpha=0.3)
    ax2.plot(times, low_norm, "-")
    ax2.set_ylabel("low-frequency weak norm")
    ax2.set_xlabel("t")
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


@_locked
def spectrum_figure(path, rows: np.ndarray):
    """Real parts of the per-frequency eigenvalues against ``|xi|``."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    r = rows[:, 0]
    re = rows[:, 3]
    ax.loglog(r, np.maximum(-re, 1e-18), ".", ms=2, alpha=0.4)
    ref = np.geomspace(r.min(), r.max(), 50)
    ax.loglog(ref, ref**2, "k--", lw=1, label="|xi|^2")
    ax.axhline(1.0, color="r", lw=1, ls=":", label="damped mode")
    ax.set_xlabel("|xi|")
    ax.set_ylabel("-Re(eigenvalue)")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


@_locked
def ratio_figure(path, reports):
    fig, ax = plt.subplots(figsize=(7.2, 4.2))
    names = [r.estimate_id for r in reports]
    maxima = [r.max_ratio for r in reports]
    stab = [r.resolution_stability for r in reports]
    x = np.arange(len(names))
    ax.bar(x - 0.2, maxima, width=0.4, label="max ratio")
    ax.bar(x + 0.2, stab, width=0.4, label="stability (2M/M)")
    ax.axhline(1.0, color="k", lw=0.8, alpha=0.5)
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=60, ha="right", fontsize=7)
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
