"""Predicted decay exponents, log-log fits, and norm-ladder monitors.

The theoretical rates live on parameter windows (an admissible integrability
``p``, a low-frequency regularity ``sigma1`` and a target regularity) that
are validated with one named inequality per violation.  Fits regress
``log(value)`` on ``log(1+t)`` over an explicit window; monitors track the
composite energy norm, the low-frequency norm and the global accumulator of
a trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dyadic import BesovSpec, besov_norm, block_lp_norm, support_range
from .grid import SpectralField, gradient
from .model import State

DEFAULT_TOLERANCE = 0.05
LINEAR_FIT_WINDOW = (1e2, 1e4)

# slack on closed window ends so exact endpoints survive float roundoff
_EDGE = 1e-12


class RateConstraintError(ValueError):
    """A rate query violates one of the admissibility inequalities."""


def validate_p(dim: int, p: float):
    if dim < 2:
        raise RateConstraintError("dimension must satisfy N >= 2")
    upper = 4.0 if dim <= 2 else min(4.0, 2.0 * dim / (dim - 2))
    if not (2.0 - _EDGE <= p <= upper + _EDGE):
        raise RateConstraintError(
            f"p must satisfy 2 <= p <= min(4, 2N/(N-2)); got p={p} for N={dim}"
        )
    if dim == 2 and p == 4.0:
        raise RateConstraintError("p = 4 is excluded when N = 2")


def validate_sigma1(dim: int, p: float, sigma1: float):
    validate_p(dim, p)
    if not sigma1 > 1.0 - dim / 2.0:
        raise RateConstraintError(
            f"sigma1 must satisfy sigma1 > 1 - N/2 = {1.0 - dim / 2.0}; got {sigma1}"
        )
    sigma0 = 2.0 * dim / p - dim / 2.0
    if not sigma1 <= sigma0 + _EDGE:
        raise RateConstraintError(
            f"sigma1 must satisfy sigma1 <= 2N/p - N/2 = {sigma0}; got {sigma1}"
        )


def validate_sigma(dim: int, p: float, sigma1: float, sigma: float):
    validate_sigma1(dim, p, sigma1)
    lower = -sigma1 - dim / 2.0 + dim / p
    if not sigma > lower:
        raise RateConstraintError(
            f"sigma must satisfy sigma > -sigma1 - N/2 + N/p = {lower}; got {sigma}"
        )
    if not sigma <= dim / p - 1.0 + _EDGE:
        raise RateConstraintError(
            f"sigma must satisfy sigma <= N/p - 1 = {dim / p - 1.0}; got {sigma}"
        )


@dataclass(frozen=True)
class RateQuery:
    """Admissible decay-rate query with its interpolation exponents."""

    dim: int
    p: float
    sigma1: float
    sigma: float

    def __post_init__(self):
        validate_sigma(self.dim, self.p, self.sigma1, self.sigma)

    @property
    def rate(self) -> float:
        return predicted_besov_rate(self.dim, self.p, self.sigma1, self.sigma)

    @property
    def theta0(self) -> float:
        """Exponent pairing the lowest norm with the energy composite."""
        return 2.0 / (self.dim / 2.0 + 1.0 + self.sigma1)

    @property
    def theta1(self) -> float:
        """Exponent pairing the target norm between the two extremes."""
        return (self.dim / self.p - 1.0 - self.sigma) / (self.dim / 2.0 - 1.0 + self.sigma1)


def predicted_besov_rate(dim: int, p: float, sigma1: float, sigma: float) -> float:
    """Decay exponent of the Besov norm of regularity ``sigma``."""
    validate_sigma(dim, p, sigma1, sigma)
    return dim / 2.0 * (0.5 - 1.0 / p) + (sigma + sigma1) / 2.0


def predicted_lebesgue_rate(dim: int, p: float, sigma1: float, l: float, r: float) -> float:
    """Decay exponent of ``|Lambda^l . |_{L^r}`` under the same hypotheses."""
    validate_sigma1(dim, p, sigma1)
    if not (p <= r):
        raise RateConstraintError(f"r must satisfy p <= r <= infinity; got r={r} < p={p}")
    eff = l + dim / p - (0.0 if np.isinf(r) else dim / r)
    lower = -sigma1 - dim / 2.0 + dim / p
    if not eff > lower:
        raise RateConstraintError(
            f"l + N/p - N/r must exceed -sigma1 - N/2 + N/p = {lower}; got {eff}"
        )
    if not eff <= dim / p - 1.0 + _EDGE:
        raise RateConstraintError(
            f"l + N/p - N/r must satisfy <= N/p - 1 = {dim / p - 1.0}; got {eff}"
        )
    rinv = 0.0 if np.isinf(r) else 1.0 / r
    return dim / 2.0 * (0.5 - rinv) + (l + sigma1) / 2.0


def lyapunov_envelope_rate(dim: int, sigma1: float) -> float:
    """Exponent of the algebraic envelope solving the Lyapunov inequality."""
    return (dim / 2.0 - 1.0 + sigma1) / 2.0


def torus_fit_window(dt: float, length: float, t_end: float) -> tuple[float, float]:
    """Default fit window for box runs: past the transient, before the
    spectral gap of the finite box takes over (t ~ L^2/4)."""
    return (10.0 * dt, min(t_end, length**2 / 4.0))


@dataclass
class DecayFit:
    """Least-squares exponent of a norm series against its prediction."""

    series_id: str
    window: tuple[float, float]
    fitted: float
    stderr: float
    predicted: float | None
    tolerance: float
    samples: int

    @property
    def verdict(self) -> str:
        if self.predicted is None:
            return "n/a"
        return "pass" if abs(self.fitted - self.predicted) <= self.tolerance else "fail"

    def to_json(self) -> dict:
        return {
            "series_id": self.series_id,
            "window": list(self.window),
            "fitted": self.fitted,
            "stderr": self.stderr,
            "predicted": self.predicted,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
        }


def fit_exponent(
    times,
    values,
    window: tuple[float, float],
    tolerance: float = DEFAULT_TOLERANCE,
    predicted: float | None = None,
    series_id: str = "",
) -> DecayFit:
    """Slope of ``log(value)`` against ``log(1+t)`` inside the window."""
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    t0, t1 = window
    if not t1 > t0 >= 0:
        raise ValueError("fit window must satisfy t1 > t0 >= 0")
    mask = (times >= t0) & (times <= t1)
    if mask.sum() < 10:
        raise ValueError(f"need at least 10 samples in the window, got {int(mask.sum())}")
    v = values[mask]
    if np.any(v <= 0):
        raise ValueError("series values must be positive inside the fit window")
    x = np.log1p(times[mask])
    y = np.log(v)
    (slope, intercept), cov = np.polyfit(x, y, 1, cov=True)
    return DecayFit(
        series_id=series_id,
        window=(float(t0), float(t1)),
        fitted=float(slope),
        stderr=float(np.sqrt(max(cov[0, 0], 0.0))),
        predicted=predicted,
        tolerance=tolerance,
        samples=int(mask.sum()),
    )


# ---------------------------------------------------------------------------
# trajectory norm ladders and monitors


def _triple_norm(fields: list[SpectralField], spec: BesovSpec, part: str) -> float:
    tot = 0.0
    for f in fields:
        bn = besov_norm(f, spec)
        tot += {"low": bn.low, "high": bn.high, "total": bn.total}[part]
    return tot


def lyapunov_composite(state: State, p: float, k0: int) -> float:
    """Low energy norm of (a, u, H) plus high norm of (grad a, u, H)."""
    n = state.grid.dim
    low_spec = BesovSpec(n / 2.0 - 1.0, 2.0, 1.0, k0)
    high_spec = BesovSpec(n / p - 1.0, p, 1.0, k0)
    low = _triple_norm([state.a, state.u, state.h], low_spec, "low")
    high = _triple_norm([gradient(state.a), state.u, state.h], high_spec, "high")
    return low + high


def low_frequency_norm(state: State, sigma1: float, k0: int) -> float:
    """``|(a, u, H)|`` in the weak norm of regularity ``-sigma1``, low part."""
    spec = BesovSpec(-sigma1, 2.0, np.inf, k0)
    return _triple_norm([state.a, state.u, state.h], spec, "low")


def dissipation_functionals(state: State, p: float, k0: int) -> tuple[float, float]:
    """The two norm combinations controlling the low-norm growth.

    The first multiplies the weak norm linearly, the second enters as an
    inhomogeneity; both are integrable in time along small solutions.
    """
    n = state.grid.dim
    a, u, h = state.a, state.u, state.h
    sp = lambda s, p_, r_: BesovSpec(s, p_, r_, k0)  # noqa: E731

    low_energy = _triple_norm([a, u, h], sp(n / 2.0 + 1.0, 2.0, 1.0), "low")
    a_np = besov_norm(a, sp(n / p, p, 1.0))
    h_np = besov_norm(h, sp(n / p, p, 1.0))
    uh_np1_high = _triple_norm([u, h], sp(n / p + 1.0, p, 1.0), "high")
    uh_np1_tot = _triple_norm([u, h], sp(n / p + 1.0, p, 1.0), "total")
    uh_np_high = _triple_norm([u, h], sp(n / p, p, 1.0), "high")

    a1 = (
        low_energy
        + a_np.high
        + uh_np1_high
        + a_np.total**2
        + a_np.total * uh_np1_tot
        + a_np.total * h_np.total
    )
    a2 = (
        (a_np.high + uh_np_high) ** 2
        + uh_np1_high * a_np.total * a_np.high
        + a_np.total**2 * a_np.high
        + a_np.high * uh_np1_high
        + h_np.high**2 * a_np.total
    )
    return a1, a2


@dataclass
class MonitorState:
    """Scalar series extracted from a trajectory for the decay monitors."""

    times: np.ndarray
    lyapunov: np.ndarray
    low_norm: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    xp: np.ndarray

    def to_json(self) -> dict:
        return {
            "times": self.times.tolist(),
            "lyapunov": self.lyapunov.tolist(),
            "low_norm": self.low_norm.tolist(),
            "a1": self.a1.tolist(),
            "a2": self.a2.tolist(),
            "xp": self.xp.tolist(),
            "a1_integral": float(np.trapezoid(self.a1, self.times)),
            "a2_integral": float(np.trapezoid(self.a2, self.times)),
        }


def compute_monitors(traj, p: float, sigma1: float, k0: int) -> MonitorState:
    times = np.asarray(traj.times, dtype=np.float64)
    lyap, low, a1s, a2s = [], [], [], []
    for s in traj.states:
        lyap.append(lyapunov_composite(s, p, k0))
        low.append(low_frequency_norm(s, sigma1, k0))
        a1, a2 = dissipation_functionals(s, p, k0)
        a1s.append(a1)
        a2s.append(a2)
    xp = xp_series(traj, p, k0)
    return MonitorState(
        times=times,
        lyapunov=np.array(lyap),
        low_norm=np.array(low),
        a1=np.array(a1s),
        a2=np.array(a2s),
        xp=xp,
    )


def monitor_lyapunov(
    times,
    values,
    dim: int,
    sigma1: float,
    transient: int = 10,
    rel_tol: float = 1e-6,
) -> dict:
    """Check the composite is nonincreasing after the transient.

    Also reports the coefficient series ``-L' / L^(1 + 2/(N/2-1+sigma1))``
    whose positivity reflects the differential inequality behind the
    algebraic envelope.
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    tail = values[transient:]
    if len(tail) < 2:
        raise ValueError("series too short beyond the transient")
    steps = np.diff(tail)
    scale = np.maximum(tail[:-1], 1e-300)
    max_rel_increase = float((steps / scale).max(initial=-np.inf))
    exponent = 1.0 + 2.0 / (dim / 2.0 - 1.0 + sigma1)
    dt = np.diff(times[transient:])
    with np.errstate(divide="ignore", invalid="ignore"):
        coeff = -steps / dt / scale**exponent
    coeff = coeff[np.isfinite(coeff)]
    return {
        "verdict": "pass" if max_rel_increase <= rel_tol else "fail",
        "max_relative_increase": max_rel_increase,
        "rel_tol": rel_tol,
        "envelope_exponent": exponent,
        "coefficient_median": float(np.median(coeff)) if coeff.size else float("nan"),
        "coefficient_min": float(coeff.min()) if coeff.size else float("nan"),
    }


def monitor_low_norm(times, values) -> dict:
    """Boundedness check: the second half never exceeds twice the first."""
    values = np.asarray(values, dtype=np.float64)
    half = len(values) // 2
    first = float(values[:half].max(initial=0.0))
    second = float(values[half:].max(initial=0.0))
    bounded = second <= 2.0 * max(first, 1e-300) or second == 0.0
    return {
        "verdict": "pass" if bounded else "fail",
        "max_first_half": first,
        "max_second_half": second,
    }


def xp_series(traj, p: float, k0: int) -> np.ndarray:
    """Running values of the global well-posedness accumulator.

    Six pieces: low-frequency energy norms (sup-in-time and time-integral at
    two regularities) plus the high-frequency ladder of ``a`` and of
    ``(u, H)``; sups and integrals are accumulated per block before the
    weighted block sums, so the series is nondecreasing by construction.
    """
    n = traj.states[0].grid.dim
    times = np.asarray(traj.times, dtype=np.float64)
    lo, hi = support_range(traj.states[0].grid)
    blocks = list(range(lo, hi + 1))

    # per-snapshot per-block L^p ladders for each field group
    def ladders(fields, pp):
        out = np.empty((len(traj.states), len(blocks)))
        for i, s in enumerate(traj.states):
            for bi, j in enumerate(blocks):
                out[i, bi] = sum(block_lp_norm(f(s), j, pp) for f in fields)
        return out

    l2 = ladders([lambda s: s.a, lambda s: s.u, lambda s: s.h], 2.0)
    lp_a = ladders([lambda s: s.a], p)
    lp_uh = ladders([lambda s: s.u, lambda s: s.h], p)

    jarr = np.array(blocks, dtype=np.float64)
    low_mask = jarr <= k0
    high_mask = ~low_mask

    def accumulate(ladder, s, mask, mode):
        w = 2.0 ** (jarr * s) * mask
        series = np.empty(len(times))
        if mode == "sup":
            run = np.maximum.accumulate(ladder, axis=0)
            series = (run * w).sum(axis=1)
        else:
            integ = np.zeros_like(ladder)
            for i in range(1, len(times)):
                integ[i] = integ[i - 1] + 0.5 * (times[i] - times[i - 1]) * (
                    ladder[i] + ladder[i - 1]
                )
            series = (integ * w).sum(axis=1)
        return series

    total = (
        accumulate(l2, n / 2.0 - 1.0, low_mask, "sup")
        + accumulate(l2, n / 2.0 + 1.0, low_mask, "int")
        + accumulate(lp_a, n / p, high_mask, "sup")
        + accumulate(lp_a, n / p, high_mask, "int")
        + accumulate(lp_uh, n / p - 1.0, high_mask, "sup")
        + accumulate(lp_uh, n / p + 1.0, high_mask, "int")
    )
    return total


def compute_xp(traj, p: float, k0: int) -> float:
    return float(xp_series(traj, p, k0)[-1])
