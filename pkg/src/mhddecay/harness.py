"""Randomized ratio harnesses for the product, commutator, composition,
heat-regularity and interpolation estimates.

None of the estimates comes with an explicit constant, so each check draws a
seeded ensemble of band-limited fields, evaluates the ratio of the bounded
side to the bounding side, and records the max/median together with a
resolution-doubling stability factor.  Doubling reuses the identical draws
(the generator is resolution-matched), so a diverging implied constant shows
up directly as a stability factor escaping ``[1/2, 2]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decay import validate_sigma1
from .dyadic import (
    BesovSpec,
    DyadicPartition,
    besov_norm,
    block_project_raw,
    chemin_lerner_norm,
    resolvable_range,
)
from .ensembles import profile_weights, random_scalar, random_vector
from .grid import (
    PhysicalField,
    SpectralField,
    TorusGrid,
    dealias,
    field_from_values,
    gradient,
    lambda_power,
    laplacian,
    pointwise_product,
    transform_inverse,
)
from .paraproduct import paraproduct, remainder


class ParameterRangeError(ValueError):
    """Estimate parameters violate the hypotheses of the inequality."""


@dataclass
class RatioReport:
    """Empirical constants of one estimate over a seeded ensemble."""

    estimate_id: str
    parameters: dict
    seed: int
    samples: int
    max_ratio: float
    median_ratio: float
    min_ratio: float
    resolution_stability: float

    def to_json(self) -> dict:
        return {
            "estimate_id": self.estimate_id,
            "parameters": self.parameters,
            "seed": self.seed,
            "samples": self.samples,
            "max_ratio": self.max_ratio,
            "median_ratio": self.median_ratio,
            "min_ratio": self.min_ratio,
            "resolution_stability": self.resolution_stability,
        }


def _collect(sample_fn, grid: TorusGrid, n_samples: int, seed: int) -> np.ndarray:
    ratios = []
    for i in range(n_samples):
        rng = np.random.default_rng([seed, i])
        r = sample_fn(grid, rng)
        ratios.extend(np.atleast_1d(r))
    arr = np.asarray(ratios, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise FloatingPointError("non-finite ratio in ensemble")
    return arr


def run_ratio_check(
    estimate_id: str,
    parameters: dict,
    sample_fn,
    grid: TorusGrid,
    n_samples: int,
    seed: int,
    doubled: bool = True,
) -> RatioReport:
    """Evaluate an estimate's ratios at the base grid and at doubled M."""
    base = _collect(sample_fn, grid, n_samples, seed)
    stability = float("nan")
    if doubled:
        fine = TorusGrid(grid.dim, 2 * grid.points, grid.length)
        ref = _collect(sample_fn, fine, n_samples, seed)
        stability = float(ref.max() / base.max())
    return RatioReport(
        estimate_id=estimate_id,
        parameters=parameters,
        seed=seed,
        samples=int(base.size),
        max_ratio=float(base.max()),
        median_ratio=float(np.median(base)),
        min_ratio=float(base.min()),
        resolution_stability=stability,
    )


def _pair(grid, rng, bins, profile="geometric"):
    w = profile_weights(bins, profile)
    f = random_scalar(grid, bins, rng, w)
    g = random_scalar(grid, bins, rng, w)
    return f, g


def _total(f: SpectralField, s: float, p: float, r: float) -> float:
    return besov_norm(f, BesovSpec(s, p, r)).total


# ---------------------------------------------------------------------------
# Bernstein-type and coercivity checks


def check_bernstein(
    grid: TorusGrid,
    bins: list[int],
    p: float,
    q: float,
    n_samples: int = 200,
    seed: int = 0,
) -> tuple[RatioReport, RatioReport]:
    """Derivative bounds on single-octave fields.

    Returns the upper report (``|grad f|_q`` against ``2^{j(1+N(1/p-1/q))}
    |f|_p``) and the two-sided annulus report at ``q = p`` (largest of the
    ratio and its inverse, so one finite max certifies both directions).
    """
    if q < p:
        raise ParameterRangeError("Bernstein embedding direction needs p <= q")
    n = grid.dim
    gain = 1.0 + n * (1.0 / p - 1.0 / q)

    def upper(g, rng):
        j = bins[int(rng.integers(len(bins)))]
        f = random_scalar(g, [j], rng)
        df = transform_inverse(gradient(f), check_real=False)
        fp = transform_inverse(f, check_real=False)
        grad_norm = max(
            PhysicalField(g, df.values[i]).lp_norm(q) for i in range(n)
        )
        return grad_norm / (2.0 ** (j * gain) * fp.lp_norm(p))

    def two_sided(g, rng):
        j = bins[int(rng.integers(len(bins)))]
        f = random_scalar(g, [j], rng)
        df = transform_inverse(gradient(f), check_real=False)
        fp = transform_inverse(f, check_real=False)
        grad_norm = max(
            PhysicalField(g, df.values[i]).lp_norm(p) for i in range(n)
        )
        r = grad_norm / (2.0**j * fp.lp_norm(p))
        return max(r, 1.0 / r)

    up = run_ratio_check(
        "bernstein-embedding", {"p": p, "q": q, "gain": gain}, upper, grid, n_samples, seed
    )
    two = run_ratio_check(
        "bernstein-annulus", {"p": p}, two_sided, grid, n_samples, seed + 1
    )
    return up, two


def bernstein_packet_exponent(grid: TorusGrid, bins: list[int], q: float = np.inf) -> float:
    """Measured octave-scaling exponent of ``|grad f|_q / |f|_2``.

    Uses concentrated wave packets (Gaussian envelope an octave wide in
    frequency), which saturate the embedding exponent ``1 + N/2`` for
    ``q = inf``, unlike generic random fields.
    """
    ratios = []
    for j in bins:
        xi_c = 1.5 * 2.0**j
        width = 0.2 * 2.0**j
        center = np.zeros(grid.dim)
        center[0] = xi_c
        d2 = ((grid.xi - center.reshape((-1,) + (1,) * grid.dim)) ** 2).sum(axis=0)
        env = np.exp(-d2 / (2.0 * width**2))
        env *= DyadicPartition.phi(grid.xi_norm / 2.0**j) > 0
        f = SpectralField(grid, env + 0j)
        sym = f.coeffs.copy()
        # hermitize to get a real packet
        for ax in range(grid.dim):
            sym = np.flip(np.roll(sym, -1, axis=ax), axis=ax)
        f = SpectralField(grid, 0.5 * (f.coeffs + np.conj(sym)))
        df = transform_inverse(gradient(f), check_real=False)
        num = max(PhysicalField(grid, df.values[i]).lp_norm(q) for i in range(grid.dim))
        ratios.append(num / f.l2_norm())
    slope = np.polyfit(np.array(bins, dtype=float), np.log2(ratios), 1)[0]
    return float(slope)


def check_coercivity(
    grid: TorusGrid,
    bins: list[int],
    p: float,
    n_samples: int = 200,
    seed: int = 0,
) -> RatioReport:
    """Lower dissipation bound ``-int Lap(f) |f|^{p-2} f >= c 2^{2j} ...``.

    The recorded ratio is the inverse coercivity constant, so a finite max
    certifies a uniform lower bound.
    """
    if not 1.0 < p < np.inf:
        raise ParameterRangeError("coercivity needs 1 < p < infinity")

    def sample(g, rng):
        j = bins[int(rng.integers(len(bins)))]
        f = random_scalar(g, [j], rng)
        fv = transform_inverse(f, check_real=False).values
        lap = transform_inverse(laplacian(f), check_real=False).values
        w = g.cell_volume
        dissipation = -w * (lap * np.abs(fv) ** (p - 2.0) * fv).sum()
        mass = w * (np.abs(fv) ** p).sum()
        lam2 = (2.0**j) ** 2
        return lam2 * ((p - 1.0) / p**2) * mass / dissipation

    return run_ratio_check(
        "lp-coercivity", {"p": p}, sample, grid, n_samples, seed
    )


# ---------------------------------------------------------------------------
# product estimates


def check_product_sobolev(
    grid: TorusGrid,
    bins: list[int],
    s1: float,
    s2: float,
    p1: float,
    p2: float,
    n_samples: int = 200,
    seed: int = 0,
) -> RatioReport:
    """Classical product bound ``|uv| <= C |u| |v|`` in the sum regularity."""
    n = grid.dim
    if not (1 <= p1 <= p2):
        raise ParameterRangeError("need 1 <= p1 <= p2")
    if s1 > n / p1 or s2 > n / p2:
        raise ParameterRangeError("need s1 <= N/p1 and s2 <= N/p2")
    if s1 + s2 <= 0:
        raise ParameterRangeError("need s1 + s2 > 0")

    def sample(g, rng):
        u, v = _pair(g, rng, bins)
        uv = pointwise_product(u, v)
        return _total(uv, s1 + s2 - n / p1, p2, 1.0) / (
            _total(u, s1, p1, 1.0) * _total(v, s2, p2, 1.0)
        )

    return run_ratio_check(
        "product-sum-regularity",
        {"s1": s1, "s2": s2, "p1": p1, "p2": p2},
        sample,
        grid,
        n_samples,
        seed,
    )


def check_product_weak(
    grid: TorusGrid,
    bins: list[int],
    sigma1: float,
    p: float,
    n_samples: int = 200,
    seed: int = 0,
) -> RatioReport:
    """Weak-norm product bound: multiplication by a critical-norm factor."""
    n = grid.dim
    validate_sigma1(n, p, sigma1)

    def sample(g, rng):
        f, h = _pair(g, rng, bins)
        fh = pointwise_product(f, h)
        return besov_norm(fh, BesovSpec(-sigma1, 2.0, np.inf)).total / (
            _total(f, n / p, p, 1.0) * besov_norm(h, BesovSpec(-sigma1, 2.0, np.inf)).total
        )

    return run_ratio_check(
        "product-weak-norm", {"sigma1": sigma1, "p": p}, sample, grid, n_samples, seed
    )


def check_product_weak_low(
    grid: TorusGrid,
    bins: list[int],
    sigma1: float,
    p: float,
    k0: int = 0,
    n_samples: int = 200,
    seed: int = 0,
) -> RatioReport:
    """Low-frequency product bound with the mixed right-hand side."""
    n = grid.dim
    validate_sigma1(n, p, sigma1)
    e1 = -sigma1 + n / p - n / 2.0 + 1.0
    e2 = -sigma1 + 2.0 * n / p - n + 1.0

    def sample(g, rng):
        f, h = _pair(g, rng, bins)
        fh = pointwise_product(f, h)
        num = besov_norm(fh, BesovSpec(-sigma1, 2.0, np.inf, k0)).low
        den = _total(f, n / p - 1.0, p, 1.0) * (
            besov_norm(h, BesovSpec(e1, p, np.inf)).total
            + besov_norm(h, BesovSpec(e2, p, np.inf)).total
        )
        return num / den

    return run_ratio_check(
        "product-weak-low",
        {"sigma1": sigma1, "p": p, "k0": k0},
        sample,
        grid,
        n_samples,
        seed,
    )


def check_product_weak_pair(
    grid: TorusGrid,
    bins: list[int],
    sigma1: float,
    p: float,
    n_samples: int = 200,
    seed: int = 0,
) -> tuple[RatioReport, RatioReport]:
    """Critical-factor multiplication in the two shifted weak norms."""
    n = grid.dim
    validate_sigma1(n, p, sigma1)
    reports = []
    for tag, e in (
        ("a", -sigma1 + n / p - n / 2.0 + 1.0),
        ("b", -sigma1 + 2.0 * n / p - n + 1.0),
    ):

        def sample(g, rng, e=e):
            f, h = _pair(g, rng, bins)
            fh = pointwise_product(f, h)
            return besov_norm(fh, BesovSpec(e, p, np.inf)).total / (
                _total(f, n / p, p, 1.0) * besov_norm(h, BesovSpec(e, p, np.inf)).total
            )

        reports.append(
            run_ratio_check(
                f"product-weak-shifted-{tag}",
                {"sigma1": sigma1, "p": p, "exponent": e},
                sample,
                grid,
                n_samples,
                seed,
            )
        )
    return reports[0], reports[1]


def check_paraproduct_energy(
    grid: TorusGrid,
    bins: list[int],
    s: float,
    p: float,
    n_samples: int = 200,
    seed: int = 0,
) -> RatioReport:
    """Paraproduct into the energy norm with a tunable regularity split."""
    n = grid.dim
    if not 2.0 <= p <= 4.0:
        raise ParameterRangeError("paraproduct energy bound needs 2 <= p <= 4")
    if s > 2.0 * n / p - n / 2.0:
        raise ParameterRangeError("need s <= 2N/p - N/2")

    def sample(g, rng):
        f, h = _pair(g, rng, bins)
        t = paraproduct(f, h)
        return _total(t, n / 2.0 - 1.0, 2.0, 1.0) / (
            _total(f, s, p, 1.0) * _total(h, -s + 2.0 * n / p - 1.0, p, 1.0)
        )

    return run_ratio_check(
        "paraproduct-energy", {"s": s, "p": p}, sample, grid, n_samples, seed
    )


def check_remainder_energy(
    grid: TorusGrid,
    bins: list[int],
    s: float,
    p: float,
    n_samples: int = 200,
    seed: int = 0,
) -> RatioReport:
    """Remainder into the energy norm under the same splitting."""
    n = grid.dim
    if n < 2:
        raise ParameterRangeError("remainder energy bound needs N >= 2")
    if not 2.0 <= p <= 4.0:
        raise ParameterRangeError("remainder energy bound needs 2 <= p <= 4")

    def sample(g, rng):
        f, h = _pair(g, rng, bins)
        r = remainder(f, h)
        return _total(r, n / 2.0 - 1.0, 2.0, 1.0) / (
            _total(f, s, p, 1.0) * _total(h, -s + 2.0 * n / p - 1.0, p, 1.0)
        )

    return run_ratio_check(
        "remainder-energy", {"s": s, "p": p}, sample, grid, n_samples, seed
    )


# ---------------------------------------------------------------------------
# commutator, composition, heat regularity


def commutator_blocks(
    v: SpectralField, a: SpectralField, js: list[int], rule: float = 2.0 / 3.0
) -> dict[int, float]:
    """Max over directions of ``|[v.grad, d_i block_j] a|`` in L2 per block."""
    grid = v.grid
    vv = transform_inverse(v, check_real=False).values
    grad_a = gradient(a)
    out = {}
    for j in js:
        best = 0.0
        for i in range(grid.dim):
            da_j = gradient(block_project_raw(a, j)).coeffs[i]
            term1 = np.einsum(
                "j...,j...->...",
                vv,
                transform_inverse(gradient(SpectralField(grid, da_j)), check_real=False).values,
            )
            v_dot_grad_a = np.einsum(
                "j...,j...->...", vv, transform_inverse(grad_a, check_real=False).values
            )
            inner = dealias(field_from_values(grid, v_dot_grad_a), rule)
            term2 = gradient(block_project_raw(inner, j)).coeffs[i]
            comm = dealias(field_from_values(grid, term1), rule) - SpectralField(grid, term2)
            best = max(best, comm.l2_norm())
        out[j] = best
    return out


def check_commutator(
    grid: TorusGrid,
    bins: list[int],
    sigma: float,
    p: float,
    p1: float,
    n_samples: int = 100,
    seed: int = 0,
) -> RatioReport:
    """Summability of the weighted commutator block norms (L2 flavor)."""
    n = grid.dim
    pprime = np.inf if p == 1 else p / (p - 1.0)
    lo = -min(n / p1, 0.0 if np.isinf(pprime) else n / pprime)
    hi = 1.0 + min(n / p, n / p1)
    if not lo < sigma <= hi:
        raise ParameterRangeError(
            f"commutator regularity window requires {lo} < sigma <= {hi}, got {sigma}"
        )
    if p != 2:
        raise ParameterRangeError("the harness evaluates the commutator bound at p = 2")
    js = bins

    def sample(g, rng):
        w = profile_weights(bins, "geometric")
        v = random_vector(g, bins, rng, w)
        a = random_scalar(g, bins, rng, w)
        blocks = commutator_blocks(v, a, js)
        den = besov_norm(
            SpectralField(g, np.stack([gradient(SpectralField(g, v.coeffs[i])).coeffs for i in range(g.dim)])),
            BesovSpec(n / p1, p1, 1.0),
        ).total * besov_norm(gradient(a), BesovSpec(sigma - 1.0, p, 1.0)).total
        return sum(c * 2.0 ** (j * (sigma - 1.0)) for j, c in blocks.items()) / den

    return run_ratio_check(
        "commutator-transport",
        {"sigma": sigma, "p": p, "p1": p1},
        sample,
        grid,
        n_samples,
        seed,
    )


def check_composition(
    grid: TorusGrid,
    bins: list[int],
    func,
    s: float,
    p: float,
    r: float,
    func_name: str = "custom",
    n_samples: int = 200,
    seed: int = 0,
    sup_bound: float = 0.5,
) -> RatioReport:
    """Besov-norm stability of a smooth function with ``F(0) = 0``."""
    if s <= 0:
        raise ParameterRangeError("composition bound needs s > 0")
    if abs(float(func(np.zeros(1))[0])) > 0:
        raise ParameterRangeError("composition requires F(0) = 0")

    def sample(g, rng):
        u = random_scalar(g, bins, rng, profile_weights(bins, "geometric"))
        uv = transform_inverse(u, check_real=False).values
        m = np.abs(uv).max()
        if m == 0.0:
            return 1.0
        uv = uv * (0.9 * sup_bound / m)
        if np.abs(uv).max() > sup_bound:
            raise ParameterRangeError("composition input exceeds the smallness regime")
        fu = field_from_values(g, np.asarray(func(uv), dtype=np.float64))
        un = field_from_values(g, uv)
        return _total(fu, s, p, r) / _total(un, s, p, r)

    return run_ratio_check(
        "composition", {"F": func_name, "s": s, "p": p, "r": r}, sample, grid, n_samples, seed
    )


def check_heat_regularity(
    grid: TorusGrid,
    bins: list[int],
    sigma: float,
    p: float,
    r: float,
    mu: float = 1.0,
    horizon: float = 4.0,
    n_times: int = 33,
    n_samples: int = 50,
    seed: int = 0,
) -> RatioReport:
    """Maximal-regularity ratio for the heat flow with steady forcing.

    Evolves ``u' - mu Lap u = f`` exactly per mode and compares the sup-in-
    time ladder of ``u`` against the data norm plus the time-integrated
    forcing ladder (the endpoint exponents rho1 = inf, rho2 = 1).
    """
    times = np.linspace(0.0, horizon, n_times)

    def sample(g, rng):
        u0 = random_scalar(g, bins, rng, profile_weights(bins, "geometric"))
        f0 = random_scalar(g, bins, rng, profile_weights(bins, "geometric"))
        r2 = g.xi_norm**2
        decay = lambda t: np.exp(-mu * r2 * t)  # noqa: E731
        driven = np.where(r2 > 0, 1.0 / (mu * np.maximum(r2, 1e-300)), 0.0)
        fields = [
            SpectralField(
                g, decay(t) * u0.coeffs + (1.0 - decay(t)) * driven * f0.coeffs
            )
            for t in times
        ]
        spec = BesovSpec(sigma, p, r)
        lhs = chemin_lerner_norm(fields, times, np.inf, spec)
        rhs = _total(u0, sigma, p, r) + chemin_lerner_norm(
            [f0] * len(times), times, 1.0, spec
        )
        return lhs / rhs

    return run_ratio_check(
        "heat-regularity",
        {"sigma": sigma, "p": p, "r": r, "mu": mu, "T": horizon},
        sample,
        grid,
        n_samples,
        seed,
    )


# ---------------------------------------------------------------------------
# interpolation inequalities


def _theta_from(j: float, m: float, rho: float, shift: float) -> float:
    if m == rho:
        raise ParameterRangeError("interpolation endpoints must differ (m != rho)")
    theta = (j + shift - m) / (rho - m)
    if not 0.0 < theta < 1.0:
        raise ParameterRangeError(
            f"interpolation exponent theta = {theta:.4f} must lie in (0, 1)"
        )
    return theta


def check_interpolation_split(
    grid: TorusGrid,
    bins: list[int],
    j: float,
    m: float,
    rho: float,
    r: float,
    p: float,
    k0: int = 0,
    n_samples: int = 200,
    seed: int = 0,
) -> tuple[RatioReport, RatioReport]:
    """Low/high-part interpolation between two weak norms."""
    n = grid.dim
    if not 1 <= r <= p:
        raise ParameterRangeError("interpolation needs 1 <= r <= p")
    theta = _theta_from(j, m, rho, n * (1.0 / r - 1.0 / p))
    reports = []
    for part in ("low", "high"):

        def sample(g, rng, part=part):
            f = random_scalar(g, bins, rng, profile_weights(bins, "geometric"))
            num = getattr(besov_norm(f, BesovSpec(j, p, 1.0, k0)), part)
            d1 = getattr(besov_norm(f, BesovSpec(m, r, np.inf, k0)), part)
            d2 = getattr(besov_norm(f, BesovSpec(rho, r, np.inf, k0)), part)
            return num / (d1 ** (1.0 - theta) * d2**theta)

        reports.append(
            run_ratio_check(
                f"interpolation-{part}",
                {"j": j, "m": m, "rho": rho, "r": r, "p": p, "theta": theta, "k0": k0},
                sample,
                grid,
                n_samples,
                seed,
            )
        )
    return reports[0], reports[1]


def check_interpolation_lebesgue(
    grid: TorusGrid,
    bins: list[int],
    l: float,
    m: float,
    k: float,
    q: float,
    r: float,
    n_samples: int = 200,
    seed: int = 0,
) -> RatioReport:
    """Fractional Gagliardo-Nirenberg interpolation between Lebesgue norms."""
    n = grid.dim
    if not 1 <= q <= r:
        raise ParameterRangeError("Lebesgue interpolation needs 1 <= q <= r")
    rinv = 0.0 if np.isinf(r) else 1.0 / r
    theta = _theta_from(l, m, k, n * (1.0 / q - rinv))

    def sample(g, rng):
        f = random_scalar(g, bins, rng, profile_weights(bins, "geometric"))
        num = transform_inverse(lambda_power(f, l), check_real=False)
        dm = transform_inverse(lambda_power(f, m), check_real=False)
        dk = transform_inverse(lambda_power(f, k), check_real=False)
        return num.lp_norm(r) / (dm.lp_norm(q) ** (1.0 - theta) * dk.lp_norm(q) ** theta)

    return run_ratio_check(
        "interpolation-lebesgue",
        {"l": l, "m": m, "k": k, "q": q, "r": r, "theta": theta},
        sample,
        grid,
        n_samples,
        seed,
    )


# ---------------------------------------------------------------------------
# standard suite


def standard_suite(
    n_samples: int = 200,
    seed: int = 0,
    points: int = 64,
    length: float = 4.0 * np.pi,
    heat_samples: int | None = None,
    commutator_samples: int | None = None,
) -> list[RatioReport]:
    """The full set of estimate checks at their default parameter points."""
    grid = TorusGrid(2, points, length)
    j_min, j_max = resolvable_range(grid)
    bins = list(range(j_min, j_max + 1))
    n_heat = heat_samples if heat_samples is not None else max(n_samples // 4, 1)
    n_comm = commutator_samples if commutator_samples is not None else max(n_samples // 2, 1)

    def pi1(x):
        return x / (1.0 + x)

    reports: list[RatioReport] = []
    up, two = check_bernstein(grid, bins, 2.0, np.inf, n_samples, seed)
    reports += [up, two]
    reports.append(check_coercivity(grid, bins, 3.0, n_samples, seed + 2))
    reports.append(
        check_product_sobolev(grid, bins, 1.0, 0.5, 2.0, 2.0, n_samples, seed + 3)
    )
    a, b = check_product_weak_pair(grid, bins, 1.0 / 3.0, 3.0, n_samples, seed + 4)
    reports += [a, b]
    reports.append(check_product_weak(grid, bins, 1.0, 2.0, n_samples, seed + 5))
    reports.append(check_product_weak_low(grid, bins, 1.0, 2.0, 0, n_samples, seed + 6))
    reports.append(check_paraproduct_energy(grid, bins, 0.5, 2.0, n_samples, seed + 7))
    reports.append(check_remainder_energy(grid, bins, 0.5, 2.0, n_samples, seed + 8))
    reports.append(check_commutator(grid, bins, 1.0, 2.0, 2.0, n_comm, seed + 9))
    reports.append(
        check_composition(grid, bins, pi1, 1.0, 2.0, 1.0, "pi1", n_samples, seed + 10)
    )
    reports.append(
        check_heat_regularity(grid, bins, 0.5, 2.0, 1.0, 1.0, 4.0, 33, n_heat, seed + 11)
    )
    low, high = check_interpolation_split(
        grid, bins, 0.0, -1.0, 2.0, 2.0, 2.0, 0, n_samples, seed + 12
    )
    reports += [low, high]
    reports.append(
        check_interpolation_lebesgue(
            grid, bins, -0.6, 0.0, -0.9, 2.0, 4.0, n_samples, seed + 13
        )
    )
    return reports
