"""Whole-space Besov norms of the linear semigroup by frequency quadrature.

The torus solver cannot reach the algebraic-in-time regime (its spectral gap
eventually forces exponential decay), so decay exponents are measured on the
continuum: initial data is prescribed as a radial amplitude times a
polarization, each frequency node is propagated exactly through the symbol,
and per-block L2 norms are frequency integrals over dyadically stratified
Gauss-Legendre shells.

Deterministic by construction: fixed node ordering, no randomness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .dyadic import BesovNorm, BesovSpec, DyadicPartition
from .model import MaterialParams
from .symbol import BatchedPropagator, build_symbols

_SPHERE_AREA = {2: 2.0 * np.pi, 3: 4.0 * np.pi}


@dataclass(frozen=True)
class RadialAmplitude:
    """``coeff * r^exponent`` on ``(0, r_max]``, zero beyond."""

    exponent: float
    r_max: float = 1.0
    coeff: float = 1.0

    def __call__(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=np.float64)
        out = np.zeros_like(r)
        inside = (r > 0) & (r <= self.r_max)
        out[inside] = self.coeff * r[inside] ** self.exponent
        return out


def low_frequency_amplitude(sigma1: float, dim: int, r_max: float = 1.0) -> RadialAmplitude:
    """Amplitude ``r^(sigma1 - N/2)``: flat block ladder in the ``-sigma1`` norm."""
    return RadialAmplitude(exponent=sigma1 - dim / 2.0, r_max=r_max)


#: polarizations of the initial data; all are invariant under rotations about
#: the background direction, which lets the 3D azimuth integral collapse
POLARIZATIONS = ("acoustic-magnetic", "acoustic", "magnetic")


def _transverse_unit(xi: np.ndarray, ivec: np.ndarray) -> np.ndarray:
    """Unit vectors orthogonal to xi (2D) resp. to xi and I (3D)."""
    n = xi.shape[1]
    if n == 2:
        perp = np.stack([-xi[:, 1], xi[:, 0]], axis=1)
    else:
        perp = np.cross(xi, ivec[None, :])
    norm = np.linalg.norm(perp, axis=1, keepdims=True)
    if np.any(norm < 1e-14):
        raise ValueError("transverse polarization degenerate at a node parallel to I")
    return perp / norm


def initial_vectors(
    xi: np.ndarray, amplitude: RadialAmplitude, params: MaterialParams,
    polarization: str = "acoustic-magnetic",
) -> np.ndarray:
    """Initial coefficient vectors ``(K, 2N+1)`` at the quadrature nodes."""
    if polarization not in POLARIZATIONS:
        raise ValueError(f"unknown polarization {polarization!r}")
    n = params.dim
    r = np.linalg.norm(xi, axis=1)
    rho = amplitude(r)
    z0 = np.zeros((xi.shape[0], 2 * n + 1), dtype=np.complex128)
    if polarization in ("acoustic-magnetic", "acoustic"):
        z0[:, 0] = rho
    if polarization in ("acoustic-magnetic", "magnetic"):
        z0[:, n + 1 :] = rho[:, None] * _transverse_unit(xi, params.I)
    return z0


@dataclass
class QuadratureProfile:
    """Dyadically stratified radial-angular nodes on a frequency shell.

    Radial Gauss-Legendre panels sit between consecutive dyadic breakpoints
    ``(3/4) 2^j`` (clipped to the amplitude support), so each dyadic annulus
    is covered by at least two panels.  Angles are a uniform ring in 2D and a
    Gauss-Legendre-in-cos(theta) times uniform-azimuth product in 3D.
    """

    dim: int
    j_lo: int
    j_hi: int
    amplitude: RadialAmplitude
    n_radial: int = 32
    n_angular: int = 64
    n_polar: int = 32
    n_azimuth: int = 64
    polarization: str = "acoustic-magnetic"
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if self.j_hi < self.j_lo:
            raise ValueError("empty block range")
        if self.n_radial < 32:
            raise ValueError("need at least 32 radial nodes per dyadic panel")

    def radial_nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights on the covered radial interval."""
        if "radial" in self._cache:
            return self._cache["radial"]
        breaks = [0.75 * 2.0**j for j in range(self.j_lo, self.j_hi + 3)]
        top = self.amplitude.r_max
        edges = sorted({b for b in breaks if b < top} | {min(breaks[-1], top)})
        x, w = leggauss(self.n_radial)
        rs, ws = [], []
        for a, b in zip(edges[:-1], edges[1:]):
            rs.append(0.5 * (b - a) * x + 0.5 * (a + b))
            ws.append(0.5 * (b - a) * w)
        r = np.concatenate(rs)
        wr = np.concatenate(ws)
        self._cache["radial"] = (r, wr)
        return r, wr

    def angular_nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Unit directions and weights summing to the sphere area.

        In 3D the azimuth factor is collapsed to ``2 pi`` (all supported
        polarizations make the integrand azimuth-invariant about I); the
        directions returned live in a frame aligned with I.
        """
        if "angular" in self._cache:
            return self._cache["angular"]
        if self.dim == 2:
            th = 2.0 * np.pi * np.arange(self.n_angular) / self.n_angular
            dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
            wa = np.full(self.n_angular, 2.0 * np.pi / self.n_angular)
        else:
            mu, wmu = leggauss(self.n_polar)
            s = np.sqrt(1.0 - mu**2)
            dirs = np.stack([s, np.zeros_like(mu), mu], axis=1)
            wa = wmu * 2.0 * np.pi
        self._cache["angular"] = (dirs, wa)
        return dirs, wa

    def nodes(self, ivec: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Frequency nodes ``(K, N)`` and measure weights ``w r^{N-1}``.

        Directions are rotated so the angular frame's last axis maps to the
        background direction ``ivec``.
        """
        r, wr = self.radial_nodes()
        dirs, wa = self.angular_nodes()
        rot = _frame_to(ivec)
        dirs = dirs @ rot.T
        xi = r[:, None, None] * dirs[None, :, :]
        w = wr[:, None] * wa[None, :] * r[:, None] ** (self.dim - 1)
        return xi.reshape(-1, self.dim), w.reshape(-1)

    def blocks(self) -> list[int]:
        return list(range(self.j_lo, self.j_hi + 1))

    def gaussian_check(self) -> float:
        """Relative quadrature error on anisotropy-weighted Gaussian shells."""
        r, wr = self.radial_nodes()
        dirs, wa = self.angular_nodes()
        w = wr[:, None] * wa[None, :] * r[:, None] ** (self.dim - 1)
        a = 0.75 * 2.0**self.j_lo
        b = min(self.amplitude.r_max, 0.75 * 2.0 ** (self.j_hi + 2))
        n = self.dim
        gauss = np.exp(-(r**2))
        radial_exact = 0.5 * _gamma_inc(n / 2.0, a**2, b**2)
        errs = []
        # isotropic Gaussian over the covered shell
        got = float((w * gauss[:, None]).sum())
        exact = _SPHERE_AREA[n] * radial_exact
        errs.append(abs(got - exact) / abs(exact))
        # anisotropic direction weight (spherical mean of (e . xi/r)^2 is 1/N)
        axis = dirs[:, -1] ** 2
        got = float((w * gauss[:, None] * axis[None, :]).sum())
        errs.append(abs(got - exact / n) / abs(exact / n))
        return max(errs)


def _gamma_inc(s: float, a2: float, b2: float) -> float:
    from scipy.special import gamma, gammainc

    return gamma(s) * (gammainc(s, b2) - gammainc(s, a2))


def _frame_to(ivec: np.ndarray) -> np.ndarray:
    """Rotation whose last column is the unit vector ``ivec``."""
    ivec = np.asarray(ivec, dtype=np.float64)
    n = ivec.shape[0]
    if abs(np.linalg.norm(ivec) - 1.0) > 1e-12:
        raise ValueError("background direction must be a unit vector")
    basis = [ivec]
    for k in range(n):
        e = np.eye(n)[k]
        v = e - sum((e @ b) * b for b in basis)
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            basis.append(v / nv)
        if len(basis) == n:
            break
    rot = np.stack(basis[1:] + [ivec], axis=1)
    return rot


class SemigroupOracle:
    """Exact linear evolution of continuum initial data on quadrature nodes."""

    def __init__(self, profile: QuadratureProfile, params: MaterialParams):
        if profile.dim != params.dim:
            raise ValueError("profile and params dimensions differ")
        self.profile = profile
        self.params = params
        self.xi, self.weights = profile.nodes(params.I)
        self.z0 = initial_vectors(
            self.xi, profile.amplitude, params, profile.polarization
        )
        self.propagator = BatchedPropagator(build_symbols(self.xi, params))
        r = np.linalg.norm(self.xi, axis=1)
        self._phi2 = {
            j: DyadicPartition.phi(r / 2.0**j) ** 2 for j in profile.blocks()
        }

    def block_norms(self, t: float) -> dict[int, float]:
        """``|block_j z(t)|_{L^2}`` for every block of the profile."""
        z = self.propagator.apply(t, self.z0)
        dens = self.weights * (np.abs(z) ** 2).sum(axis=1)
        return {
            j: float(np.sqrt(max((dens * phi2).sum(), 0.0)))
            for j, phi2 in self._phi2.items()
        }

    def besov_norm(self, t: float, spec: BesovSpec) -> BesovNorm:
        """Besov norm of the propagated data; continuum engine is L2-only."""
        if spec.p != 2:
            raise ValueError("the continuum oracle only evaluates p = 2 block norms")
        blocks = {
            j: 2.0 ** (j * spec.s) * v for j, v in self.block_norms(t).items()
        }
        vals = np.array(list(blocks.values()))
        agg = (lambda a: float(a.max())) if np.isinf(spec.r) else (
            lambda a: float((a**spec.r).sum() ** (1.0 / spec.r))
        )
        low = [v for j, v in blocks.items() if j <= spec.k0]
        high = [v for j, v in blocks.items() if j > spec.k0]
        return BesovNorm(
            spec=spec,
            block_norms=blocks,
            total=agg(vals),
            low=agg(np.array(low)) if low else 0.0,
            high=agg(np.array(high)) if high else 0.0,
        )

    def decay_series(self, times: np.ndarray, spec: BesovSpec):
        """Besov totals over a time grid plus the per-block ladder."""
        times = np.asarray(times, dtype=np.float64)
        totals = np.empty(len(times))
        ladder: list[tuple[float, int, float]] = []
        for i, t in enumerate(times):
            bn = self.besov_norm(float(t), spec)
            totals[i] = bn.total
            ladder.extend((float(t), j, v) for j, v in sorted(bn.block_norms.items()))
        return totals, ladder


def default_profile(
    dim: int,
    sigma1: float,
    j_lo: int = -16,
    j_hi: int = 1,
    polarization: str = "acoustic-magnetic",
    n_radial: int = 32,
) -> QuadratureProfile:
    return QuadratureProfile(
        dim=dim,
        j_lo=j_lo,
        j_hi=j_hi,
        amplitude=low_frequency_amplitude(sigma1, dim),
        polarization=polarization,
        n_radial=n_radial,
    )


def heat_block_norms(
    profile: QuadratureProfile, times: np.ndarray, diffusivity: float = 1.0
) -> dict[int, np.ndarray]:
    """Scalar heat semigroup on the same nodes (closed-form decay oracle)."""
    r, wr = profile.radial_nodes()
    dirs, wa = profile.angular_nodes()
    w = (wr[:, None] * wa[None, :] * r[:, None] ** (profile.dim - 1)).reshape(-1)
    rr = np.repeat(r, len(dirs))
    rho2 = profile.amplitude(rr) ** 2
    out = {}
    for j in profile.blocks():
        phi2 = DyadicPartition.phi(rr / 2.0**j) ** 2
        vals = [
            float(np.sqrt((w * phi2 * rho2 * np.exp(-2.0 * diffusivity * rr**2 * t)).sum()))
            for t in np.asarray(times)
        ]
        out[j] = np.array(vals)
    return out
