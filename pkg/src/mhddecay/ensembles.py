"""Seeded random band-limited fields for inequality harnesses and initial data.

Fields are assembled bin by bin over octaves ``|xi| in [2^j, 2^{j+1})`` with
complex Gaussian coefficients drawn in a canonical mode order.  The order
depends only on the integer wavevectors, so doubling the grid resolution
(same box length, same seed) reproduces the identical function whenever the
requested bins fit on the coarser lattice: resolution-stability checks then
compare like with like.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .grid import SpectralField, TorusGrid, leray_project, zero_field

#: per-block norm profiles for the stock ensembles
PROFILES = ("flat", "geometric", "single")


@lru_cache(maxsize=None)
def _octave_modes(grid: TorusGrid, j: int) -> tuple[np.ndarray, np.ndarray]:
    """Canonical-half lattice modes with ``2^j <= |xi| < 2^{j+1}``.

    Returns flat indices of the selected modes and of their conjugate
    partners, sorted by integer wavevector.  Modes on the unmatched Nyquist
    planes or beyond the 2/3 dealiasing ball are excluded.
    """
    k = grid.wavenumbers
    mesh = np.meshgrid(*([k] * grid.dim), indexing="ij")
    kvec = np.stack([m.reshape(-1) for m in mesh], axis=1)
    r = grid.xi_norm.reshape(-1)
    cut = grid.points / 3.0
    ok = (r >= 2.0**j) & (r < 2.0 ** (j + 1))
    ok &= np.all(np.abs(kvec) <= cut + 1e-12, axis=1)
    # canonical half: first nonzero component positive
    lead = np.zeros(len(kvec))
    for axis in range(grid.dim):
        col = kvec[:, axis]
        lead = np.where(lead == 0, np.sign(col), lead)
    ok &= lead > 0
    sel = kvec[ok]
    order = np.lexsort(tuple(sel[:, axis] for axis in range(grid.dim - 1, -1, -1)))
    sel = sel[order]
    pos = np.ravel_multi_index((sel % grid.points).T, grid.shape)
    neg = np.ravel_multi_index(((-sel) % grid.points).T, grid.shape)
    return pos, neg


def octave_has_modes(grid: TorusGrid, j: int) -> bool:
    return _octave_modes(grid, j)[0].size > 0


def profile_weights(bins: list[int], profile: str, decay: float = 0.5) -> dict[int, float]:
    """Per-bin amplitude weights for the stock profiles."""
    if profile == "flat":
        return {j: 1.0 for j in bins}
    if profile == "geometric":
        j0 = min(bins)
        return {j: decay ** (j - j0) for j in bins}
    if profile == "single":
        return {bins[len(bins) // 2]: 1.0}
    raise ValueError(f"unknown profile {profile!r}; expected one of {PROFILES}")


def random_scalar(
    grid: TorusGrid,
    bins: list[int],
    rng: np.random.Generator,
    weights: dict[int, float] | None = None,
) -> SpectralField:
    """Mean-free real random field with unit-L2 octave components."""
    coeffs = np.zeros(grid.shape, dtype=np.complex128).reshape(-1)
    for j in sorted(bins):
        pos, neg = _octave_modes(grid, j)
        if pos.size == 0:
            raise ValueError(
                f"octave {j} carries no lattice modes for M={grid.points}, L={grid.length:g}"
            )
        z = rng.standard_normal(pos.size) + 1j * rng.standard_normal(pos.size)
        w = 1.0 if weights is None else weights.get(j, 0.0)
        if w == 0.0:
            continue
        scale = w / np.sqrt(2.0 * (np.abs(z) ** 2).sum() * grid.cell_volume)
        coeffs[pos] += scale * z
        coeffs[neg] += scale * np.conj(z)
    return SpectralField(grid, coeffs.reshape(grid.shape))


def random_vector(
    grid: TorusGrid,
    bins: list[int],
    rng: np.random.Generator,
    weights: dict[int, float] | None = None,
    divergence_free: bool = False,
) -> SpectralField:
    comps = [random_scalar(grid, bins, rng, weights).coeffs for _ in range(grid.dim)]
    v = SpectralField(grid, np.stack(comps))
    if divergence_free:
        v = leray_project(v)
    return v


def default_bins(grid: TorusGrid, lo: int | None = None, hi: int | None = None) -> list[int]:
    """Octaves that are populated and safely inside the dealiasing ball."""
    from .dyadic import resolvable_range

    j_min, j_max = resolvable_range(grid)
    lo = j_min if lo is None else lo
    hi = j_max if hi is None else hi
    return [j for j in range(lo, hi + 1) if octave_has_modes(grid, j)]


def random_state_fields(
    grid: TorusGrid,
    bins: list[int],
    amplitude: float,
    rng: np.random.Generator,
    profile: str = "geometric",
) -> tuple[SpectralField, SpectralField, SpectralField]:
    """Random (a, u, H) triple with div-free H, scaled to a rough amplitude."""
    w = profile_weights(bins, profile)
    a = random_scalar(grid, bins, rng, w)
    u = random_vector(grid, bins, rng, w)
    h = random_vector(grid, bins, rng, w, divergence_free=True)
    norm = max(a.l2_norm(), u.l2_norm(), h.l2_norm())
    if norm == 0.0:
        return a, u, h
    s = amplitude / norm
    return a * s, u * s, h * s


def zero_state_fields(grid: TorusGrid):
    return zero_field(grid), zero_field(grid, (grid.dim,)), zero_field(grid, (grid.dim,))
