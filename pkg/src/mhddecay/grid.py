"""Periodic-lattice fields and Fourier-multiplier operators.

Fields live on a uniform torus lattice in 2 or 3 dimensions.  Spectral
coefficients use the unitary DFT convention, so the weighted lattice sums
of physical values and of coefficients agree (Parseval holds without extra
factors).  Real fields are stored full-complex with Hermitian symmetry.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


class GridMismatchError(ValueError):
    """Two fields from different grids were combined."""


class MeanModeError(ValueError):
    """A negative-order operator was applied to a field with nonzero mean."""


class SingularMultiplierError(ValueError):
    """A multiplier is singular at a mode carrying nonzero energy."""


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class TorusGrid:
    """Uniform periodic lattice on ``[0, L)^dim``.

    The frequency lattice is ``xi_k = 2*pi*k/L`` with integer wavenumbers
    ``k in [-M/2, M/2)`` per axis.
    """

    dim: int
    points: int
    length: float

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if not _is_power_of_two(self.points):
            raise ValueError(f"points must be a power of two, got {self.points}")
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points,) * self.dim

    @property
    def cell_volume(self) -> float:
        return (self.length / self.points) ** self.dim

    @property
    def volume(self) -> float:
        return self.length**self.dim

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Integer wavenumbers along one axis, FFT ordering."""
        return np.fft.fftfreq(self.points, d=1.0 / self.points).astype(np.int64)

    @cached_property
    def xi(self) -> np.ndarray:
        """Frequency vectors, shape ``(dim,) + shape``."""
        axes = [2.0 * np.pi * self.wavenumbers / self.length] * self.dim
        return np.array(np.meshgrid(*axes, indexing="ij"))

    @cached_property
    def xi_norm(self) -> np.ndarray:
        return np.sqrt((self.xi**2).sum(axis=0))

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        """True where any axis sits at the unmatched wavenumber -M/2."""
        k = self.wavenumbers
        mask = np.zeros(self.shape, dtype=bool)
        for axis in range(self.dim):
            sl = [slice(None)] * self.dim
            sl[axis] = k == -(self.points // 2)
            mask[tuple(sl)] = True
        return mask

    def coordinates(self) -> np.ndarray:
        """Collocation points, shape ``(dim,) + shape``."""
        ax = self.length * np.arange(self.points) / self.points
        return np.array(np.meshgrid(*([ax] * self.dim), indexing="ij"))

    def dealias_mask(self, rule: float = 2.0 / 3.0) -> np.ndarray:
        """True where every ``|k_i| <= rule * M/2``."""
        if not 0.0 < rule <= 1.0:
            raise ValueError(f"dealias rule must lie in (0, 1], got {rule}")
        cut = rule * self.points / 2.0
        keep = np.ones(self.shape, dtype=bool)
        k = self.wavenumbers
        for axis in range(self.dim):
            sl = [None] * self.dim
            sl[axis] = slice(None)
            keep &= np.abs(k)[tuple(sl)] <= cut + 1e-12
        return keep


def _check_same_grid(a, b):
    if a.grid != b.grid:
        raise GridMismatchError(f"grid mismatch: {a.grid} vs {b.grid}")


@dataclass
class PhysicalField:
    """Real values on the collocation lattice; leading axes give the rank."""

    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape[-self.grid.dim :] != self.grid.shape:
            raise ValueError("values shape does not match the grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite physical values")

    @property
    def rank_shape(self) -> tuple[int, ...]:
        return self.values.shape[: -self.grid.dim]

    def to_spectral(self) -> "SpectralField":
        return transform_forward(self)

    def lp_norm(self, p: float) -> float:
        """Lattice L^p norm of the pointwise (Euclidean) magnitude.

        Riemann sum on the collocation lattice; ``p = inf`` is the lattice
        max, a lower bound on the true sup.
        """
        mag = self.values.reshape((-1,) + self.grid.shape)
        mag = np.sqrt((mag**2).sum(axis=0))
        if np.isinf(p):
            return float(mag.max(initial=0.0))
        w = self.grid.cell_volume
        return float((w * (mag**p).sum()) ** (1.0 / p))


@dataclass
class SpectralField:
    """Complex Fourier coefficients, unitary convention; leading axes = rank."""

    grid: TorusGrid
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if self.coeffs.shape[-self.grid.dim :] != self.grid.shape:
            raise ValueError("coeffs shape does not match the grid")

    @property
    def rank_shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[: -self.grid.dim]

    @property
    def is_scalar(self) -> bool:
        return self.rank_shape == ()

    @property
    def is_vector(self) -> bool:
        return self.rank_shape == (self.grid.dim,)

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy())

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _check_same_grid(self, other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _check_same_grid(self, other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.grid, -self.coeffs)

    def mean_mode(self) -> np.ndarray:
        idx = (0,) * self.grid.dim
        return self.coeffs[(Ellipsis,) + idx]

    def is_mean_free(self, tol: float = 1e-13) -> bool:
        scale = max(1.0, float(np.abs(self.coeffs).max(initial=0.0)))
        return bool(np.abs(self.mean_mode()).max(initial=0.0) <= tol * scale)

    def l2_norm(self) -> float:
        """L^2(torus) norm read off the coefficients (Parseval)."""
        w = self.grid.cell_volume
        return float(np.sqrt(w * (np.abs(self.coeffs) ** 2).sum()))

    def hermitian_defect(self) -> float:
        """Max deviation from ``coeffs(-k) == conj(coeffs(k))``."""
        axes = tuple(range(-self.grid.dim, 0))
        flipped = self.coeffs
        for ax in axes:
            flipped = np.flip(np.roll(flipped, -1, axis=ax), axis=ax)
        return float(np.abs(self.coeffs - np.conj(flipped)).max(initial=0.0))

    def to_physical(self, check_real: bool = True) -> PhysicalField:
        return transform_inverse(self, check_real=check_real)


def transform_forward(f: PhysicalField) -> SpectralField:
    """Unitary DFT of a real lattice field."""
    n = f.grid.dim
    coeffs = np.fft.fftn(f.values, axes=tuple(range(-n, 0)), norm="ortho")
    return SpectralField(f.grid, coeffs)


def transform_inverse(f: SpectralField, check_real: bool = True) -> PhysicalField:
    """Inverse unitary DFT; the result is real for Hermitian input."""
    n = f.grid.dim
    values = np.fft.ifftn(f.coeffs, axes=tuple(range(-n, 0)), norm="ortho")
    if check_real:
        scale = max(1.0, float(np.abs(values).max(initial=0.0)))
        imag = float(np.abs(values.imag).max(initial=0.0))
        if imag > 1e-9 * scale:
            raise ValueError(
                f"inverse transform is not real (max imag {imag:.3e}); "
                "Hermitian symmetry is broken"
            )
    return PhysicalField(f.grid, values.real)


def field_from_values(grid: TorusGrid, values: np.ndarray) -> SpectralField:
    return transform_forward(PhysicalField(grid, values))


def zero_field(grid: TorusGrid, rank_shape: tuple[int, ...] = ()) -> SpectralField:
    return SpectralField(grid, np.zeros(rank_shape + grid.shape, dtype=np.complex128))


def apply_multiplier(f: SpectralField, m, zero_mode=None) -> SpectralField:
    """Apply a scalar Fourier multiplier ``m(xi)`` mode by mode.

    ``m`` maps the frequency array ``(dim,) + shape`` to a complex array on
    the grid shape.  The value at ``xi = 0`` must be supplied explicitly via
    ``zero_mode``; ``None`` demands a mean-free field (hard error otherwise,
    homogeneous operators are only defined up to polynomials).
    """
    sym = np.asarray(m(f.grid.xi), dtype=np.complex128)
    if sym.shape != f.grid.shape:
        raise ValueError("multiplier must return one value per lattice mode")
    idx = (0,) * f.grid.dim
    if zero_mode is None:
        if not f.is_mean_free():
            raise MeanModeError(
                "multiplier undefined at xi=0 but the field has a nonzero mean mode"
            )
        sym = sym.copy()
        sym[idx] = 0.0
    else:
        sym = sym.copy()
        sym[idx] = zero_mode
    bad = ~np.isfinite(sym)
    if bad.any():
        present = bad & (np.abs(f.coeffs).reshape((-1,) + f.grid.shape) > 0).any(axis=0)
        if present.any():
            where = np.argwhere(present)[0]
            k = f.grid.wavenumbers[where]
            raise SingularMultiplierError(
                f"multiplier singular at populated mode k={tuple(int(v) for v in k)}"
            )
        sym = np.where(bad, 0.0, sym)
    return SpectralField(f.grid, f.coeffs * sym)


def _ixi(grid: TorusGrid) -> np.ndarray:
    """``i*xi`` with the unmatched Nyquist modes zeroed (keeps fields real)."""
    ixi = 1j * grid.xi.copy()
    ixi[:, grid.nyquist_mask] = 0.0
    return ixi


def gradient(f: SpectralField) -> SpectralField:
    """Gradient of a scalar field -> vector field."""
    if not f.is_scalar:
        raise ValueError("gradient expects a scalar field")
    return SpectralField(f.grid, _ixi(f.grid) * f.coeffs[None])


def divergence(f: SpectralField) -> SpectralField:
    """Divergence: vector -> scalar, matrix -> vector (contracts first index)."""
    ixi = _ixi(f.grid)
    if f.is_vector:
        return SpectralField(f.grid, (ixi * f.coeffs).sum(axis=0))
    if f.rank_shape == (f.grid.dim, f.grid.dim):
        return SpectralField(f.grid, (ixi[:, None] * f.coeffs).sum(axis=0))
    raise ValueError("divergence expects a vector or matrix field")


def curl(f: SpectralField) -> SpectralField:
    """Matrix curl ``(d_j v_i - d_i v_j)_{ij}`` of a vector field."""
    if not f.is_vector:
        raise ValueError("curl expects a vector field")
    ixi = _ixi(f.grid)
    # curl[i, j] = i xi_j v_i - i xi_i v_j
    c = ixi[None, :] * f.coeffs[:, None] - ixi[:, None] * f.coeffs[None, :]
    return SpectralField(f.grid, c)


def laplacian(f: SpectralField) -> SpectralField:
    return SpectralField(f.grid, -f.grid.xi_norm**2 * f.coeffs)


def _lambda_symbol(grid: TorusGrid, s: float) -> np.ndarray:
    r = grid.xi_norm.copy()
    idx = (0,) * grid.dim
    r[idx] = 1.0  # placeholder, zero mode handled by callers
    sym = r**s
    sym[idx] = 0.0
    return sym


def lambda_power(f: SpectralField, s: float) -> SpectralField:
    """Apply ``|xi|^s``; negative orders require a mean-free field."""
    if s < 0 and not f.is_mean_free():
        raise MeanModeError(
            f"Lambda^{s} requires a mean-free field (coeffs(0) != 0)"
        )
    sym = _lambda_symbol(f.grid, s)
    return SpectralField(f.grid, sym * f.coeffs)


def inverse_laplacian(f: SpectralField) -> SpectralField:
    """Apply ``(-Delta)^{-1} = |xi|^{-2}``; mean-free input required."""
    if not f.is_mean_free():
        raise MeanModeError("(-Delta)^{-1} requires a mean-free field")
    return lambda_power(f, -2.0)


def leray_project(u: SpectralField) -> SpectralField:
    """Leray projector ``Id + grad (-Delta)^{-1} div`` onto divergence-free fields.

    The mean mode is left untouched (constant vectors are divergence-free).
    """
    if not u.is_vector:
        raise ValueError("leray_project expects a vector field")
    grid = u.grid
    r2 = grid.xi_norm**2
    idx = (0,) * grid.dim
    r2safe = r2.copy()
    r2safe[idx] = 1.0
    xdotu = (grid.xi * u.coeffs).sum(axis=0)
    proj = u.coeffs - grid.xi * (xdotu / r2safe)[None]
    proj[(Ellipsis,) + idx] = u.coeffs[(Ellipsis,) + idx]
    return SpectralField(grid, proj)


def dealias(f: SpectralField, rule: float = 2.0 / 3.0) -> SpectralField:
    """Zero every mode with any ``|k_i| > rule * M/2``."""
    keep = f.grid.dealias_mask(rule)
    return SpectralField(f.grid, np.where(keep, f.coeffs, 0.0))


def pointwise_product(
    f: SpectralField, g: SpectralField, rule: float = 2.0 / 3.0
) -> SpectralField:
    """Physical-space product of two scalar fields, dealiased."""
    _check_same_grid(f, g)
    fv = f.to_physical(check_real=False).values
    gv = g.to_physical(check_real=False).values
    return dealias(field_from_values(f.grid, fv * gv), rule)
