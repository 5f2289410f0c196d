"""Perturbation form of the compressible MHD system around a steady state.

State variables are the density perturbation ``a``, the velocity ``u`` and
the magnetic perturbation ``H`` (the field minus a unit background direction
``I``), nondimensionalized so that the reference density, the pressure slope
at it, the magnetic diffusivity, and ``2 mu + lambda`` are all one.  The
evolution splits into a constant-coefficient linear part and quadratic-order
sources assembled here in physical space with dealiasing.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .grid import (
    PhysicalField,
    SpectralField,
    TorusGrid,
    dealias,
    divergence,
    field_from_values,
    gradient,
    laplacian,
    transform_inverse,
    zero_field,
)

DENSITY_FLOOR = 0.1


class DensityFloorError(RuntimeError):
    """The density perturbation left the small-perturbation regime."""


@dataclass(frozen=True)
class MaterialParams:
    """Normalized material constants.

    ``2*mu_star + lambda_star = 1`` pins the longitudinal viscosity; the
    magnetic diffusivity is fixed to 1 and the pressure law is the power law
    ``P(rho) = rho^gamma_p / gamma_p`` (slope 1 at the reference density).
    """

    dim: int = 2
    mu_star: float = 0.25
    gamma_p: float = 2.0
    direction: tuple[float, ...] = (1.0, 0.0)
    viscosity_law: str = "constant"
    mu_slope: float = 0.0      # d mu / d rho for the affine law
    lambda_slope: float = 0.0  # d lambda / d rho for the affine law
    floor: float = DENSITY_FLOOR

    def __post_init__(self):
        if self.mu_star <= 0:
            raise ValueError("mu_star must be positive")
        if self.lambda_star + 2 * self.mu_star <= 0:
            raise ValueError("lambda_star + 2 mu_star must be positive")
        if self.gamma_p <= 1:
            raise ValueError("gamma_p must exceed 1")
        ivec = np.asarray(self.direction, dtype=np.float64)
        if ivec.shape != (self.dim,):
            raise ValueError("direction must have one component per dimension")
        if abs(np.linalg.norm(ivec) - 1.0) > 1e-12:
            raise ValueError("direction must be a unit vector")
        if self.viscosity_law not in ("constant", "affine"):
            raise ValueError("viscosity_law must be 'constant' or 'affine'")
        if self.viscosity_law == "constant" and (self.mu_slope or self.lambda_slope):
            raise ValueError("viscosity slopes require the affine law")

    @property
    def lambda_star(self) -> float:
        return 1.0 - 2.0 * self.mu_star

    @property
    def I(self) -> np.ndarray:
        return np.asarray(self.direction, dtype=np.float64)


def _check_floor(a_values: np.ndarray, floor: float):
    rho = 1.0 + a_values
    if rho.min() <= floor:
        idx = np.unravel_index(int(np.argmin(rho)), a_values.shape)
        loc = tuple(int(i) for i in idx)
        raise DensityFloorError(
            f"density 1+a = {rho.min():.6g} <= floor {floor} at lattice point {loc}"
        )


def composite_pi1(a: PhysicalField, params: MaterialParams) -> np.ndarray:
    """``a / (1+a)`` pointwise (vanishes at a = 0)."""
    _check_floor(a.values, params.floor)
    return a.values / (1.0 + a.values)


def composite_pi2(a: PhysicalField, params: MaterialParams) -> np.ndarray:
    """``P'(1+a)/(1+a) - 1`` for the power pressure law."""
    _check_floor(a.values, params.floor)
    return (1.0 + a.values) ** (params.gamma_p - 2.0) - 1.0


def composite_mu_tilde(a: PhysicalField, params: MaterialParams) -> np.ndarray:
    """``mu(1+a) - mu(1)``; identically zero for the constant law."""
    _check_floor(a.values, params.floor)
    return params.mu_slope * a.values


def composite_lambda_tilde(a: PhysicalField, params: MaterialParams) -> np.ndarray:
    _check_floor(a.values, params.floor)
    return params.lambda_slope * a.values


COMPOSITES = {
    "pi1": composite_pi1,
    "pi2": composite_pi2,
    "mu_tilde": composite_mu_tilde,
    "lambda_tilde": composite_lambda_tilde,
}


@dataclass
class State:
    """The perturbation triple ``(a, u, H)`` in spectral form."""

    a: SpectralField
    u: SpectralField
    h: SpectralField

    def __post_init__(self):
        if not (self.a.is_scalar and self.u.is_vector and self.h.is_vector):
            raise ValueError("state must hold a scalar a and vector u, H")
        if not (self.a.grid == self.u.grid == self.h.grid):
            raise ValueError("state fields must share one grid")

    @property
    def grid(self) -> TorusGrid:
        return self.a.grid

    def copy(self) -> "State":
        return State(self.a.copy(), self.u.copy(), self.h.copy())

    def scaled(self, s: float) -> "State":
        return State(self.a * s, self.u * s, self.h * s)

    def __add__(self, other: "State") -> "State":
        return State(self.a + other.a, self.u + other.u, self.h + other.h)

    def __sub__(self, other: "State") -> "State":
        return State(self.a - other.a, self.u - other.u, self.h - other.h)

    def max_div_h(self) -> float:
        scale = max(self.h.l2_norm(), 1e-300)
        return divergence(self.h).l2_norm() / scale

    def mean_a(self) -> float:
        # unitary DFT: coeffs(0) = mean * M^(dim/2)
        return float(self.a.mean_mode().real) / self.grid.points ** (self.grid.dim / 2)

    def validate(self, floor: float = DENSITY_FLOOR, div_tol: float = 1e-10):
        for name, f in (("a", self.a), ("u", self.u), ("H", self.h)):
            defect = f.hermitian_defect()
            scale = max(1.0, float(np.abs(f.coeffs).max(initial=0.0)))
            if defect > 1e-10 * scale:
                raise ValueError(f"{name} is not a real field (Hermitian defect {defect:.3e})")
        if self.max_div_h() > div_tol:
            raise ValueError(f"div H = {self.max_div_h():.3e} exceeds {div_tol}")
        _check_floor(transform_inverse(self.a, check_real=False).values.real, floor)


def zero_state(grid: TorusGrid) -> State:
    return State(zero_field(grid), zero_field(grid, (grid.dim,)), zero_field(grid, (grid.dim,)))


def _phys(f: SpectralField) -> np.ndarray:
    return transform_inverse(f, check_real=False).values


def _grad_components(f: SpectralField) -> np.ndarray:
    """Physical ``d_i f_j`` for a vector field, shape (dim, dim) + grid."""
    grid = f.grid
    out = np.empty((grid.dim, grid.dim) + grid.shape)
    for j in range(grid.dim):
        gj = gradient(SpectralField(grid, f.coeffs[j]))
        out[:, j] = _phys(gj)
    return out


def _workspace(state: State, work: dict | None) -> dict:
    """Shared physical-space transforms for one source evaluation.

    Passing the same dict to f, g and m skips the repeated inverse FFTs of
    the state and its gradients (the dict must belong to this exact state).
    """
    if work is None:
        work = {}
    if "a" not in work:
        work["a"] = _phys(state.a)
        work["u"] = _phys(state.u)
        work["h"] = _phys(state.h)
        work["grad_u"] = _grad_components(state.u)
        work["grad_h"] = _grad_components(state.h)
    return work


def apply_viscous_operator(u: SpectralField, params: MaterialParams) -> SpectralField:
    """``A u = mu* Lap u + (lambda* + mu*) grad div u`` in spectral form."""
    grid = u.grid
    lap = laplacian(u)
    gd = gradient(divergence(u))
    return params.mu_star * lap + (params.lambda_star + params.mu_star) * gd


def i_dot_grad(f: SpectralField, direction: np.ndarray) -> SpectralField:
    """Directional derivative ``(I . grad) f`` along a constant vector."""
    grid = f.grid
    from .grid import _ixi

    sym = np.tensordot(direction, _ixi(grid), axes=(0, 0))
    return SpectralField(grid, sym * f.coeffs)


def nonlinearity_f(state: State, rule: float = 2.0 / 3.0, work: dict | None = None) -> SpectralField:
    """``f = -div(a u)``; an exact divergence, so its spatial mean vanishes."""
    grid = state.grid
    work = _workspace(state, work)
    au = field_from_values(grid, work["a"][None] * work["u"])
    return dealias(-1.0 * divergence(au), rule)


def nonlinearity_g(state: State, params: MaterialParams, rule: float = 2.0 / 3.0,
                   work: dict | None = None) -> SpectralField:
    """Quadratic-and-higher sources of the velocity equation."""
    grid = state.grid
    work = _workspace(state, work)
    a_phys = PhysicalField(grid, work["a"])
    _check_floor(a_phys.values, params.floor)
    uv = work["u"]
    hv = work["h"]
    grad_u = work["grad_u"]   # [i, j] = d_i u_j
    grad_h = work["grad_h"]
    pi1 = composite_pi1(a_phys, params)
    pi2 = composite_pi2(a_phys, params)
    ivec = params.I

    # -u . grad u
    g = -np.einsum("j...,ji...->i...", uv, grad_u)
    # -pi1(a) A u
    g -= pi1[None] * _phys(apply_viscous_operator(state.u, params))
    # -pi2(a) grad a
    g -= pi2[None] * _phys(gradient(state.a))
    # density-dependent viscosity contribution
    if params.viscosity_law == "affine":
        mu_t = composite_mu_tilde(a_phys, params)
        la_t = composite_lambda_tilde(a_phys, params)
        du = 0.5 * (grad_u + np.swapaxes(grad_u, 0, 1))
        div_u_phys = np.einsum("ii...->...", grad_u)
        stress = 2.0 * mu_t[None, None] * du
        idx = np.arange(grid.dim)
        stress[idx, idx] += la_t[None] * div_u_phys[None]
        div_stress = divergence(field_from_values(grid, stress))
        g += _phys(div_stress) / (1.0 + a_phys.values)[None]
    # pi1(a) (grad(I.H) - I.grad H)
    ih = SpectralField(grid, np.tensordot(ivec, state.h.coeffs, axes=(0, 0)))
    coupling = _phys(gradient(ih)) - _phys(i_dot_grad(state.h, ivec))
    g += pi1[None] * coupling
    # -(1/(1+a)) (grad|H|^2 / 2 - H . grad H)
    h2 = field_from_values(grid, (hv**2).sum(axis=0))
    lorentz = 0.5 * _phys(gradient(h2)) - np.einsum("j...,ji...->i...", hv, grad_h)
    g -= lorentz / (1.0 + a_phys.values)[None]

    return dealias(field_from_values(grid, g), rule)


def nonlinearity_m(state: State, rule: float = 2.0 / 3.0, work: dict | None = None) -> SpectralField:
    """``m = -H div u + H . grad u - u . grad H``."""
    grid = state.grid
    work = _workspace(state, work)
    uv = work["u"]
    hv = work["h"]
    grad_u = work["grad_u"]
    grad_h = work["grad_h"]
    div_u = np.einsum("ii...->...", grad_u)
    m = -hv * div_u[None]
    m += np.einsum("j...,ji...->i...", hv, grad_u)
    m -= np.einsum("j...,ji...->i...", uv, grad_h)
    return dealias(field_from_values(grid, m), rule)


def linearized_rhs(state: State, params: MaterialParams) -> State:
    """Constant-coefficient part of the evolution, exactly in spectral form."""
    grid = state.grid
    ivec = params.I
    div_u = divergence(state.u)
    ih = SpectralField(grid, np.tensordot(ivec, state.h.coeffs, axes=(0, 0)))

    da = -1.0 * div_u
    du = (
        apply_viscous_operator(state.u, params)
        - gradient(state.a)
        - gradient(ih)
        + i_dot_grad(state.h, ivec)
    )
    dh_coeffs = (
        laplacian(state.h).coeffs
        - ivec.reshape((grid.dim,) + (1,) * grid.dim) * div_u.coeffs[None]
        + i_dot_grad(state.u, ivec).coeffs
    )
    return State(da, du, SpectralField(grid, dh_coeffs))


_HEADER = struct.Struct("<iidd")


def save_state(path, state: State, t: float = 0.0):
    """Binary snapshot: header (N, M, L, t), then a/u/H coefficients.

    Coefficients are written in lexicographic lattice order as little-endian
    64-bit floats with real and imaginary parts interleaved.
    """
    grid = state.grid
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(grid.dim, grid.points, grid.length, t))
        for f in (state.a, state.u, state.h):
            fh.write(np.ascontiguousarray(f.coeffs, dtype="<c16").tobytes())


def load_state(path) -> tuple[State, float]:
    with open(path, "rb") as fh:
        dim, points, length, t = _HEADER.unpack(fh.read(_HEADER.size))
        grid = TorusGrid(dim, points, length)
        n = points**dim

        def read(count):
            buf = fh.read(count * n * 16)
            arr = np.frombuffer(buf, dtype="<c16").astype(np.complex128)
            shape = ((count,) if count > 1 else ()) + grid.shape
            return arr.reshape(shape)

        a = SpectralField(grid, read(1))
        u = SpectralField(grid, read(dim))
        h = SpectralField(grid, read(dim))
    return State(a, u, h), t
