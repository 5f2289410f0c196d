import numpy as np
import pytest
import sympy

from mhddecay.ensembles import default_bins, random_state_fields
from mhddecay.grid import (
    PhysicalField,
    SpectralField,
    TorusGrid,
    divergence,
    field_from_values,
    gradient,
    transform_inverse,
    zero_field,
)
from mhddecay.model import (
    DensityFloorError,
    MaterialParams,
    State,
    composite_lambda_tilde,
    composite_mu_tilde,
    composite_pi1,
    composite_pi2,
    linearized_rhs,
    load_state,
    nonlinearity_f,
    nonlinearity_g,
    nonlinearity_m,
    save_state,
    zero_state,
)


def small_state(grid, rng, amplitude=1e-2):
    a, u, h = random_state_fields(grid, default_bins(grid), amplitude, rng)
    return State(a, u, h)


class TestMaterialParams:
    def test_normalization_constraint(self):
        p = MaterialParams(dim=2, mu_star=0.3)
        assert abs(2 * p.mu_star + p.lambda_star - 1.0) < 1e-15

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            MaterialParams(dim=2, mu_star=-0.1)
        with pytest.raises(ValueError):
            MaterialParams(dim=2, gamma_p=1.0)
        with pytest.raises(ValueError):
            MaterialParams(dim=2, direction=(2.0, 0.0))
        with pytest.raises(ValueError):
            MaterialParams(dim=2, mu_slope=0.1)  # slope without affine law


class TestComposites:
    def test_vanish_at_zero(self, grid2d, params2d):
        a = PhysicalField(grid2d, np.zeros(grid2d.shape))
        for comp in (composite_pi1, composite_pi2, composite_mu_tilde, composite_lambda_tilde):
            assert np.abs(comp(a, params2d)).max() == 0.0

    def test_pi1_at_one(self, grid2d, params2d):
        a = PhysicalField(grid2d, np.ones(grid2d.shape))
        np.testing.assert_allclose(composite_pi1(a, params2d), 0.5)

    def test_pi2_against_symbolic_oracle(self, grid2d):
        # P(rho) = rho^g / g  =>  pi2(a) = P'(1+a)/(1+a) - 1
        for gamma in (2.0, 2.5, 1.4):
            params = MaterialParams(dim=2, gamma_p=gamma)
            rho = sympy.symbols("rho", positive=True)
            pressure = rho**gamma / gamma
            expr = sympy.diff(pressure, rho) / rho - 1
            oracle = sympy.lambdify(rho, expr, "numpy")
            vals = np.linspace(-0.5, 1.5, 41)
            for v in vals:
                a_field = PhysicalField(grid2d, np.full(grid2d.shape, v))
                got = composite_pi2(a_field, params)[0, 0]
                assert abs(got - oracle(1.0 + v)) < 1e-12 * max(1.0, abs(got))

    def test_affine_viscosity_law(self, grid2d):
        params = MaterialParams(
            dim=2, viscosity_law="affine", mu_slope=0.3, lambda_slope=-0.1
        )
        a = PhysicalField(grid2d, np.full(grid2d.shape, 0.2))
        np.testing.assert_allclose(composite_mu_tilde(a, params), 0.06)
        np.testing.assert_allclose(composite_lambda_tilde(a, params), -0.02)

    def test_density_floor_error_reports_location(self, grid2d, params2d):
        vals = np.zeros(grid2d.shape)
        vals[3, 7] = -0.95
        a = PhysicalField(grid2d, vals)
        with pytest.raises(DensityFloorError, match=r"\(3, 7\)"):
            composite_pi1(a, params2d)


class TestNonlinearities:
    def test_zero_state(self, grid2d, params2d):
        z = zero_state(grid2d)
        assert nonlinearity_f(z).l2_norm() == 0.0
        assert nonlinearity_g(z, params2d).l2_norm() == 0.0
        assert nonlinearity_m(z).l2_norm() == 0.0

    def test_f_vanishes_without_velocity(self, grid2d, params2d, rng):
        st = small_state(grid2d, rng)
        st = State(st.a, zero_field(grid2d, (2,)), st.h)
        assert nonlinearity_f(st).l2_norm() == 0.0

    def test_f_constant_density(self, grid2d, params2d, rng):
        # a = const c: f = -div(c u) = -c div u
        st = small_state(grid2d, rng)
        c = 0.03
        a_const = SpectralField(grid2d, np.zeros(grid2d.shape, dtype=complex))
        a_const.coeffs[0, 0] = c * grid2d.points ** (grid2d.dim / 2)
        st = State(a_const, st.u, st.h)
        f = nonlinearity_f(st)
        expect = -c * divergence(st.u)
        assert (f - expect).l2_norm() < 1e-12 * max(expect.l2_norm(), 1e-30)

    def test_f_mean_free(self, grid2d, params2d, rng):
        st = small_state(grid2d, rng)
        assert abs(nonlinearity_f(st).mean_mode()) < 1e-13

    def test_f_single_mode_convolution_oracle(self, params2d):
        # a and u each one cosine; -div(au) evaluated by hand
        grid = TorusGrid(2, 32, 2 * np.pi)
        x = grid.coordinates()
        a = field_from_values(grid, 0.01 * np.cos(x[0]))
        u_vals = np.stack([0.02 * np.cos(2 * x[1]), np.zeros(grid.shape)])
        u = field_from_values(grid, u_vals)
        st = State(a, u, zero_field(grid, (2,)))
        got = transform_inverse(nonlinearity_f(st)).values
        # d/dx of 0.0002 cos(x)cos(2y) is -0.0002 sin(x)cos(2y)
        expect = 0.0002 * np.sin(x[0]) * np.cos(2 * x[1])
        np.testing.assert_allclose(got, expect, atol=1e-15)

    def test_g_pure_velocity(self, grid2d, params2d, rng):
        # a = 0, H = 0: everything but the convective term drops out
        st = small_state(grid2d, rng)
        st = State(zero_field(grid2d), st.u, zero_field(grid2d, (2,)))
        g = nonlinearity_g(st, params2d)
        uv = transform_inverse(st.u, check_real=False).values
        expect = np.zeros_like(uv)
        for i in range(2):
            du_i = transform_inverse(
                gradient(SpectralField(grid2d, st.u.coeffs[i])), check_real=False
            ).values
            expect[i] = -(uv * du_i).sum(axis=0)
        from mhddecay.grid import dealias

        expect_f = dealias(field_from_values(grid2d, expect))
        assert (g - expect_f).l2_norm() < 1e-12 * max(expect_f.l2_norm(), 1e-30)

    def test_magnetic_trinomial_symmetry(self, grid2d, params2d, rng):
        # (1/(1+a)) (grad|H|^2/2 - H.grad H) == (1-pi1) H.((grad H)^T - grad H)
        st = small_state(grid2d, rng, amplitude=0.05)
        av = transform_inverse(st.a, check_real=False).values
        hv = transform_inverse(st.h, check_real=False).values
        grad_h = np.stack(
            [
                transform_inverse(
                    gradient(SpectralField(grid2d, st.h.coeffs[j])), check_real=False
                ).values
                for j in range(2)
            ],
            axis=1,
        )  # [i, j] = d_i h_j
        h2 = field_from_values(grid2d, (hv**2).sum(axis=0))
        lhs = (
            0.5 * transform_inverse(gradient(h2), check_real=False).values
            - np.einsum("j...,ji...->i...", hv, grad_h)
        ) / (1.0 + av)[None]
        pi1 = av / (1.0 + av)
        rhs = (1.0 - pi1)[None] * (
            np.einsum("j...,ij...->i...", hv, grad_h)
            - np.einsum("j...,ji...->i...", hv, grad_h)
        )
        scale = np.abs(lhs).max()
        assert np.abs(lhs - rhs).max() < 1e-10 * max(scale, 1e-30)

    def test_m_needs_both_fields(self, grid2d, params2d, rng):
        st = small_state(grid2d, rng)
        no_u = State(st.a, zero_field(grid2d, (2,)), st.h)
        no_h = State(st.a, st.u, zero_field(grid2d, (2,)))
        assert nonlinearity_m(no_u).l2_norm() == 0.0
        assert nonlinearity_m(no_h).l2_norm() == 0.0

    def test_m_term_by_term_oracle(self, params2d, rng):
        # every term in m evaluated through an explicit mode-sum convolution
        grid = TorusGrid(2, 32, 2 * np.pi)
        x = grid.coordinates()
        u = field_from_values(
            grid,
            0.01
            * np.stack([np.cos(x[0] + 2 * x[1]), np.sin(2 * x[0] - x[1])]),
        )
        h_raw = field_from_values(
            grid, 0.01 * np.stack([np.cos(3 * x[1]), np.cos(x[0])])
        )
        from mhddecay.grid import leray_project

        h = leray_project(h_raw)
        st = State(zero_field(grid), u, h)
        got = transform_inverse(nonlinearity_m(st)).values

        uv = transform_inverse(u, check_real=False).values
        hv = transform_inverse(h, check_real=False).values
        du = np.stack(
            [
                transform_inverse(
                    gradient(SpectralField(grid, u.coeffs[j])), check_real=False
                ).values
                for j in range(2)
            ],
            axis=1,
        )  # du[i, j] = d_i u_j
        dh = np.stack(
            [
                transform_inverse(
                    gradient(SpectralField(grid, h.coeffs[j])), check_real=False
                ).values
                for j in range(2)
            ],
            axis=1,
        )
        div_u = du[0, 0] + du[1, 1]
        expect = -hv * div_u[None]
        expect += np.einsum("j...,ji...->i...", hv, du)
        expect -= np.einsum("j...,ji...->i...", uv, dh)
        np.testing.assert_allclose(got, expect, atol=1e-14)


class TestLinearizedRhs:
    def test_zero(self, grid2d, params2d):
        out = linearized_rhs(zero_state(grid2d), params2d)
        assert out.a.l2_norm() == 0.0 and out.u.l2_norm() == 0.0

    def test_matches_symbol_modewise(self, grid2d, params2d, rng):
        from mhddecay.symbol import grid_symbols, state_to_stack

        st = small_state(grid2d, rng)
        rhs = linearized_rhs(st, params2d)
        stack = state_to_stack(st)
        symbols = grid_symbols(grid2d, params2d)
        expect = np.einsum("kij,kj->ki", symbols, stack)
        got = state_to_stack(rhs)
        # symbol path and field path agree except on empty Nyquist planes
        assert np.abs(got - expect).max() < 1e-12 * max(1.0, np.abs(expect).max())

    def test_single_mode_velocity_equation(self, grid2d, params2d):
        # curl-free single-mode u with a: du/dt = A u - grad a on that mode
        x = grid2d.coordinates()
        a = field_from_values(grid2d, 0.1 * np.cos(x[0]))
        st = State(a, zero_field(grid2d, (2,)), zero_field(grid2d, (2,)))
        rhs = linearized_rhs(st, params2d)
        expect = -1.0 * gradient(a)
        assert (rhs.u - expect).l2_norm() < 1e-13

    def test_mean_of_a_preserved(self, grid2d, params2d, rng):
        st = small_state(grid2d, rng)
        rhs = linearized_rhs(st, params2d)
        total = rhs.a + nonlinearity_f(st)
        assert abs(total.mean_mode()) < 1e-12

    def test_quadratic_smallness(self, grid2d, params2d, rng):
        st = small_state(grid2d, rng, amplitude=1.0)
        norms = {}
        for eps in (1e-3, 1e-4):
            s = st.scaled(eps)
            norms[eps] = (
                nonlinearity_g(s, params2d).l2_norm() / eps**2,
                nonlinearity_m(s).l2_norm() / eps**2,
            )
        for i in range(2):
            ratio = norms[1e-3][i] / norms[1e-4][i]
            assert abs(ratio - 1.0) < 0.01


class TestState:
    def test_validation(self, grid2d, rng):
        st = small_state(grid2d, rng)
        st.validate()
        bad_h = st.h.copy()
        bad_h.coeffs[0][2, 3] += 1.0  # breaks both symmetry and divergence
        with pytest.raises(ValueError):
            State(st.a, st.u, bad_h).validate()

    def test_serialization_roundtrip(self, grid2d, rng, tmp_path):
        st = small_state(grid2d, rng)
        path = tmp_path / "snap.bin"
        save_state(path, st, t=2.25)
        back, t = load_state(path)
        assert t == 2.25
        assert (back.a - st.a).l2_norm() == 0.0
        assert (back.u - st.u).l2_norm() == 0.0
        assert (back.h - st.h).l2_norm() == 0.0

    def test_serialization_layout(self, tmp_path):
        # header (N, M, L, t) then interleaved little-endian doubles
        import struct

        grid = TorusGrid(2, 4, 1.0)
        st = zero_state(grid)
        st.a.coeffs[1, 2] = 3.0 + 4.0j
        st.a.coeffs[-1, -2] = 3.0 - 4.0j
        path = tmp_path / "layout.bin"
        save_state(path, st, t=1.5)
        raw = path.read_bytes()
        dim, points, length, t = struct.unpack_from("<iidd", raw)
        assert (dim, points, length, t) == (2, 4, 1.0, 1.5)
        header = struct.calcsize("<iidd")
        floats = np.frombuffer(raw, dtype="<f8", offset=header)
        # a is stored first, C-order: mode (1, 2) sits at flat index 1*4+2
        assert floats[2 * (1 * 4 + 2)] == 3.0
        assert floats[2 * (1 * 4 + 2) + 1] == 4.0
        assert len(raw) == header + 5 * 16 * 16
