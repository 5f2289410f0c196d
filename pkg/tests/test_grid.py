import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mhddecay.grid import (
    MeanModeError,
    PhysicalField,
    SingularMultiplierError,
    SpectralField,
    TorusGrid,
    apply_multiplier,
    curl,
    dealias,
    divergence,
    field_from_values,
    gradient,
    inverse_laplacian,
    lambda_power,
    laplacian,
    leray_project,
    transform_forward,
    transform_inverse,
)


def random_field(grid, rng):
    return PhysicalField(grid, rng.standard_normal(grid.shape))


def band_limited(grid, rng, cut=1.0 / 3.0):
    f = transform_forward(random_field(grid, rng))
    keep = np.ones(grid.shape, dtype=bool)
    k = grid.wavenumbers
    for ax in range(grid.dim):
        sl = [None] * grid.dim
        sl[ax] = slice(None)
        keep &= np.abs(k)[tuple(sl)] <= cut * grid.points / 2
    return SpectralField(grid, np.where(keep, f.coeffs, 0.0))


class TestGridBasics:
    def test_grid_validation(self):
        with pytest.raises(ValueError):
            TorusGrid(4, 32, 1.0)
        with pytest.raises(ValueError):
            TorusGrid(2, 48, 1.0)  # not a power of two
        with pytest.raises(ValueError):
            TorusGrid(2, 32, -1.0)

    def test_frequency_lattice(self, grid2d):
        # xi = 2 pi k / L with k in [-M/2, M/2)
        assert grid2d.wavenumbers.min() == -16
        assert grid2d.wavenumbers.max() == 15
        np.testing.assert_allclose(grid2d.xi[0][1, 0], 1.0)
        np.testing.assert_allclose(grid2d.xi[1][0, 3], 3.0)


class TestTransforms:
    def test_constant_field_only_zero_mode(self, grid2d):
        f = PhysicalField(grid2d, np.full(grid2d.shape, 2.5))
        spec = transform_forward(f)
        assert abs(spec.coeffs[0, 0] - 2.5 * grid2d.points) < 1e-12
        rest = spec.coeffs.copy()
        rest[0, 0] = 0
        assert np.abs(rest).max() < 1e-12

    def test_single_cosine_two_conjugate_modes(self, grid2d):
        x = grid2d.coordinates()
        spec = field_from_values(grid2d, np.cos(3 * x[0]))
        nz = np.argwhere(np.abs(spec.coeffs) > 1e-10)
        assert len(nz) == 2
        ks = sorted(grid2d.wavenumbers[i] for i, _ in nz)
        assert ks == [-3, 3]
        assert abs(spec.coeffs[3, 0] - np.conj(spec.coeffs[-3, 0])) < 1e-14

    def test_round_trip(self, grid2d, rng):
        f = random_field(grid2d, rng)
        back = transform_inverse(transform_forward(f))
        err = np.abs(back.values - f.values).max() / np.abs(f.values).max()
        assert err < 1e-12

    def test_parseval(self, grid3d, rng):
        f = random_field(grid3d, rng)
        spec = transform_forward(f)
        assert abs(spec.l2_norm() - f.lp_norm(2)) < 1e-12 * f.lp_norm(2)

    def test_hermitian_symmetry(self, grid2d, rng):
        spec = transform_forward(random_field(grid2d, rng))
        assert spec.hermitian_defect() < 1e-13

    def test_non_finite_rejected(self, grid2d):
        vals = np.zeros(grid2d.shape)
        vals[0, 0] = np.inf
        with pytest.raises(ValueError):
            PhysicalField(grid2d, vals)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**31 - 1))
    def test_round_trip_property(self, seed):
        grid = TorusGrid(2, 16, 2 * np.pi)
        f = random_field(grid, np.random.default_rng(seed))
        back = transform_inverse(transform_forward(f))
        assert np.abs(back.values - f.values).max() < 1e-12 * (
            1 + np.abs(f.values).max()
        )


class TestMultipliers:
    def test_identity(self, grid2d, rng):
        f = transform_forward(random_field(grid2d, rng))
        out = apply_multiplier(f, lambda xi: np.ones(xi.shape[1:]), zero_mode=1.0)
        np.testing.assert_allclose(out.coeffs, f.coeffs)

    def test_squared_modulus_on_single_mode(self, grid2d):
        x = grid2d.coordinates()
        f = field_from_values(grid2d, np.cos(2 * x[0]))
        out = apply_multiplier(
            f, lambda xi: (xi**2).sum(axis=0), zero_mode=0.0
        )
        np.testing.assert_allclose(out.coeffs, 4.0 * f.coeffs, atol=1e-12)

    def test_lambda_inverse_pair(self, grid2d, rng):
        f = band_limited(grid2d, rng)
        f.coeffs[0, 0] = 0.0
        out = lambda_power(lambda_power(f, 1.0), -1.0)
        err = np.abs(out.coeffs - f.coeffs).max()
        assert err < 1e-12 * np.abs(f.coeffs).max()

    def test_lambda_composition(self, grid2d, rng):
        f = band_limited(grid2d, rng)
        f.coeffs[0, 0] = 0.0
        one = lambda_power(lambda_power(f, 0.7), -1.3)
        two = lambda_power(f, -0.6)
        assert np.abs(one.coeffs - two.coeffs).max() < 1e-12 * np.abs(f.coeffs).max()

    def test_singular_multiplier_names_mode(self, grid2d):
        x = grid2d.coordinates()
        f = field_from_values(grid2d, np.cos(2 * x[0]))

        def bad(xi):
            r = np.sqrt((xi**2).sum(axis=0))
            with np.errstate(divide="ignore"):
                return 1.0 / (r - 2.0)

        with pytest.raises(SingularMultiplierError, match=r"k=\(2, 0\)|k=\(-2, 0\)"):
            apply_multiplier(f, bad, zero_mode=0.0)

    def test_mean_mode_requires_explicit_handling(self, grid2d):
        f = field_from_values(grid2d, np.ones(grid2d.shape))
        with pytest.raises(MeanModeError):
            apply_multiplier(f, lambda xi: (xi**2).sum(axis=0))


class TestDifferentialOps:
    def test_div_grad_is_laplacian(self, grid2d, rng):
        phi = band_limited(grid2d, rng)
        lhs = divergence(gradient(phi))
        rhs = laplacian(phi)
        assert np.abs(lhs.coeffs - rhs.coeffs).max() < 1e-12 * max(
            np.abs(rhs.coeffs).max(), 1.0
        )

    def test_curl_grad_zero(self, grid2d, rng):
        phi = band_limited(grid2d, rng)
        assert np.abs(curl(gradient(phi)).coeffs).max() < 1e-12

    def test_lambda_on_unit_mode(self, grid2d):
        x = grid2d.coordinates()
        f = field_from_values(grid2d, np.sin(x[1]))
        out = lambda_power(f, 1.0)
        assert np.abs(out.coeffs - f.coeffs).max() < 1e-13

    def test_negative_order_needs_mean_free(self, grid2d):
        f = field_from_values(grid2d, 1.0 + np.cos(grid2d.coordinates()[0]))
        with pytest.raises(MeanModeError):
            inverse_laplacian(f)
        with pytest.raises(MeanModeError):
            lambda_power(f, -0.5)

    def test_curl_convention(self, grid2d):
        # curl v = (d_j v_i - d_i v_j): for v = (sin y, 0) the (1,2) entry is
        # d_2 v_1 = cos y and the diagonal vanishes
        x = grid2d.coordinates()
        v = SpectralField(
            grid2d,
            np.stack(
                [
                    field_from_values(grid2d, np.sin(x[1])).coeffs,
                    np.zeros(grid2d.shape, dtype=complex),
                ]
            ),
        )
        c = transform_inverse(SpectralField(grid2d, curl(v).coeffs[0, 1]))
        np.testing.assert_allclose(c.values, np.cos(x[1]), atol=1e-12)
        assert np.abs(curl(v).coeffs[0, 0]).max() < 1e-14


class TestLeray:
    def test_gradient_killed(self, grid2d, rng):
        phi = band_limited(grid2d, rng)
        g = gradient(phi)
        assert np.abs(leray_project(g).coeffs).max() < 1e-12 * np.abs(g.coeffs).max()

    def test_divergence_free_fixed(self, grid2d, rng):
        u = SpectralField(
            grid2d, np.stack([band_limited(grid2d, rng).coeffs for _ in range(2)])
        )
        pu = leray_project(u)
        ppu = leray_project(pu)
        assert np.abs(ppu.coeffs - pu.coeffs).max() < 1e-12 * np.abs(pu.coeffs).max()
        assert divergence(pu).l2_norm() < 1e-12 * max(pu.l2_norm(), 1.0)

    def test_pointwise_orthogonality(self, grid2d, rng):
        u = SpectralField(
            grid2d, np.stack([band_limited(grid2d, rng).coeffs for _ in range(2)])
        )
        pu = leray_project(u)
        xi_dot = (grid2d.xi * pu.coeffs).sum(axis=0)
        assert np.abs(xi_dot).max() < 1e-12 * np.abs(u.coeffs).max()

    def test_mean_mode_untouched(self, grid2d):
        coeffs = np.zeros((2,) + grid2d.shape, dtype=complex)
        coeffs[0, 0, 0] = 3.0
        u = SpectralField(grid2d, coeffs)
        assert abs(leray_project(u).coeffs[0, 0, 0] - 3.0) < 1e-14


class TestDealias:
    def test_rule_one_is_identity(self, grid2d, rng):
        f = transform_forward(random_field(grid2d, rng))
        np.testing.assert_array_equal(dealias(f, 1.0).coeffs, f.coeffs)

    def test_low_mode_survives(self, grid2d):
        x = grid2d.coordinates()
        f = field_from_values(grid2d, np.cos(2 * x[0]))
        np.testing.assert_allclose(dealias(f).coeffs, f.coeffs, atol=1e-12)

    def test_product_against_exact_convolution(self):
        # two modes near the 2/3 cutoff on a small grid; the oracle evaluates
        # both factors by explicit exponential sums on a refined lattice, so
        # its product spectrum is alias-free
        grid = TorusGrid(2, 16, 2 * np.pi)
        fine = TorusGrid(2, 64, 2 * np.pi)

        def explicit_values(spec, target):
            k = target.coordinates()
            vals = np.zeros(target.shape, dtype=complex)
            for idx in np.argwhere(np.abs(spec.coeffs) > 0):
                kvec = grid.wavenumbers[list(idx)]
                phase = np.exp(1j * (kvec[0] * k[0] + kvec[1] * k[1]))
                vals += spec.coeffs[tuple(idx)] * phase / grid.points
            return vals.real

        x = grid.coordinates()
        f = field_from_values(grid, np.cos(5 * x[0] + 2 * x[1]))
        g = field_from_values(grid, np.cos(5 * x[0] - 3 * x[1]))
        prod = dealias(
            field_from_values(
                grid,
                transform_inverse(f).values * transform_inverse(g).values,
            )
        )
        exact = field_from_values(
            fine, explicit_values(f, fine) * explicit_values(g, fine)
        )
        keep = grid.dealias_mask()
        for idx in np.argwhere(keep):
            kvec = tuple(grid.wavenumbers[list(idx)])
            fine_idx = tuple(np.array(kvec) % fine.points)
            a = prod.coeffs[tuple(idx)] / grid.points
            b = exact.coeffs[fine_idx] / fine.points
            assert abs(a - b) < 1e-12, f"spurious energy at k={kvec}"
