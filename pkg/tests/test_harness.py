import numpy as np
import pytest

from mhddecay.dyadic import BesovSpec, besov_norm, resolvable_range
from mhddecay.ensembles import profile_weights, random_scalar
from mhddecay.grid import TorusGrid, SpectralField, pointwise_product, zero_field
from mhddecay.harness import (
    ParameterRangeError,
    bernstein_packet_exponent,
    check_bernstein,
    check_coercivity,
    check_commutator,
    check_composition,
    check_heat_regularity,
    check_interpolation_lebesgue,
    check_interpolation_split,
    check_paraproduct_energy,
    check_product_sobolev,
    check_product_weak,
    check_product_weak_low,
    commutator_blocks,
    run_ratio_check,
)


@pytest.fixture
def hgrid():
    return TorusGrid(2, 64, 4 * np.pi)


@pytest.fixture
def hbins(hgrid):
    j0, j1 = resolvable_range(hgrid)
    return list(range(j0, j1 + 1))


class TestHarnessMechanics:
    def test_reports_are_finite_and_stable(self, hgrid, hbins):
        rep = check_product_weak(hgrid, hbins, 1.0, 2.0, n_samples=10, seed=1)
        assert np.isfinite(rep.max_ratio) and rep.max_ratio > 0
        assert rep.min_ratio > 0
        assert 0.5 <= rep.resolution_stability <= 2.0
        assert rep.samples == 10

    def test_determinism(self, hgrid, hbins):
        a = check_product_weak(hgrid, hbins, 1.0, 2.0, n_samples=5, seed=3)
        b = check_product_weak(hgrid, hbins, 1.0, 2.0, n_samples=5, seed=3)
        assert a.to_json() == b.to_json()

    def test_json_keys(self, hgrid, hbins):
        rep = check_coercivity(hgrid, hbins, 3.0, n_samples=5, seed=0)
        doc = rep.to_json()
        assert {
            "estimate_id", "parameters", "seed", "samples",
            "max_ratio", "median_ratio", "min_ratio", "resolution_stability",
        } == set(doc)

    def test_ratio_homogeneity(self, hgrid, hbins):
        # scaling f and g leaves every product ratio exactly invariant
        rng = np.random.default_rng(11)
        w = profile_weights(hbins, "geometric")
        f = random_scalar(hgrid, hbins, rng, w)
        g = random_scalar(hgrid, hbins, rng, w)

        def ratio(ff, gg):
            fg = pointwise_product(ff, gg)
            return besov_norm(fg, BesovSpec(-1.0, 2.0, np.inf)).total / (
                besov_norm(ff, BesovSpec(1.0, 2.0, 1.0)).total
                * besov_norm(gg, BesovSpec(-1.0, 2.0, np.inf)).total
            )

        r0 = ratio(f, g)
        r1 = ratio(37.0 * f, 0.003 * g)
        assert abs(r0 - r1) < 1e-12 * r0


class TestBernstein:
    def test_single_mode_unit_ratio(self, hgrid):
        # one lattice mode at |xi| = 2^j with p = q = 2: |grad f| = 2^j |f|
        x = hgrid.coordinates()
        f = SpectralField(hgrid, np.zeros(hgrid.shape, dtype=complex))
        from mhddecay.grid import field_from_values, gradient, transform_inverse

        f = field_from_values(hgrid, np.cos(2.0 * x[0]))  # |xi| = 2 = 2^1
        df = gradient(f)
        num = df.l2_norm()
        assert abs(num / (2.0 * f.l2_norm()) - 1.0) < 1e-12

    def test_reports(self, hgrid, hbins):
        up, two = check_bernstein(hgrid, hbins, 2.0, np.inf, n_samples=10, seed=5)
        assert np.isfinite(up.max_ratio)
        assert two.min_ratio >= 1.0  # folded two-sided ratio
        assert 0.5 <= two.resolution_stability <= 2.0

    def test_wrong_direction_rejected(self, hgrid, hbins):
        with pytest.raises(ParameterRangeError):
            check_bernstein(hgrid, hbins, np.inf, 2.0, n_samples=2, seed=0)

    def test_packet_exponent_near_embedding_gain(self):
        # concentrated packets see the full 1 + N/2 octave scaling
        grid = TorusGrid(2, 256, 2 * np.pi)
        slope = bernstein_packet_exponent(grid, [1, 2, 3, 4])
        assert abs(slope - 2.0) < 0.2


class TestParameterWindows:
    def test_product_sobolev_windows(self, hgrid, hbins):
        with pytest.raises(ParameterRangeError):
            check_product_sobolev(hgrid, hbins, 2.0, 0.5, 2.0, 2.0, 2, 0)  # s1 > N/p1
        with pytest.raises(ParameterRangeError):
            check_product_sobolev(hgrid, hbins, 0.5, -0.5, 2.0, 2.0, 2, 0)  # sum <= 0

    def test_weak_product_window(self, hgrid, hbins):
        from mhddecay.decay import RateConstraintError

        with pytest.raises(RateConstraintError):
            check_product_weak(hgrid, hbins, 1.5, 2.0, 2, 0)

    def test_paraproduct_window(self, hgrid, hbins):
        with pytest.raises(ParameterRangeError):
            check_paraproduct_energy(hgrid, hbins, 1.5, 2.0, 2, 0)  # s too large

    def test_commutator_window(self, hgrid, hbins):
        with pytest.raises(ParameterRangeError):
            check_commutator(hgrid, hbins, 3.0, 2.0, 2.0, 2, 0)

    def test_interpolation_theta_window(self, hgrid, hbins):
        with pytest.raises(ParameterRangeError):
            check_interpolation_split(hgrid, hbins, 3.0, -1.0, 2.0, 2.0, 2.0)
        with pytest.raises(ParameterRangeError):
            check_interpolation_lebesgue(hgrid, hbins, 0.5, 0.0, 0.0, 2.0, 4.0)

    def test_composition_window(self, hgrid, hbins):
        with pytest.raises(ParameterRangeError):
            check_composition(hgrid, hbins, lambda x: x, -0.5, 2.0, 1.0, "id", 2, 0)
        with pytest.raises(ParameterRangeError):
            check_composition(
                hgrid, hbins, lambda x: x + 1.0, 1.0, 2.0, 1.0, "affine", 2, 0
            )


class TestCommutator:
    def test_constant_advection_commutes(self, hgrid, hbins):
        rng = np.random.default_rng(7)
        a = random_scalar(hgrid, hbins, rng)
        v = zero_field(hgrid, (2,))
        v.coeffs[0, 0, 0] = 1.5 * hgrid.points  # constant velocity (1.5, 0)
        blocks = commutator_blocks(v, a, hbins)
        scale = a.l2_norm()
        assert max(blocks.values()) < 1e-10 * scale

    def test_random_ensemble_summable(self, hgrid, hbins):
        rep = check_commutator(hgrid, hbins, 1.0, 2.0, 2.0, n_samples=8, seed=2)
        assert np.isfinite(rep.max_ratio)
        assert 0.5 <= rep.resolution_stability <= 2.0


class TestComposition:
    def test_identity_gives_unit_ratio(self, hgrid, hbins):
        rep = check_composition(
            hgrid, hbins, lambda x: x, 1.0, 2.0, 1.0, "identity", n_samples=5, seed=1
        )
        assert abs(rep.max_ratio - 1.0) < 1e-10
        assert abs(rep.min_ratio - 1.0) < 1e-10

    def test_pi1_bounded(self, hgrid, hbins):
        rep = check_composition(
            hgrid, hbins, lambda x: x / (1.0 + x), 1.0, 2.0, 1.0, "pi1",
            n_samples=10, seed=3,
        )
        assert rep.max_ratio < 10.0
        assert 0.5 <= rep.resolution_stability <= 2.0


class TestTwoBlockOracle:
    def test_weak_product_ratio_closed_form(self, hgrid):
        # single cosines at |xi| = 1 and |xi| = 8: all norms evaluate by
        # direct lattice arithmetic, independent of the package norm code
        x = hgrid.coordinates()
        from mhddecay.grid import field_from_values, transform_inverse

        sigma1, p, n = 1.0, 2.0, 2
        f = field_from_values(hgrid, np.cos(8.0 * x[0]))
        g = field_from_values(hgrid, np.cos(1.0 * x[1]))

        def lattice_l2(vals):
            return float(np.sqrt(hgrid.cell_volume * (vals**2).sum()))

        def oracle_weak_norm(modes, s):
            # sup_j 2^{js} |block_j|: blocks weight each mode by phi
            from mhddecay.dyadic import DyadicPartition

            best = 0.0
            for j in range(-6, 7):
                tot = 0.0
                for r, amp in modes:
                    w = DyadicPartition.phi(r / 2.0**j)
                    tot += (w * amp) ** 2
                best = max(best, 2.0 ** (j * s) * np.sqrt(tot))
            return best

        vol = hgrid.volume
        # |cos(k.x)|_2 = sqrt(vol/2); the product splits into two cosines
        # at |xi| = sqrt(65) with amplitude 1/2 each
        amp = np.sqrt(vol / 2.0)
        expected_num = oracle_weak_norm(
            [(np.sqrt(65.0), 0.5 * amp), (np.sqrt(65.0), 0.5 * amp)], -sigma1
        )
        f_norm = 0.0
        for j in range(-6, 7):
            from mhddecay.dyadic import DyadicPartition

            f_norm += 2.0 ** (j * n / p) * DyadicPartition.phi(8.0 / 2.0**j) * amp
        g_weak = oracle_weak_norm([(1.0, amp)], -sigma1)
        expected = expected_num / (f_norm * g_weak)

        fg = pointwise_product(f, g)
        got = besov_norm(fg, BesovSpec(-sigma1, 2.0, np.inf)).total / (
            besov_norm(f, BesovSpec(n / p, p, 1.0)).total
            * besov_norm(g, BesovSpec(-sigma1, 2.0, np.inf)).total
        )
        assert abs(got - expected) < 1e-10 * expected


class TestHeatAndInterpolation:
    def test_heat_regularity_bounded(self, hgrid, hbins):
        rep = check_heat_regularity(
            hgrid, hbins, 0.5, 2.0, 1.0, mu=1.0, n_samples=5, seed=4
        )
        assert rep.max_ratio < 5.0
        assert 0.5 <= rep.resolution_stability <= 2.0

    def test_interpolation_single_block_near_exact(self, hgrid):
        # on a single octave both sides collapse to the same block values
        low, high = check_interpolation_split(
            hgrid, [1], 0.0, -1.0, 2.0, 2.0, 2.0, k0=0, n_samples=5, seed=6
        )
        assert 0.3 <= high.max_ratio <= 3.0

    def test_zero_input_guard(self, hgrid, hbins):
        def sample(g, rng):
            return 1.0

        rep = run_ratio_check("noop", {}, sample, hgrid, 3, 0)
        assert rep.max_ratio == 1.0

    def test_weak_low_product(self, hgrid, hbins):
        rep = check_product_weak_low(hgrid, hbins, 1.0, 2.0, 0, n_samples=8, seed=9)
        assert np.isfinite(rep.max_ratio)
        assert 0.5 <= rep.resolution_stability <= 2.0
