import numpy as np
import pytest

from mhddecay.continuum import (
    QuadratureProfile,
    RadialAmplitude,
    SemigroupOracle,
    default_profile,
    heat_block_norms,
    initial_vectors,
    low_frequency_amplitude,
)
from mhddecay.decay import fit_exponent
from mhddecay.dyadic import BesovSpec


class TestQuadratureProfile:
    def test_gaussian_integral_2d(self):
        prof = default_profile(2, 1.0, j_lo=-8, j_hi=1)
        assert prof.gaussian_check() < 1e-8

    def test_gaussian_integral_3d(self):
        prof = default_profile(3, 1.5, j_lo=-8, j_hi=1)
        assert prof.gaussian_check() < 1e-8

    def test_annulus_node_coverage(self):
        prof = default_profile(2, 1.0, j_lo=-4, j_hi=0)
        r, _ = prof.radial_nodes()
        for j in prof.blocks():
            inside = (r >= 0.75 * 2.0**j) & (r <= 8.0 / 3.0 * 2.0**j)
            assert inside.sum() >= 32

    def test_too_few_radial_nodes_rejected(self):
        with pytest.raises(ValueError):
            QuadratureProfile(
                dim=2, j_lo=-4, j_hi=0,
                amplitude=low_frequency_amplitude(1.0, 2), n_radial=16,
            )

    def test_amplitude_support_clipped(self):
        amp = RadialAmplitude(exponent=0.0, r_max=1.0)
        prof = QuadratureProfile(dim=2, j_lo=-4, j_hi=1, amplitude=amp)
        r, _ = prof.radial_nodes()
        assert r.max() <= 1.0


class TestInitialData:
    def test_membership_ladder_flat(self, params2d):
        # amplitude r^{sigma1 - N/2} puts the same weight in every low block
        prof = default_profile(2, 1.0, j_lo=-10, j_hi=1)
        oracle = SemigroupOracle(prof, params2d)
        b0 = oracle.block_norms(0.0)
        vals = [2.0 ** (-j * 1.0) * b0[j] for j in range(-9, -2)]
        assert max(vals) / min(vals) < 1.0 + 1e-6

    def test_polarization_constraint(self, params3d):
        prof = default_profile(3, 1.5, j_lo=-4, j_hi=0)
        xi, _ = prof.nodes(params3d.I)
        z0 = initial_vectors(xi, prof.amplitude, params3d)
        h = z0[:, 4:]
        dot = np.abs((xi * h).sum(axis=1))
        assert dot.max() < 1e-12
        # magnetic polarization is orthogonal to the background direction
        assert np.abs(h @ params3d.I).max() < 1e-12

    def test_unknown_polarization_rejected(self, params2d):
        prof = default_profile(2, 1.0, j_lo=-4, j_hi=0)
        with pytest.raises(ValueError):
            initial_vectors(prof.nodes(params2d.I)[0], prof.amplitude, params2d, "odd")


class TestOracle:
    def test_p_must_be_two(self, params2d):
        prof = default_profile(2, 1.0, j_lo=-6, j_hi=0)
        oracle = SemigroupOracle(prof, params2d)
        with pytest.raises(ValueError, match="p = 2"):
            oracle.besov_norm(1.0, BesovSpec(0.0, 4.0, 1.0))

    def test_heat_oracle_exponent(self):
        # pure heat decay of the same profile: Besov sum falls like t^{-s1/2}
        sigma1 = 1.0
        prof = default_profile(2, sigma1, j_lo=-14, j_hi=1)
        times = np.geomspace(1e2, 1e4, 15)
        blocks = heat_block_norms(prof, times)
        totals = np.zeros(len(times))
        for j, series in blocks.items():
            totals += series
        fit = fit_exponent(times, totals, (1e2, 1e4), predicted=-sigma1 / 2)
        assert fit.verdict == "pass"
        assert abs(fit.fitted + 0.5) < 0.02

    def test_full_symbol_short_2d_fit(self, params2d):
        # smoke version of the acceptance criterion at reduced node counts
        prof = default_profile(2, 1.0, j_lo=-12, j_hi=1)
        oracle = SemigroupOracle(prof, params2d)
        times = np.geomspace(1e2, 1e4, 13)
        totals, ladder = oracle.decay_series(times, BesovSpec(0.0, 2.0, 1.0))
        fit = fit_exponent(times, totals, (1e2, 1e4), predicted=-0.5)
        assert fit.verdict == "pass"
        assert ladder[0][1] == prof.j_lo

    def test_besov_norm_structure(self, params2d):
        prof = default_profile(2, 1.0, j_lo=-6, j_hi=1)
        oracle = SemigroupOracle(prof, params2d)
        bn = oracle.besov_norm(10.0, BesovSpec(0.0, 2.0, 1.0, k0=0))
        assert set(bn.block_norms) == set(range(-6, 2))
        total = sum(bn.block_norms.values())
        assert abs(bn.total - total) < 1e-12 * total
        assert bn.low > bn.high  # late times concentrate at low frequency
