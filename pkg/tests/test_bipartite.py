import math

import numpy as np
import pytest

from belltriads.bipartite import (BOUND_GAMMA_MIN, REDUCED_LABELINGS, analytic_ab,
                                  chi_threshold, nonviolation_bound, region_violates,
                                  theta_cut, violation_probability_integral)
from belltriads.correlations import NoiseLevel, singlet_tensor
from belltriads.geometry import CanonicalBipartite, apply_record, canonicalize_pair, haar_random_triad
from belltriads.mabk import local_bound, mabk_value, max_violation

PI = math.pi


def point(theta=0.0, chi_minus=0.0, chi_plus=0.0):
    return CanonicalBipartite(theta=theta, chi_minus=chi_minus, chi_plus=chi_plus)


class TestAnalyticAb:
    def test_aligned(self):
        ab = analytic_ab(point())
        assert ab.a == pytest.approx(1.0) and ab.b == pytest.approx(0.0)

    def test_pure_tilt(self):
        ab = analytic_ab(point(theta=PI / 3))
        assert ab.a == pytest.approx(math.cos(PI / 6))
        assert ab.b == pytest.approx(math.sin(PI / 6))

    def test_far_corner(self):
        ab = analytic_ab(point(theta=PI / 3, chi_minus=PI / 4, chi_plus=PI / 2))
        assert ab.a == pytest.approx(math.cos(PI / 8) * math.sqrt(3) / 2)
        assert ab.b == pytest.approx(math.cos(PI / 4) * 0.5)

    def test_outside_region_rejected(self):
        with pytest.raises(ValueError):
            analytic_ab(point(theta=PI / 2))

    def test_ordering_invariants_hold_in_region(self):
        rng = np.random.default_rng(1)
        for _ in range(2000):
            p = point(theta=rng.uniform(0, PI / 3), chi_minus=rng.uniform(0, PI / 4),
                      chi_plus=rng.uniform(0, PI / 2))
            ab = analytic_ab(p)
            assert ab.a > ab.b >= 0.0
            assert ab.b >= 2 ** -0.5 * math.sin(p.theta / 2) - 1e-15


class TestRegionViolates:
    def test_perfect_alignment_never_violates(self):
        assert not region_violates(point(chi_plus=0.3), NoiseLevel(1.0))
        assert not region_violates(point(), NoiseLevel(1.0))

    def test_in_plane_misalignment_violates(self):
        assert region_violates(point(chi_minus=PI / 4), NoiseLevel(1.0))
        assert region_violates(point(chi_minus=PI / 4, chi_plus=0.7), NoiseLevel(1.0))

    def test_pure_tilt_violates_the_mixed_inequality(self):
        p = point(theta=PI / 3)
        ab = analytic_ab(p)
        assert abs(ab.a ** 2 - ab.b ** 2 + 2 * ab.a * ab.b) == pytest.approx(
            0.5 + math.sqrt(3) / 2, abs=1e-12)
        assert region_violates(p, NoiseLevel(1.0))

    def test_zero_noise_rejected(self):
        with pytest.raises(ValueError):
            region_violates(point(), NoiseLevel(0.0))


class TestChiThreshold:
    def test_noiseless_at_zero_tilt(self):
        assert chi_threshold(0.0, NoiseLevel(1.0)) == pytest.approx(0.0, abs=1e-12)

    def test_noiseless_at_maximal_tilt(self):
        expected = math.asin(4 / (3 * math.sqrt(2))) - PI / 4
        val = chi_threshold(PI / 3, NoiseLevel(1.0))
        assert val == pytest.approx(expected, abs=1e-12)
        assert val == pytest.approx(0.4456, abs=5e-4)

    def test_mild_noise_at_zero_tilt(self):
        val = chi_threshold(0.0, NoiseLevel(0.98))
        assert val == pytest.approx(math.asin(0.98 ** -2 / math.sqrt(2)) - PI / 4,
                                    abs=1e-12)
        assert val == pytest.approx(0.042133, abs=1e-5)

    def test_saturates_when_the_first_inequality_cannot_fire(self):
        assert chi_threshold(PI / 3, NoiseLevel(0.9)) == PI / 4

    def test_threshold_is_the_flip_point(self):
        noise = NoiseLevel(0.99)
        for theta in (0.1, 0.5, 1.0):
            level = chi_threshold(theta, noise)
            if not 1e-5 < level < PI / 4 - 1e-5:
                continue
            lhs = lambda cm: math.cos(theta / 2) ** 2 * math.sin(cm + PI / 4)
            bound = 2 ** -0.5 / noise.gamma ** 2
            assert lhs(level - 1e-6) <= bound
            assert lhs(level + 1e-6) > bound

    def test_theta_out_of_range(self):
        with pytest.raises(ValueError):
            chi_threshold(PI / 2, NoiseLevel(1.0))


class TestThetaCut:
    def test_values(self):
        assert theta_cut(NoiseLevel(1.0)) == 0.0
        assert theta_cut(NoiseLevel(0.98)) == pytest.approx(0.0820, abs=5e-5)
        assert theta_cut(NoiseLevel(0.971)) == pytest.approx(0.0990, abs=5e-5)


class TestNonviolationBound:
    def test_values(self):
        assert nonviolation_bound(NoiseLevel(1.0)) == 0.0
        assert nonviolation_bound(NoiseLevel(0.98)) == pytest.approx(8.404e-4, abs=2e-6)
        floor_val = nonviolation_bound(NoiseLevel(BOUND_GAMMA_MIN))
        assert floor_val == pytest.approx(1.22e-3, abs=5e-6)
        assert 1.0 - floor_val >= 0.998

    def test_domain_floor(self):
        assert BOUND_GAMMA_MIN == 2.0 / 18.0 ** 0.25
        assert BOUND_GAMMA_MIN == pytest.approx(0.9709835, abs=1e-6)
        with pytest.raises(ValueError):
            nonviolation_bound(NoiseLevel(0.95))


class TestIntegral:
    def test_noiseless_certainty(self):
        val = violation_probability_integral(NoiseLevel(1.0), 128)
        assert abs(val - 1.0) < 1 / 128

    def test_mild_noise_floor(self):
        assert violation_probability_integral(NoiseLevel(0.971), 128) >= 0.998

    def test_respects_the_closed_form_bound(self):
        for gamma in (0.975, 0.99, 1.0):
            p = violation_probability_integral(NoiseLevel(gamma), 128)
            assert 1.0 - p <= nonviolation_bound(NoiseLevel(gamma)) + 2 / 128

    def test_monotone_in_gamma(self):
        noise_grid = [0.90, 0.92, 0.94, 0.96, 0.98, 1.0]
        vals = [violation_probability_integral(NoiseLevel(g), 128) for g in noise_grid]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_resolution_floor(self):
        with pytest.raises(ValueError):
            violation_probability_integral(NoiseLevel(1.0), 32)


class TestMirroredBranchStaysSilent:
    def test_never_violated_in_region_on_a_fine_grid(self):
        # the variant of the first inequality with sin(chi_minus - pi/4)
        # stays below its bound everywhere in the region, even noiseless
        res = 256
        theta = (np.arange(res) + 0.5) * (PI / 3) / res
        chi_minus = (np.arange(res) + 0.5) * (PI / 4) / res
        lhs = np.cos(theta / 2)[:, None] ** 2 * np.abs(np.sin(chi_minus - PI / 4))[None, :]
        assert lhs.max() <= 2 ** -0.5 + 1e-12


class TestReducedInequalitiesMatchTheFamily:
    """The analytic forms are exactly the three labelings' Bell values on
    the canonical tensor, in local-bound units."""

    def test_values_match_on_random_pairs(self):
        rng = np.random.default_rng(77)
        gamma = 0.99
        noise = NoiseLevel(gamma)
        for _ in range(300):
            t1, t2 = haar_random_triad(rng), haar_random_triad(rng)
            pt, record = canonicalize_pair(t1, t2)
            c1, c2 = apply_record(record, t1, t2)
            tensor = singlet_tensor(c1, c2, noise)
            ratios = [abs(mabk_value(tensor, lab)) / local_bound(2)
                      for lab in REDUCED_LABELINGS]
            cos_half_sq = math.cos(pt.theta / 2) ** 2
            expected_minus = (math.sqrt(2) * gamma ** 2 * cos_half_sq
                              * abs(math.sin(pt.chi_minus - PI / 4)))
            expected_plus = (math.sqrt(2) * gamma ** 2 * cos_half_sq
                             * abs(math.sin(pt.chi_minus + PI / 4)))
            ab = analytic_ab(pt)
            expected_mixed = gamma ** 2 * abs(ab.a ** 2 - ab.b ** 2 + 2 * ab.a * ab.b)
            assert ratios[0] == pytest.approx(expected_minus, abs=1e-10)
            assert ratios[1] == pytest.approx(expected_plus, abs=1e-10)
            assert ratios[2] == pytest.approx(expected_mixed, abs=1e-10)

    def test_record_preserves_the_maximal_violation(self):
        rng = np.random.default_rng(81)
        noise = NoiseLevel(0.97)
        for _ in range(200):
            t1, t2 = haar_random_triad(rng), haar_random_triad(rng)
            _, record = canonicalize_pair(t1, t2)
            c1, c2 = apply_record(record, t1, t2)
            original = max_violation(singlet_tensor(t1, t2, noise))
            canonical = max_violation(singlet_tensor(c1, c2, noise))
            assert canonical.ratio == pytest.approx(original.ratio, abs=1e-9)
            assert canonical.violated == original.violated

    def test_region_agrees_with_the_reduced_sweep(self):
        rng = np.random.default_rng(78)
        noise = NoiseLevel(0.99)
        for _ in range(300):
            t1, t2 = haar_random_triad(rng), haar_random_triad(rng)
            pt, record = canonicalize_pair(t1, t2)
            c1, c2 = apply_record(record, t1, t2)
            tensor = singlet_tensor(c1, c2, noise)
            best = max(abs(mabk_value(tensor, lab)) / local_bound(2)
                       for lab in REDUCED_LABELINGS)
            if abs(best - 1.0) < 1e-9:
                continue  # boundary configurations are decided by roundoff
            assert region_violates(pt, noise) == (best > 1.0)


class TestSoundnessAgainstFullSearch:
    @pytest.mark.parametrize("gamma", [0.98, 1.0])
    def test_region_violation_implies_search_violation(self, gamma):
        rng = np.random.default_rng(79)
        noise = NoiseLevel(gamma)
        for _ in range(1000):
            t1, t2 = haar_random_triad(rng), haar_random_triad(rng)
            pt, _ = canonicalize_pair(t1, t2)
            if region_violates(pt, noise):
                assert max_violation(singlet_tensor(t1, t2, noise)).violated

    @pytest.mark.parametrize("gamma", [0.99, 1.0])
    def test_integral_tracks_the_full_search_probability(self, gamma):
        rng = np.random.default_rng(80)
        noise = NoiseLevel(gamma)
        samples = 3000
        hits = sum(max_violation(singlet_tensor(haar_random_triad(rng),
                                                haar_random_triad(rng),
                                                noise)).violated
                   for _ in range(samples))
        integral = violation_probability_integral(noise, 256)
        assert abs(integral - hits / samples) <= 0.005
