import math

import numpy as np
import pytest

from thermoshift import (PrimeOrbit, birkhoff_sum, check_periods,
                         coboundary_of, constant_potential, linear_combination,
                         nonpositive_test, parity_observable, positive_proportion_test,
                         pressure_spectral, scale, solve_coboundary)
from conftest import random_potential


class TestCheckPeriods:
    def test_coboundary_all_zero(self, full2):
        rng = np.random.default_rng(81)
        kappa = random_potential(full2, 2, rng)
        scan = check_periods(full2, coboundary_of(kappa), 12)
        assert scan.all_zero and scan.all_nonpositive
        assert scan.max_orbit_average <= scan.tol

    def test_parity_counterexample_is_zero_fixed_point(self, full2, parity):
        scan = check_periods(full2, parity, 10)
        assert not scan.all_zero
        assert scan.worst_orbit == PrimeOrbit((0,))
        assert scan.worst_period == pytest.approx(1.0)

    def test_constant_minus_one(self, full2):
        scan = check_periods(full2, constant_potential(full2, -1.0), 10)
        assert not scan.all_zero
        assert scan.all_nonpositive
        assert scan.max_orbit_average == pytest.approx(-1.0)


class TestSolveCoboundary:
    def test_round_trip_depth1(self, full2):
        rng = np.random.default_rng(83)
        kappa0 = random_potential(full2, 1, rng)
        phi = coboundary_of(kappa0)
        sol = solve_coboundary(full2, phi)
        assert sol.success and sol.residual <= 1e-12
        # recovered kappa differs from kappa0 by a constant
        diffs = {w: sol.kappa.values[w[:sol.kappa.depth]] - kappa0.values[w[:1]]
                 for w in kappa0.values}
        spread = max(diffs.values()) - min(diffs.values())
        assert spread <= 1e-9

    def test_round_trip_depth2(self, golden):
        rng = np.random.default_rng(89)
        kappa0 = random_potential(golden, 2, rng)
        phi = coboundary_of(kappa0)
        sol = solve_coboundary(golden, phi)
        assert sol.success
        rebuilt = coboundary_of(sol.kappa)
        for orbit_word in ((0,), (0, 1), (0, 0, 1)):
            assert birkhoff_sum(PrimeOrbit(orbit_word), rebuilt) == pytest.approx(
                birkhoff_sum(PrimeOrbit(orbit_word), phi), abs=1e-9)

    def test_parity_fails_with_positive_residual(self, full2, parity):
        sol = solve_coboundary(full2, parity)
        assert not sol.success
        assert sol.residual > 0.1

    def test_zero_potential(self, full2, zero2):
        sol = solve_coboundary(full2, zero2)
        assert sol.success
        assert all(abs(v) <= 1e-12 for v in sol.kappa.values.values())


class TestPositiveProportion:
    def test_coboundary_verdict(self, full2, coin):
        rng = np.random.default_rng(97)
        phi = coboundary_of(random_potential(full2, 2, rng))
        report = positive_proportion_test(full2, phi, coin, range(4, 13))
        assert report.verdict == "coboundary"
        assert all(p == 1.0 for p in report.proportions.values())
        assert report.kappa is not None and report.kappa_residual <= 1e-9
        assert "certified" in report.certificate

    def test_constant_one_rejected(self, full2, coin):
        phi = constant_potential(full2, 1.0)
        report = positive_proportion_test(full2, phi, coin, range(4, 13))
        assert report.verdict == "rejected"
        assert all(p == 0.0 for p in report.proportions.values())
        orbit, value = report.evidence
        assert value != 0.0

    def test_parity_rejected_with_decaying_proportion(self, full2, coin, parity):
        report = positive_proportion_test(full2, parity, coin, range(8, 21, 4))
        assert report.verdict == "rejected"
        assert report.proportions[20] < 0.05
        orbit, value = report.evidence
        assert birkhoff_sum(orbit, parity) == pytest.approx(value)
        assert abs(value) > 0

    def test_rejected_witness_reproduces(self, full2, coin):
        phi = constant_potential(full2, 1.0)
        report = positive_proportion_test(full2, phi, coin, range(4, 11))
        orbit, value = report.evidence
        assert birkhoff_sum(orbit, phi) == pytest.approx(value)


class TestNonpositive:
    def test_constant_minus_one_accepted(self, full2):
        report = nonpositive_test(full2, constant_potential(full2, -1.0), range(4, 13))
        assert report.verdict == "cohomologous_nonpositive"
        assert report.growth_rate == 0.0
        assert all(c == 0 for c in report.qprime_counts.values())

    def test_parity_rejected_log2_growth(self, full2, parity):
        report = nonpositive_test(full2, parity, range(4, 21))
        assert report.verdict == "rejected"
        assert report.growth_rate == pytest.approx(math.log(2), abs=0.05)
        orbit, value = report.evidence
        assert orbit == PrimeOrbit((0,))
        assert value == pytest.approx(1.0)

    def test_coboundary_minus_tenth_accepted(self, full2):
        rng = np.random.default_rng(101)
        phi = linear_combination(
            [1.0, 1.0],
            [coboundary_of(random_potential(full2, 1, rng)),
             constant_potential(full2, -0.1)])
        report = nonpositive_test(full2, phi, range(4, 13))
        assert report.verdict == "cohomologous_nonpositive"
        assert report.max_orbit_average == pytest.approx(-0.1, abs=1e-9)

    def test_zero_temperature_slopes_monotone(self, full2, parity):
        report = nonpositive_test(full2, parity, range(4, 13))
        slopes = [report.zero_temp_slopes[s] for s in sorted(report.zero_temp_slopes)]
        assert all(b <= a + 1e-12 for a, b in zip(slopes, slopes[1:]))

    def test_orbit_average_bounded_by_slopes(self, full2, coin, parity):
        for phi in (parity, coin):
            report = nonpositive_test(full2, phi, range(4, 13))
            for s, slope in report.zero_temp_slopes.items():
                assert report.max_orbit_average <= slope + 1e-8

    def test_proof_inequality_on_random(self, full2):
        # every orbit average is bounded by pressure(s phi)/s
        rng = np.random.default_rng(103)
        phi = random_potential(full2, 2, rng)
        scan = check_periods(full2, phi, 12)
        for s in (10.0, 20.0, 40.0):
            slope = pressure_spectral(full2, scale(phi, s)).value / s
            assert scan.max_orbit_average <= slope + 1e-8
