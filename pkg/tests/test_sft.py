import math

import numpy as np
import pytest

from thermoshift import (BudgetError, ClosedOrbit, PrimeOrbit, SftError, birkhoff_sum,
                         canonical_representative, coboundary_of, coin_flip_weight,
                         constant_potential, count_periodic_points, divisors,
                         enumerate_prime_orbits, full_shift, parity_observable, validate)
from conftest import (brute_force_birkhoff, brute_force_periodic_count,
                      brute_force_prime_orbits, mobius, random_potential)


class TestValidate:
    def test_full_two_shift(self):
        sft = validate([[1, 1], [1, 1]])
        assert sft.alphabet_size == 2
        assert sft.irreducible and sft.aperiodic

    def test_golden_mean(self):
        sft = validate([[1, 1], [1, 0]])
        assert sft.irreducible and sft.aperiodic

    def test_reducible_rejected(self):
        with pytest.raises(SftError, match="reducible"):
            validate([[1, 0], [0, 1]])

    def test_periodic_rejected(self):
        # pure 2-cycle: all cycle lengths even
        with pytest.raises(SftError, match="gcd"):
            validate([[0, 1], [1, 0]])

    def test_non_01_rejected(self):
        with pytest.raises(SftError):
            validate([[1, 2], [1, 1]])

    def test_nonsquare_rejected(self):
        with pytest.raises(SftError):
            validate([[1, 1, 1], [1, 1, 1]])


class TestCountPeriodicPoints:
    def test_full_shift_powers_of_two(self, full2):
        assert count_periodic_points(full2, 4) == 16

    def test_golden_mean_trace(self, golden):
        # A^3 = [[3,2],[2,1]] by hand; trace 4
        assert count_periodic_points(golden, 3) == 4
        assert count_periodic_points(golden, 1) == 1

    def test_matches_brute_force(self, full2, golden):
        for sft in (full2, golden):
            for n in range(1, 9):
                assert count_periodic_points(sft, n) == brute_force_periodic_count(sft, n)

    def test_no_wraparound_on_large_n(self, full2):
        # exact integer arithmetic: 2^80 does not fit any fixed-width type
        assert count_periodic_points(full2, 80) == 2 ** 80


class TestCanonicalRepresentative:
    def test_examples(self):
        assert canonical_representative((1, 1, 0)) == (0, 1, 1)
        assert canonical_representative((0, 0, 0)) == (0, 0, 0)
        assert canonical_representative((0, 1, 0, 1)) == (0, 1, 0, 1)

    def test_idempotent_and_rotation_invariant(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            n = int(rng.integers(1, 12))
            word = tuple(int(x) for x in rng.integers(0, 3, n))
            canon = canonical_representative(word)
            assert canon == min(word[i:] + word[:i] for i in range(n))
            assert canonical_representative(canon) == canon
            for i in range(n):
                assert canonical_representative(word[i:] + word[:i]) == canon


class TestEnumerate:
    def test_fixed_points(self, full2):
        assert [o.word for o in enumerate_prime_orbits(full2, 1)] == [(0,), (1,)]

    def test_full_shift_period_4(self, full2):
        words = [o.word for o in enumerate_prime_orbits(full2, 4)]
        assert words == [(0, 0, 0, 1), (0, 0, 1, 1), (0, 1, 1, 1)]

    def test_golden_mean_period_3(self, golden):
        assert [o.word for o in enumerate_prime_orbits(golden, 3)] == [(0, 0, 1)]

    @pytest.mark.parametrize("n", range(1, 10))
    def test_matches_brute_force(self, full2, golden, n):
        for sft in (full2, golden):
            got = [o.word for o in enumerate_prime_orbits(sft, n)]
            assert got == brute_force_prime_orbits(sft, n)

    def test_budget_enforced(self, full2):
        with pytest.raises(BudgetError):
            enumerate_prime_orbits(full2, 16, budget=100)

    def test_partitioned_by_first_symbol(self, full2):
        whole = enumerate_prime_orbits(full2, 7)
        parts = [enumerate_prime_orbits(full2, 7, first_symbols=[c]) for c in (0, 1)]
        assert whole == parts[0] + parts[1]

    def test_necklace_identity(self, full2, golden):
        for sft in (full2, golden):
            for n in range(1, 15):
                total = sum(d * len(enumerate_prime_orbits(sft, d)) for d in divisors(n))
                assert total == count_periodic_points(sft, n)

    def test_mobius_inversion(self, full2, golden):
        for sft in (full2, golden):
            for n in range(1, 15):
                inverted = sum(mobius(d) * count_periodic_points(sft, n // d)
                               for d in divisors(n)) // n
                assert len(enumerate_prime_orbits(sft, n)) == inverted


class TestPrimeOrbit:
    def test_from_word_canonicalizes(self, full2):
        orbit = PrimeOrbit.from_word(full2, (1, 0, 0))
        assert orbit.word == (0, 0, 1)
        assert orbit.period == 3

    def test_from_word_rejects_powers(self, full2):
        with pytest.raises(SftError, match="power"):
            PrimeOrbit.from_word(full2, (0, 1, 0, 1))

    def test_from_word_rejects_inadmissible(self, golden):
        with pytest.raises(SftError, match="forbidden"):
            PrimeOrbit.from_word(golden, (1, 1, 0))

    def test_closed_orbit_length(self):
        orbit = ClosedOrbit(PrimeOrbit((0, 1)), 3)
        assert orbit.length == 6
        assert orbit.von_mangoldt == 2
        assert not orbit.is_prime
        assert ClosedOrbit(PrimeOrbit((0, 1))).is_prime


class TestBirkhoffSum:
    def test_constant_potential(self, full2):
        c = constant_potential(full2, 2.5)
        orbit = PrimeOrbit((0, 0, 1))
        assert birkhoff_sum(orbit, c) == pytest.approx(7.5)

    def test_coin_flip_on_01(self, full2, coin):
        got = birkhoff_sum(PrimeOrbit((0, 1)), coin)
        assert got == pytest.approx(math.log(0.3) + math.log(0.7), abs=1e-15)

    def test_parity_on_0011(self, full2, parity):
        orbit = PrimeOrbit.from_word(full2, (0, 0, 1, 1))
        assert birkhoff_sum(orbit, parity) == 0.0

    def test_multiplicity_scales(self, full2, coin):
        base = PrimeOrbit((0, 1))
        assert birkhoff_sum(ClosedOrbit(base, 3), coin) == pytest.approx(
            3 * birkhoff_sum(base, coin))

    def test_rotation_invariant_exactly(self, full2):
        rng = np.random.default_rng(3)
        pot = random_potential(full2, 2, rng)
        word = (0, 1, 1, 0, 1)
        sums = {birkhoff_sum(PrimeOrbit(word[i:] + word[:i]), pot) for i in range(5)}
        assert len({round(s, 12) for s in sums}) == 1

    def test_linear_in_potential(self, full2, coin, parity):
        from thermoshift import linear_combination
        combo = linear_combination([2.0, -1.5], [coin, parity])
        orbit = PrimeOrbit((0, 0, 1))
        expected = 2.0 * birkhoff_sum(orbit, coin) - 1.5 * birkhoff_sum(orbit, parity)
        assert birkhoff_sum(orbit, combo) == pytest.approx(expected, abs=1e-12)

    def test_matches_brute_force(self, golden):
        rng = np.random.default_rng(11)
        pot = random_potential(golden, 2, rng)
        for orbit in enumerate_prime_orbits(golden, 6):
            assert birkhoff_sum(orbit, pot) == pytest.approx(
                brute_force_birkhoff(orbit.word, pot), abs=1e-12)

    def test_coboundary_telescopes(self, full2):
        rng = np.random.default_rng(5)
        kappa = random_potential(full2, 2, rng)
        phi = coboundary_of(kappa)
        bound = 1e-12 * kappa.sup_norm
        for n in range(1, 13):
            for orbit in enumerate_prime_orbits(full2, n):
                assert abs(birkhoff_sum(orbit, phi)) <= bound * n
