import itertools

import pytest

from thermoshift import (LocallyConstantPotential, admissible_windows,
                         coin_flip_weight, constant_potential, full_shift,
                         golden_mean_shift, parity_observable)


@pytest.fixture(scope="session")
def full2():
    return full_shift(2)


@pytest.fixture(scope="session")
def golden():
    return golden_mean_shift()


@pytest.fixture(scope="session")
def coin(full2):
    return coin_flip_weight(0.3, full2)


@pytest.fixture(scope="session")
def parity(full2):
    return parity_observable(full2)


@pytest.fixture(scope="session")
def zero2(full2):
    return constant_potential(full2, 0.0)


def random_potential(sft, depth, rng, spread=0.5):
    """Seeded random potential with values uniform in (-spread, spread)."""
    windows = list(admissible_windows(sft, depth))
    vals = {w: float(v) for w, v in zip(windows, rng.uniform(-spread, spread, len(windows)))}
    return LocallyConstantPotential(sft, depth, vals)


# --- independent brute-force oracles ---------------------------------------

def brute_force_prime_orbits(sft, n):
    """All prime orbits of period n by scanning every word and grouping rotations."""
    found = set()
    for word in itertools.product(range(sft.alphabet_size), repeat=n):
        if not sft.is_admissible_cycle(word):
            continue
        rotations = [word[i:] + word[:i] for i in range(n)]
        if len(set(rotations)) != n:  # proper power of a shorter word
            continue
        found.add(min(rotations))
    return sorted(found)


def brute_force_periodic_count(sft, n):
    return sum(1 for word in itertools.product(range(sft.alphabet_size), repeat=n)
               if sft.is_admissible_cycle(word))


def brute_force_birkhoff(word, potential, multiplicity=1):
    d = len(word)
    total = 0.0
    for j in range(d):
        window = tuple(word[(j + i) % d] for i in range(potential.depth))
        total += potential.values[window]
    return multiplicity * total


def mobius(n):
    if n == 1:
        return 1
    result = 1
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result
