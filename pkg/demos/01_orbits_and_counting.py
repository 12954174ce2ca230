"""Closed orbits of subshifts: enumeration, counting identities, Birkhoff sums.

Walks through the combinatorial layer: prime orbits as Lyndon words,
the necklace identity tying prime-orbit counts to traces of powers of
the transition matrix, and potential sums along cyclic words.
"""

import math

from thermoshift import (PrimeOrbit, birkhoff_sum, canonical_representative,
                         coin_flip_weight, count_periodic_points, divisors,
                         enumerate_prime_orbits, full_shift, golden_mean_shift,
                         parity_observable)

full2 = full_shift(2)
golden = golden_mean_shift()

print("== Prime orbits of the full 2-shift ==")
for n in range(1, 6):
    orbits = enumerate_prime_orbits(full2, n)
    words = " ".join("".join(map(str, o.word)) for o in orbits)
    print(f"  period {n}: {len(orbits):3d} orbits   {words}")

print()
print("== Golden-mean shift (word 11 forbidden) ==")
for n in range(1, 8):
    orbits = enumerate_prime_orbits(golden, n)
    print(f"  period {n}: {len(orbits):3d} orbits")

print()
print("== Necklace identity: sum of d * (#prime orbits of period d) over d | n")
print("   equals the number of periodic points tr(A^n) ==")
for sft, name in ((full2, "full 2-shift"), (golden, "golden mean")):
    for n in (6, 10, 14):
        lhs = sum(d * len(enumerate_prime_orbits(sft, d)) for d in divisors(n))
        rhs = count_periodic_points(sft, n)
        print(f"  {name:13s} n={n:2d}: {lhs} == {rhs}  ({lhs == rhs})")

print()
print("== Canonical forms are least rotations ==")
for word in ((1, 1, 0), (1, 0, 1, 0, 0), (0, 0, 0)):
    print(f"  {word} -> {canonical_representative(word)}")

print()
print("== Birkhoff sums wrap around the cyclic word ==")
coin = coin_flip_weight(0.3)
parity = parity_observable()
orbit = PrimeOrbit((0, 1))
print(f"  coin-flip weight along (01): {birkhoff_sum(orbit, coin):+.6f}"
      f"  (= log 0.3 + log 0.7 = {math.log(0.3) + math.log(0.7):+.6f})")
print(f"  parity along (0011): {birkhoff_sum(PrimeOrbit((0, 0, 1, 1)), parity):+.1f}"
      "  (two +1 and two -1 cancel)")
