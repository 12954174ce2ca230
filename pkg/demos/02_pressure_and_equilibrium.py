"""Topological pressure and equilibrium states, three ways.

Pressure from the transfer-matrix spectral radius, from weighted orbit
sums, and the Gibbs-Markov equilibrium state with its variational
identity entropy + mean = pressure.
"""

import math

from thermoshift import (add_constant, coin_flip_weight, constant_potential,
                         equilibrium_state, full_shift, golden_mean_shift, integrate,
                         pressure_orbit_sum, pressure_spectral)

full2 = full_shift(2)
golden = golden_mean_shift()
zero2 = constant_potential(full2, 0.0)
zero_g = constant_potential(golden, 0.0)
coin = coin_flip_weight(0.3, full2)

print("== Pressure: spectral log of the transfer operator vs orbit-sum slope ==")
cases = [
    ("full 2-shift, zero weight", full2, zero2, math.log(2)),
    ("coin flip p=0.3", full2, coin, 0.0),
    ("golden mean, zero weight", golden, zero_g, math.log((1 + math.sqrt(5)) / 2)),
]
for name, sft, psi, exact in cases:
    spectral = pressure_spectral(sft, psi)
    orbit = pressure_orbit_sum(sft, psi, range(8, 17))
    print(f"  {name:28s} spectral {spectral.value:+.12f}  orbit-sum {orbit.value:+.12f}"
          f"  exact {exact:+.12f}")

print()
print("== Pressure is exactly additive under constant shifts ==")
for c in (0.5, -1.0, 2.0):
    shifted = pressure_spectral(full2, add_constant(coin, c)).value
    print(f"  P(coin + {c:+.1f}) - P(coin) = {shifted - pressure_spectral(full2, coin).value:+.12f}")

print()
print("== Equilibrium states ==")
state = equilibrium_state(full2, coin)
print(f"  coin flip: stationary {state.stationary.round(12)} (a Bernoulli(0.3) measure)")
print(f"  entropy {state.entropy:.10f} + mean {integrate(state, coin):+.10f} "
      f"= {state.entropy + integrate(state, coin):+.2e}  (pressure is 0)")

parry = equilibrium_state(golden, zero_g)
print(f"  golden mean (Parry measure): stationary {parry.stationary.round(6)}, "
      f"entropy {parry.entropy:.10f} = log golden ratio "
      f"{math.log((1 + math.sqrt(5)) / 2):.10f}")
