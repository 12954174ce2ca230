"""The weighted dynamical L-function: series truncations and pole location.

The log derivative eta(s, t) of the orbit L-function blows up at
s = pressure; fitting the pole model to truncated series values recovers
the pressure, and the complex pressure branch s(t) packages the mean and
variance in its Taylor coefficients.
"""

import math

import numpy as np

from thermoshift import (LSeriesTruncation, coin_flip_weight, constant_potential,
                         eta_truncated, full_shift, golden_mean_shift, locate_real_pole,
                         parity_observable, pressure_spectral, s_of_t_quadratic_fit)

full2 = full_shift(2)
golden = golden_mean_shift()
zero2 = constant_potential(full2, 0.0)
coin = coin_flip_weight(0.3, full2)
parity = parity_observable(full2)

print("== eta(s, 0) grows as s approaches the pressure from the right ==")
trunc = LSeriesTruncation(full2, zero2, None, max_base_period=60)
log2 = math.log(2)
for gap in (0.5, 0.25, 0.1, 0.05):
    ev = eta_truncated(trunc, log2 + gap)
    exact = 1.0 / (math.exp(gap) - 1.0)
    print(f"  s = log2 + {gap:<5} eta = {ev.value.real:9.4f} "
          f"(exact {exact:9.4f}, tail bound {ev.tail_bound:.2e})")

print()
print("== Pole location recovers the pressure ==")
for name, sft, psi in (("full 2-shift", full2, zero2),
                       ("coin flip p=0.3", full2, coin),
                       ("golden mean", golden, constant_potential(golden, 0.0))):
    p = pressure_spectral(sft, psi).value
    trunc = LSeriesTruncation(sft, psi, None, max_base_period=80)
    pole = locate_real_pole(trunc, (p + 0.05, p + 0.15))
    print(f"  {name:16s} pole {pole:+.6f}  pressure {p:+.6f}  error {abs(pole - p):.2e}")

print()
print("== Quadratic fit of the complex pressure branch s(t) ==")
t_grid = np.linspace(-0.2, 0.2, 9)
for name, psi, expected in (("coin flip / parity", coin, (0.0, -0.4, 0.84)),
                            ("unweighted / parity", zero2, (log2, 0.0, 1.0))):
    p_hat, mu_hat, s2_hat = s_of_t_quadratic_fit(full2, psi, parity, t_grid)
    print(f"  {name:20s} fit (P, mean, variance) = "
          f"({p_hat:+.4f}, {mu_hat:+.4f}, {s2_hat:.4f})   expected {expected}")
