"""Thermodynamic formalism on subshifts of finite type.

Orbit enumeration, pressure and equilibrium states, weighted orbit
central limit statistics, Livshits-type coboundary tests, suspension
flows, and dynamical L-functions, all at exact desk scale.
"""

from .errors import (BranchAmbiguityError, BracketError, BudgetError, ConvergenceError,
                     DegenerateVarianceError, NumericsError, PoleFitError, PotentialError,
                     SftError, ThermoshiftError)
from .sft import (ClosedOrbit, PrimeOrbit, Sft, birkhoff_sum, canonical_representative,
                  count_periodic_points, divisors, enumerate_prime_orbits, full_shift,
                  golden_mean_shift, prime_word_matrix, validate)
from .potentials import (LocallyConstantPotential, add_constant, admissible_windows,
                         coboundary_of, coin_flip_weight, constant_potential, cyclic_sums,
                         evaluate, linear_combination, parity_observable, refine_depth, scale)
from .thermo import (EquilibriumState, PressureEstimate, TransferMatrix, complex_pressure,
                     equilibrium_state, integrate, mean_slope, pressure_orbit_sum,
                     pressure_spectral, transfer_matrix, variance_curvature,
                     variance_green_kubo)
from .orbit_stats import (EmpiricalDistribution, WeightedOrbitMeasure,
                          exponential_growth_rate, ks_distance_to_standard_normal,
                          normalized_period_sample, weighted_orbit_measure,
                          weighted_proportion)
from .livshits import (CoboundarySolution, LivshitsReport, PeriodScan, check_periods,
                       nonpositive_test, positive_period_count, positive_proportion_test,
                       solve_coboundary)
from .suspension import (CountingRow, FlowCltResult, FlowOrbit, SuspensionFlow,
                         center_flow_observable, flow_clt_check, flow_orbits_in_window,
                         flow_pressure, flow_sigma_squared, flow_weighted_measure,
                         make_suspension, verify_counting_asymptotics, weighted_count)
from .lfunction import (EtaValue, LSeriesTruncation, eta_truncated, locate_real_pole,
                        s_of_t_quadratic_fit)

__version__ = "0.1.0"
