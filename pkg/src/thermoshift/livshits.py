"""Numerical coboundary certification and Livshits-type decision procedures.

A coboundary verdict here is always a desk-scale certificate: every
closed-orbit period up to the scanned length vanished AND a transfer
function kappa reproducing the observable was solved to tolerance.  The
two certificates are checked against each other and the report records
the scan bound so the verdict never overclaims.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import PotentialError
from .orbit_stats import (ZERO_PERIOD_TOL_PER_STEP, exponential_growth_rate,
                          weighted_orbit_measure, weighted_proportion)
from .potentials import (LocallyConstantPotential, admissible_windows, coboundary_of,
                         cyclic_sums, refine_depth, scale)
from .sft import PrimeOrbit, Sft, divisors, prime_word_matrix
from .thermo import equilibrium_state, pressure_spectral, variance_green_kubo

COBOUNDARY_RESIDUAL_TOL = 1e-9
PROPORTION_THRESHOLD = 0.01
GROWTH_EPSILON = 0.02
ZERO_TEMP_GRID = (10.0, 20.0, 40.0)


@dataclass(frozen=True)
class PeriodScan:
    """Summary of an exhaustive period scan over closed orbits up to n_max.

    Prime orbits suffice: a power inherits the sign and the per-step
    average of its base orbit exactly.
    """

    all_zero: bool
    all_nonpositive: bool
    worst_orbit: PrimeOrbit
    worst_period: float
    max_orbit_average: float
    n_max: int
    tol: float


@dataclass(frozen=True)
class CoboundarySolution:
    success: bool
    kappa: LocallyConstantPotential | None
    residual: float
    depth_tried: int


@dataclass(frozen=True)
class LivshitsReport:
    verdict: str  # coboundary | cohomologous_nonpositive | rejected
    evidence: tuple[PrimeOrbit, float] | None
    proportions: dict[int, float] | None = None
    qprime_counts: dict[int, int] | None = None
    growth_rate: float | None = None
    zero_temp_slopes: dict[float, float] | None = None
    variance_estimate: float | None = None
    max_orbit_average: float | None = None
    kappa: LocallyConstantPotential | None = None
    kappa_residual: float | None = None
    certificate: str | None = None

    def __post_init__(self):
        if self.verdict == "rejected" and self.evidence is None:
            raise ValueError("rejected verdicts must carry a counterexample orbit")


def check_periods(sft: Sft, phi: LocallyConstantPotential, n_max: int,
                  tol: float | None = None, budget: int | None = None) -> PeriodScan:
    """Scan every closed orbit up to length n_max for zero/nonpositive periods.

    ``tol`` is a per-step tolerance: an orbit counts as zero-period when
    |ell_phi(gamma)| <= tol * ell(gamma).  The worst orbit maximizes
    |ell_phi| / ell; max_orbit_average is the signed maximum of
    ell_phi / ell.
    """
    if phi.sft != sft:
        raise PotentialError("observable lives on a different subshift")
    if tol is None:
        tol = ZERO_PERIOD_TOL_PER_STEP * phi.sup_norm
    all_zero = True
    all_nonpos = True
    worst_word = None
    worst_val = 0.0
    worst_abs_avg = -1.0
    max_avg = -math.inf
    for n in range(1, n_max + 1):
        words = prime_word_matrix(sft, n, budget)
        if words.shape[0] == 0:
            continue
        sums = cyclic_sums(phi, words)
        avgs = sums / n
        if (np.abs(avgs) > tol).any():
            all_zero = False
        if (avgs > tol).any():
            all_nonpos = False
        i = int(np.argmax(np.abs(avgs)))
        if abs(avgs[i]) > worst_abs_avg:
            worst_abs_avg = abs(avgs[i])
            worst_word = tuple(int(x) for x in words[i])
            worst_val = float(sums[i])
        max_avg = max(max_avg, float(avgs.max()))
    if worst_word is None:
        raise PotentialError(f"no closed orbits of length <= {n_max}")
    return PeriodScan(all_zero=all_zero, all_nonpositive=all_nonpos,
                      worst_orbit=PrimeOrbit(worst_word), worst_period=worst_val,
                      max_orbit_average=max_avg, n_max=n_max, tol=tol)


def solve_coboundary(sft: Sft, phi: LocallyConstantPotential,
                     max_depth: int | None = None) -> CoboundarySolution:
    """Solve kappa(shifted window) - kappa(window) = phi in least squares.

    Depths k-1, k, ... are tried up to ``max_depth`` (default k+2) with
    the gauge kappa(first block) = 0.  Success requires the equation
    residual to stay within 1e-9 and the reconstructed coboundary to
    reproduce phi to the same tolerance.
    """
    k = phi.depth
    if max_depth is None:
        max_depth = k + 2
    best_res = math.inf
    best_depth = max(1, k - 1)
    for j in range(max(1, k - 1), max_depth + 1):
        blocks = list(admissible_windows(sft, j))
        index = {b: i for i, b in enumerate(blocks)}
        window_len = max(k, j + 1)
        rows = list(admissible_windows(sft, window_len))
        a = np.zeros((len(rows) + 1, len(blocks)))
        b = np.zeros(len(rows) + 1)
        for r, w in enumerate(rows):
            a[r, index[w[1:j + 1]]] += 1.0
            a[r, index[w[:j]]] -= 1.0
            b[r] = phi.values[w[:k]]
        a[len(rows), 0] = 1.0  # gauge: kappa(first block) = 0
        sol, *_ = np.linalg.lstsq(a, b, rcond=None)
        residual = float(np.abs(a[:-1] @ sol - b[:-1]).max())
        if residual < best_res:
            best_res = residual
            best_depth = j
        if residual <= COBOUNDARY_RESIDUAL_TOL:
            kappa = LocallyConstantPotential(sft, j, dict(zip(blocks, sol.tolist())))
            rebuilt = coboundary_of(kappa)
            target = refine_depth(phi, rebuilt.depth)
            err = max(abs(rebuilt.values[w] - target.values[w]) for w in target.values)
            if err <= COBOUNDARY_RESIDUAL_TOL:
                return CoboundarySolution(True, kappa, residual, j)
    return CoboundarySolution(False, None, best_res, best_depth)


def positive_period_count(sft: Sft, phi: LocallyConstantPotential, n: int,
                          tol: float, budget: int | None = None) -> int:
    """Size of Q'(n): length-n cyclic words on orbits with positive period.

    Each closed orbit contributes its von Mangoldt multiplicity (the base
    prime period), matching the cyclic-word normalization used by the
    weighted orbit measures.
    """
    total = 0
    for d in divisors(n):
        words = prime_word_matrix(sft, d, budget)
        if words.shape[0] == 0:
            continue
        avgs = cyclic_sums(phi, words) / d
        total += int((avgs > tol).sum()) * d
    return total


def positive_proportion_test(sft: Sft, phi: LocallyConstantPotential,
                             psi: LocallyConstantPotential, n_range: Sequence[int],
                             tol: float | None = None,
                             threshold: float = PROPORTION_THRESHOLD,
                             budget: int | None = None) -> LivshitsReport:
    """Decision procedure for the positive-proportion coboundary criterion.

    Computes the psi-weighted proportion of zero-period orbits per length,
    estimates the limsup as the maximum over the top half of ``n_range``,
    and when that estimate clears ``threshold`` demands both certificates
    (vanishing periods and a solved kappa) before declaring a coboundary.
    """
    ns = sorted(set(int(n) for n in n_range))
    proportions = {}
    for n in ns:
        m = weighted_orbit_measure(sft, psi, n, budget)
        proportions[n] = weighted_proportion(m, phi, "zero", tol)
    limsup_est = max(proportions[n] for n in ns[len(ns) // 2:])
    scan = check_periods(sft, phi, max(ns), tol, budget)
    state = equilibrium_state(sft, psi)
    sigma2 = variance_green_kubo(state, phi)
    witness = (scan.worst_orbit, scan.worst_period)
    if limsup_est > threshold:
        sol = solve_coboundary(sft, phi)
        if scan.all_zero and sol.success:
            certificate = (f"coboundary certified up to orbit length {scan.n_max} "
                           f"with kappa residual {sol.residual:.3e}")
            return LivshitsReport(verdict="coboundary", evidence=None,
                                  proportions=proportions, variance_estimate=sigma2,
                                  max_orbit_average=scan.max_orbit_average,
                                  kappa=sol.kappa, kappa_residual=sol.residual,
                                  certificate=certificate)
        return LivshitsReport(verdict="rejected", evidence=witness,
                              proportions=proportions, variance_estimate=sigma2,
                              max_orbit_average=scan.max_orbit_average,
                              kappa_residual=sol.residual,
                              certificate="positive proportion without vanishing periods")
    return LivshitsReport(verdict="rejected", evidence=witness,
                          proportions=proportions, variance_estimate=sigma2,
                          max_orbit_average=scan.max_orbit_average,
                          certificate="zero-period proportion decays over the scanned range")


def nonpositive_test(sft: Sft, phi: LocallyConstantPotential, n_range: Sequence[int],
                     tol: float | None = None, growth_epsilon: float = GROWTH_EPSILON,
                     s_grid: Sequence[float] = ZERO_TEMP_GRID,
                     budget: int | None = None) -> LivshitsReport:
    """Decision procedure for cohomology to a nonpositive function.

    |Q'(n)| is counted exactly per length; the verdict requires both a
    subexponential growth rate (slope <= growth_epsilon) and a
    nonpositive maximal orbit average.  Zero-temperature slopes
    pressure(s phi)/s corroborate the bound on orbit averages.
    """
    ns = sorted(set(int(n) for n in n_range))
    if tol is None:
        tol = ZERO_PERIOD_TOL_PER_STEP * phi.sup_norm
    counts = {n: positive_period_count(sft, phi, n, tol, budget) for n in ns}
    if all(c == 0 for c in counts.values()):
        rate = 0.0
    else:
        rate = exponential_growth_rate(counts)
    scan = check_periods(sft, phi, max(ns), tol, budget)
    slopes = {s: pressure_spectral(sft, scale(phi, s)).value / s for s in s_grid}
    accepted = rate <= growth_epsilon and scan.max_orbit_average <= tol
    if accepted:
        return LivshitsReport(verdict="cohomologous_nonpositive", evidence=None,
                              qprime_counts=counts, growth_rate=rate,
                              zero_temp_slopes=slopes,
                              max_orbit_average=scan.max_orbit_average,
                              certificate=f"periods nonpositive up to length {scan.n_max}; "
                                          f"Q' growth rate {rate:.4f}")
    # The witness must have a positive period; the signed-max orbit does
    # whenever the verdict is a rejection on orbit averages, and the scan
    # worst orbit covers the growth-rate rejection.
    witness_orbit, witness_val = scan.worst_orbit, scan.worst_period
    if scan.max_orbit_average > tol and witness_val <= tol:
        for n in range(1, scan.n_max + 1):
            words = prime_word_matrix(sft, n, budget)
            if words.shape[0] == 0:
                continue
            sums = cyclic_sums(phi, words)
            pos = np.flatnonzero(sums / n > tol)
            if pos.size:
                i = int(pos[np.argmax(sums[pos])])
                witness_orbit = PrimeOrbit(tuple(int(x) for x in words[i]))
                witness_val = float(sums[i])
                break
    return LivshitsReport(verdict="rejected", evidence=(witness_orbit, witness_val),
                          qprime_counts=counts, growth_rate=rate,
                          zero_temp_slopes=slopes,
                          max_orbit_average=scan.max_orbit_average)
