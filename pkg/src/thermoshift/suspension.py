"""Suspension flows over subshifts with locally constant roof functions.

Closed flow orbits are base closed orbits with length equal to the
roof's Birkhoff sum.  Flow pressure solves the Bowen equation
pressure(psi - s roof) = 0; windowed orbit statistics realize the
continuous-time counting and central-limit machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import BracketError, BudgetError, DegenerateVarianceError, NumericsError, PotentialError
from .orbit_stats import (WeightedOrbitMeasure, _AtomSegment, ks_distance_to_standard_normal,
                          normalized_period_sample)
from .potentials import LocallyConstantPotential, cyclic_sums, linear_combination
from .sft import DEFAULT_ORBIT_BUDGET, ClosedOrbit, PrimeOrbit, Sft, prime_word_matrix
from .thermo import equilibrium_state, integrate, pressure_spectral, second_difference, variance_green_kubo

BOWEN_RESIDUAL_TOL = 1e-10
ROOF_VARIANCE_FLOOR = 1e-3


@dataclass(frozen=True)
class SuspensionFlow:
    """A subshift together with a strictly positive roof potential."""

    base: Sft
    roof: LocallyConstantPotential
    r_min: float

    def __repr__(self):
        return f"SuspensionFlow(alphabet={self.base.alphabet_size}, r_min={self.r_min})"


@dataclass(frozen=True)
class FlowOrbit:
    """A closed flow orbit: a base closed orbit with its roof length."""

    base_orbit: ClosedOrbit
    length: float

    def __repr__(self):
        return f"FlowOrbit({self.base_orbit!r}, length={self.length:.6f})"


def make_suspension(sft: Sft, roof: LocallyConstantPotential) -> SuspensionFlow:
    """Validate a roof and build the suspension flow."""
    if roof.sft != sft:
        raise PotentialError("roof lives on a different subshift")
    bad = [w for w, v in roof.values.items() if v <= 0.0]
    if bad:
        raise PotentialError(f"roof must be strictly positive; window {bad[0]} has "
                             f"value {roof.values[bad[0]]}")
    return SuspensionFlow(base=sft, roof=roof, r_min=min(roof.values.values()))


def _window_segments(flow: SuspensionFlow, psi_bar: LocallyConstantPotential | None,
                     lo: float, hi: float, budget: int | None, prime_only: bool):
    """Per-(period, multiplicity) arrays of flow orbits with length in (lo, hi].

    Yields (d, m, words, lengths, psi_sums), selecting rows in the window.
    Deterministic order: base period ascending, multiplicity ascending,
    words lexicographic.
    """
    if hi <= 0:
        return
    limit = DEFAULT_ORBIT_BUDGET if budget is None else budget
    n_max = math.ceil(hi / flow.r_min)
    seen = 0
    for d in range(1, n_max + 1):
        words = prime_word_matrix(flow.base, d, budget)
        if words.shape[0] == 0:
            continue
        seen += words.shape[0]
        if seen > limit:
            raise BudgetError(f"window enumeration exceeded the budget of {limit} prime orbits")
        roof_sums = cyclic_sums(flow.roof, words)
        psi_sums = cyclic_sums(psi_bar, words) if psi_bar is not None else np.zeros(len(words))
        m = 1
        while m * d * flow.r_min <= hi:
            lengths = m * roof_sums
            sel = (lengths > lo) & (lengths <= hi)
            if sel.any():
                yield d, m, words[sel], lengths[sel], m * psi_sums[sel]
            if prime_only:
                break
            m += 1


def flow_orbits_in_window(flow: SuspensionFlow, T: float, delta: float | None = None,
                          budget: int | None = None,
                          prime_only: bool = False) -> list[FlowOrbit]:
    """Flow orbits with length in (T, T+delta], or in (0, T] when delta is None."""
    if T < 0:
        raise NumericsError("T must be nonnegative")
    lo, hi = (T, T + delta) if delta is not None else (0.0, T)
    out = []
    for d, m, words, lengths, _ in _window_segments(flow, None, lo, hi, budget, prime_only):
        for row, L in zip(words, lengths):
            base = ClosedOrbit(PrimeOrbit(tuple(int(x) for x in row)), m)
            out.append(FlowOrbit(base, float(L)))
    return out


def weighted_count(flow: SuspensionFlow, psi_bar: LocallyConstantPotential,
                   T: float, delta: float | None = None, budget: int | None = None,
                   prime_only: bool = False) -> float:
    """Sum of exp(ell_psi(gamma)) over flow orbits in the window.

    Accumulated by log-sum-exp; an empty window returns 0.0 (the log
    weight's minus-infinity sentinel exponentiated).
    """
    lo, hi = (T, T + delta) if delta is not None else (0.0, T)
    logs = [s for *_, s in _window_segments(flow, psi_bar, lo, hi, budget, prime_only)]
    if not logs:
        return 0.0
    allv = np.concatenate(logs)
    mx = allv.max()
    return float(math.exp(mx) * np.exp(allv - mx).sum())


def flow_pressure(flow: SuspensionFlow, psi_bar: LocallyConstantPotential,
                  budget: int | None = None) -> float:
    """The Bowen root: the unique s with pressure(psi - s roof) = 0.

    Since the roof is strictly positive the pressure is strictly
    decreasing in s, so a geometrically grown bracket plus bisection and
    a Newton polish pin the root; the residual is checked against 1e-10.
    """
    return _bowen_root(flow, psi_bar)


def _bowen_root(flow: SuspensionFlow, pot: LocallyConstantPotential) -> float:
    def p_at(s: float) -> float:
        return pressure_spectral(flow.base, linear_combination([1.0, -s], [pot, flow.roof])).value

    f0 = p_at(0.0)
    if f0 == 0.0:
        return 0.0
    lo, hi = (0.0, 1.0) if f0 > 0 else (-1.0, 0.0)
    grow = 0
    while p_at(hi) > 0:
        lo, hi = hi, 2.0 * hi if hi > 0 else 1.0
        grow += 1
        if grow > 60:
            raise BracketError(f"no sign change for the Bowen root on [0, {hi}]")
    grow = 0
    while p_at(lo) < 0:
        lo, hi = 2.0 * lo if lo < 0 else -1.0, lo
        grow += 1
        if grow > 60:
            raise BracketError(f"no sign change for the Bowen root on [{lo}, 0]")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if p_at(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-9:
            break
    s = 0.5 * (lo + hi)
    for _ in range(8):
        fs = p_at(s)
        if abs(fs) < 1e-15:
            break
        state = equilibrium_state(flow.base, linear_combination([1.0, -s], [pot, flow.roof]))
        slope = integrate(state, flow.roof)
        s = s + fs / slope
    residual = p_at(s)
    if abs(residual) > BOWEN_RESIDUAL_TOL:
        raise NumericsError(f"Bowen root residual {residual:.3e} exceeds {BOWEN_RESIDUAL_TOL}")
    return s


@dataclass(frozen=True)
class CountingRow:
    T: float
    orbit_count: int
    weighted_sum: float
    ratio: float
    prime_gap: float


def verify_counting_asymptotics(flow: SuspensionFlow, psi_bar: LocallyConstantPotential,
                                T_grid: Sequence[float],
                                budget: int | None = None) -> list[CountingRow]:
    """Cumulative prime-orbit weighted sums against e^{PT}/(PT).

    For each T: ratio of the prime cumulative sum to the predicted main
    term, and the non-prime rate gap log(nonprime sum)/T - P, which must
    stay negative (non-prime orbits are exponentially negligible).
    Requires positive flow pressure.
    """
    grid = sorted(float(t) for t in T_grid)
    if not grid or grid[0] <= 0:
        raise NumericsError("T grid must contain positive values")
    p_flow = flow_pressure(flow, psi_bar)
    if p_flow <= 0:
        raise NumericsError(f"counting asymptotics need positive flow pressure, got {p_flow}")
    t_max = grid[-1]
    prime_len, prime_logw = [], []
    rep_len, rep_logw = [], []
    for d, m, _, lengths, logs in _window_segments(flow, psi_bar, 0.0, t_max, budget, False):
        if m == 1:
            prime_len.append(lengths)
            prime_logw.append(logs)
        else:
            rep_len.append(lengths)
            rep_logw.append(logs)
    pl = np.concatenate(prime_len) if prime_len else np.zeros(0)
    pw = np.concatenate(prime_logw) if prime_logw else np.zeros(0)
    rl = np.concatenate(rep_len) if rep_len else np.zeros(0)
    rw = np.concatenate(rep_logw) if rep_logw else np.zeros(0)
    rows = []
    for T in grid:
        sel = pl <= T
        count = int(sel.sum())
        if count:
            mx = pw[sel].max()
            total = math.exp(mx) * float(np.exp(pw[sel] - mx).sum())
        else:
            total = 0.0
        ratio = total / (math.exp(p_flow * T) / (p_flow * T))
        rsel = rl <= T
        if rsel.any():
            mx = rw[rsel].max()
            rep_log_total = mx + math.log(float(np.exp(rw[rsel] - mx).sum()))
            gap = rep_log_total / T - p_flow
        else:
            gap = -math.inf
        rows.append(CountingRow(T=T, orbit_count=count, weighted_sum=total,
                                ratio=ratio, prime_gap=gap))
    return rows


def flow_weighted_measure(flow: SuspensionFlow, psi_bar: LocallyConstantPotential,
                          T: float, delta: float,
                          budget: int | None = None) -> WeightedOrbitMeasure:
    """The window measure on flow orbits in (T, T+delta] weighted by exp(ell_psi).

    Every closed orbit (prime or repeated) is one atom weighted by its
    own exp(ell_psi); with psi = 0 the measure is uniform over window
    orbits.
    """
    atoms, segments, logs = [], [], []
    for d, m, words, lengths, logw in _window_segments(flow, psi_bar, T, T + delta,
                                                       budget, False):
        segments.append(_AtomSegment(d, m, words))
        logs.append(logw)
        for row, L in zip(words, lengths):
            base = ClosedOrbit(PrimeOrbit(tuple(int(x) for x in row)), m)
            atoms.append(FlowOrbit(base, float(L)))
    if not atoms:
        raise NumericsError(f"window ({T}, {T + delta}] contains no flow orbits")
    return WeightedOrbitMeasure(T, atoms, segments, np.concatenate(logs))


def center_flow_observable(flow: SuspensionFlow, psi_bar: LocallyConstantPotential,
                           phi_bar: LocallyConstantPotential
                           ) -> tuple[LocallyConstantPotential, float]:
    """Subtract the multiple of the roof that kills the flow equilibrium mean.

    The flow mean of the induced observable is m(phi)/m(roof) under the
    base equilibrium state m of psi - s* roof; returning
    phi - c roof with c = m(phi)/m(roof) zeroes it.
    """
    s_star = flow_pressure(flow, psi_bar)
    state = equilibrium_state(flow.base,
                              linear_combination([1.0, -s_star], [psi_bar, flow.roof]))
    c = integrate(state, phi_bar) / integrate(state, flow.roof)
    centered = linear_combination([1.0, -c], [phi_bar, flow.roof])
    return centered, c


def flow_sigma_squared(flow: SuspensionFlow, psi_bar: LocallyConstantPotential,
                       phi_bar: LocallyConstantPotential, step: float = 0.01) -> float:
    """Flow dynamical variance from the curvature of the Bowen root.

    s(t) solves pressure(psi + t phi_c - s roof) = 0 for the centered
    observable; the Richardson second difference at t = 0 is the flow
    variance (for roof = 1 it reduces to the discrete curvature
    estimator exactly).
    """
    centered, _ = center_flow_observable(flow, psi_bar, phi_bar)

    def root(t: float) -> float:
        pot = linear_combination([1.0, t], [psi_bar, centered]) if t != 0.0 else psi_bar
        return _bowen_root(flow, pot)

    return second_difference(root, step)


class FlowCltResult(NamedTuple):
    ks_distance: float
    sigma_flow: float


def flow_clt_check(flow: SuspensionFlow, psi_bar: LocallyConstantPotential,
                   phi_bar: LocallyConstantPotential, T: float, delta: float,
                   step: float = 0.01, budget: int | None = None) -> FlowCltResult:
    """KS distance of ell_phi / sqrt(T) on the window against N(0, sigma_flow^2).

    The observable is centered internally so its flow equilibrium mean
    vanishes.  Roofs whose Green-Kubo variance under the relevant
    equilibrium state is below 1e-3 are rejected: constant-type roofs
    are the excluded lattice case.
    """
    s_star = flow_pressure(flow, psi_bar)
    state = equilibrium_state(flow.base,
                              linear_combination([1.0, -s_star], [psi_bar, flow.roof]))
    roof_var = variance_green_kubo(state, flow.roof)
    if roof_var <= ROOF_VARIANCE_FLOOR:
        raise NumericsError(
            f"roof variance {roof_var:.3e} is below {ROOF_VARIANCE_FLOOR}; "
            "constant-type roofs are excluded from the flow CLT")
    sigma2 = flow_sigma_squared(flow, psi_bar, phi_bar, step)
    if sigma2 <= 1e-8:
        raise DegenerateVarianceError(
            f"flow variance {sigma2:.3e} is degenerate; check for a point mass at 0 instead")
    centered, _ = center_flow_observable(flow, psi_bar, phi_bar)
    measure = flow_weighted_measure(flow, psi_bar, T, delta, budget)
    sample = normalized_period_sample(measure, centered, 0.0, math.sqrt(sigma2))
    return FlowCltResult(ks_distance=ks_distance_to_standard_normal(sample),
                         sigma_flow=math.sqrt(sigma2))
