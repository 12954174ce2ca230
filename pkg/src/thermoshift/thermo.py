"""Pressure, equilibrium states, and dynamical variances.

The transfer matrix of a depth-k potential acts on admissible
(k-1)-blocks; its Perron eigendata give the pressure (log spectral
radius), the Gibbs-Markov equilibrium state, and through the pressure
function's second derivative the dynamical variance.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BranchAmbiguityError, ConvergenceError, NumericsError, PotentialError
from .potentials import (LocallyConstantPotential, admissible_windows, cyclic_sums,
                         linear_combination, refine_depth)
from .sft import Sft, divisors, prime_word_matrix

POWER_ITERATION_TOL = 1e-13
POWER_ITERATION_MAX = 100_000
BRANCH_STEP = 0.05
BRANCH_RADIUS = 0.5
GREEN_KUBO_MAX_LAG = 200


@dataclass(frozen=True)
class TransferMatrix:
    """Weighted adjacency matrix of a potential on overlapping blocks.

    ``matrix`` holds exp(psi(window) - log_shift_per_step) entries, where
    the shift is the maximum potential value.  Factoring the shift out
    keeps entries <= 1 and makes pressure exactly additive under constant
    shifts of the potential.
    """

    sft: Sft
    potential: LocallyConstantPotential
    block_length: int
    blocks: tuple[tuple[int, ...], ...]
    matrix: np.ndarray
    log_shift: float

    @property
    def block_index(self) -> dict[tuple[int, ...], int]:
        return {b: i for i, b in enumerate(self.blocks)}


@dataclass(frozen=True)
class PressureEstimate:
    value: float
    method: str
    error_bound: float
    n_used: tuple[int, int] | None = None


@dataclass(frozen=True)
class EquilibriumState:
    """Gibbs-Markov equilibrium state of a potential, as a block chain."""

    sft: Sft
    psi: LocallyConstantPotential
    block_length: int
    blocks: tuple[tuple[int, ...], ...]
    stationary: np.ndarray
    transition: np.ndarray
    entropy: float
    pressure: float

    @property
    def block_index(self) -> dict[tuple[int, ...], int]:
        return {b: i for i, b in enumerate(self.blocks)}

    def mean_of(self, phi: LocallyConstantPotential) -> float:
        return integrate(self, phi)


def transfer_matrix(sft: Sft, psi: LocallyConstantPotential,
                    block_length: int | None = None) -> TransferMatrix:
    """Build the transfer matrix of ``psi`` on admissible blocks.

    Blocks have length max(depth-1, 1) unless a larger ``block_length``
    is requested; entry(b -> b') = exp(psi(w)) where w is the overlap of
    b and b' and psi reads the trailing depth-k symbols of w.
    """
    if psi.sft != sft:
        raise PotentialError("potential lives on a different subshift")
    k = psi.depth
    m = max(k - 1, 1)
    if block_length is not None:
        if block_length < m:
            raise PotentialError(f"block_length must be >= {m}")
        m = block_length
    blocks = tuple(admissible_windows(sft, m))
    index = {b: i for i, b in enumerate(blocks)}
    shift = max(psi.values.values())
    size = len(blocks)
    mat = np.zeros((size, size))
    for i, b in enumerate(blocks):
        for c in sft.successors(b[-1]):
            b2 = b[1:] + (c,)
            j = index.get(b2)
            if j is None:
                continue
            window = (b + (c,))[-k:]
            mat[i, j] = math.exp(psi.values[window] - shift)
    return TransferMatrix(sft, psi, m, blocks, mat, shift)


def _perron(matrix: np.ndarray, tol: float = POWER_ITERATION_TOL,
            max_iter: int = POWER_ITERATION_MAX) -> tuple[float, np.ndarray, float]:
    """Perron eigenvalue and right eigenvector by power iteration.

    Collatz-Wielandt ratios bracket the eigenvalue at every step, so the
    returned error bound is rigorous for a nonnegative irreducible
    aperiodic matrix.
    """
    size = matrix.shape[0]
    v = np.full(size, 1.0 / size)
    lam = 0.0
    err = math.inf
    for _ in range(max_iter):
        w = matrix @ v
        ratios = w / v
        hi = ratios.max()
        lo = ratios.min()
        lam = 0.5 * (hi + lo)
        err = 0.5 * (hi - lo)
        v = w / w.sum()
        if err <= tol * lam:
            return lam, v, err
    raise ConvergenceError(
        f"power iteration did not reach tol={tol} within {max_iter} iterations "
        f"(last bracket width {err:.3e})")


def pressure_spectral(sft: Sft, psi: LocallyConstantPotential,
                      block_length: int | None = None) -> PressureEstimate:
    """Topological pressure as the log spectral radius of the transfer matrix."""
    tm = transfer_matrix(sft, psi, block_length)
    lam, _, err = _perron(tm.matrix)
    return PressureEstimate(value=tm.log_shift + math.log(lam), method="spectral",
                            error_bound=err / lam)


def pressure_orbit_sum(sft: Sft, psi: LocallyConstantPotential,
                       n_range: Sequence[int], budget: int | None = None) -> PressureEstimate:
    """Pressure from weighted closed-orbit sums.

    a_n = log sum over closed orbits of length n of Lambda(gamma)
    exp(ell_psi(gamma)), accumulated by compensated log-sum-exp; the
    estimate is the least-squares slope of a_n against n over the top
    half of ``n_range``, which cancels the O(1) offset.
    """
    ns = sorted(set(int(n) for n in n_range))
    if len(ns) < 2:
        raise NumericsError("need at least two lengths for the orbit-sum slope")
    a = {}
    for n in ns:
        parts = []
        for d in divisors(n):
            words = prime_word_matrix(sft, d, budget)
            if words.shape[0] == 0:
                continue
            parts.append(math.log(d) + (n // d) * cyclic_sums(psi, words))
        logs = np.concatenate(parts)
        mx = logs.max()
        a[n] = mx + math.log(np.exp(logs - mx).sum())
    used = ns[len(ns) // 2:]
    x = np.array(used, dtype=float)
    y = np.array([a[n] for n in used])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    if len(used) > 2:
        se = math.sqrt((resid @ resid) / (len(used) - 2) / ((x - x.mean()) @ (x - x.mean())))
    else:
        se = 0.0
    return PressureEstimate(value=float(slope), method="orbit_sum", error_bound=se,
                            n_used=(used[0], used[-1]))


def equilibrium_state(sft: Sft, psi: LocallyConstantPotential,
                      block_length: int | None = None) -> EquilibriumState:
    """Equilibrium state from left/right Perron eigenvectors.

    Block transition p(b -> b') = entry(b,b') r(b') / (lambda r(b)); the
    stationary vector is the normalized product of left and right
    eigenvectors; entropy is the usual Markov-chain entropy rate.
    """
    tm = transfer_matrix(sft, psi, block_length)
    lam, right, _ = _perron(tm.matrix)
    _, left, _ = _perron(tm.matrix.T)
    pi = left * right
    pi /= pi.sum()
    trans = tm.matrix * right[None, :] / (lam * right[:, None])
    trans /= trans.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(trans > 0, trans * np.log(trans), 0.0)
    entropy = float(-(pi @ plogp.sum(axis=1)))
    if entropy <= 0.0:
        raise NumericsError(
            f"equilibrium state has nonpositive entropy ({entropy:.3e}); "
            "the system is degenerate for these statistics")
    return EquilibriumState(sft=sft, psi=psi, block_length=tm.block_length,
                            blocks=tm.blocks, stationary=pi, transition=trans,
                            entropy=entropy, pressure=tm.log_shift + math.log(lam))


def integrate(state: EquilibriumState, phi: LocallyConstantPotential) -> float:
    """Mean of ``phi`` under the equilibrium state.

    Sums phi(window) times the cylinder probability of each admissible
    window, where windows extend the block chain far enough to determine
    phi.
    """
    if phi.sft != state.sft:
        raise PotentialError("observable lives on a different subshift")
    m = state.block_length
    depth = max(phi.depth, m + 1)
    phi_r = refine_depth(phi, depth)
    index = state.block_index
    total = 0.0
    for w in admissible_windows(state.sft, depth):
        i = index[w[:m]]
        prob = state.stationary[i]
        for step in range(depth - m):
            j = index[w[step + 1:step + 1 + m]]
            prob *= state.transition[i, j]
            i = j
        total += prob * phi_r.values[w]
    return total


def variance_green_kubo(state: EquilibriumState, phi: LocallyConstantPotential,
                        max_lag: int = GREEN_KUBO_MAX_LAG) -> float:
    """Dynamical variance as an autocovariance series over the block chain.

    sigma^2 = C(0) + 2 sum_{j=1..max_lag} C(j) with lag covariances of the
    centered observable computed exactly by transition-matrix powers.
    Warns when the series has not decayed below 1e-10 C(0) at max_lag.
    """
    m = max(state.block_length, phi.depth)
    if m != state.block_length:
        state = equilibrium_state(state.sft, state.psi, block_length=m)
    phi_r = refine_depth(phi, m) if phi.depth < m else phi
    g = np.array([phi_r.values[b[:phi_r.depth]] for b in state.blocks])
    pi = state.stationary
    mean = float(pi @ g)
    gc = g - mean
    c0 = float(pi @ (gc * gc))
    sigma2 = c0
    v = gc.copy()
    last = c0
    for _ in range(max_lag):
        v = state.transition @ v
        last = float((pi * gc) @ v)
        sigma2 += 2.0 * last
    if c0 > 0 and abs(last) > 1e-10 * c0:
        warnings.warn(
            f"autocovariance has not decayed at lag {max_lag}: |C| = {abs(last):.3e}",
            RuntimeWarning, stacklevel=2)
    return max(sigma2, 0.0)


def second_difference(f, h: float) -> float:
    """Richardson-extrapolated second central difference of f at 0."""
    def d(hh: float) -> float:
        return (f(hh) - 2.0 * f(0.0) + f(-hh)) / (hh * hh)
    return (4.0 * d(h / 2.0) - d(h)) / 3.0


def variance_curvature(sft: Sft, psi: LocallyConstantPotential,
                       phi: LocallyConstantPotential, step: float = 0.01) -> float:
    """Dynamical variance as the curvature of t -> pressure(psi + t phi) at 0."""
    if not (0.0 < step <= 0.1):
        raise NumericsError(f"step must lie in (0, 0.1], got {step}")

    def p(t: float) -> float:
        if t == 0.0:
            return pressure_spectral(sft, psi).value
        return pressure_spectral(sft, linear_combination([1.0, t], [psi, phi])).value

    return second_difference(p, step)


def mean_slope(sft: Sft, psi: LocallyConstantPotential,
               phi: LocallyConstantPotential, step: float = 0.01) -> float:
    """First derivative of t -> pressure(psi + t phi) at 0 by central difference."""
    def p(t: float) -> float:
        return pressure_spectral(sft, linear_combination([1.0, t], [psi, phi])).value
    return (p(step) - p(-step)) / (2.0 * step)


def complex_pressure(sft: Sft, psi: LocallyConstantPotential,
                     phi: LocallyConstantPotential, t: float,
                     branch_radius: float = BRANCH_RADIUS,
                     step: float = BRANCH_STEP) -> complex:
    """The eigenvalue branch s(t) = pressure(psi + i t phi) through t = 0.

    The complex-weighted transfer matrix's eigenvalue continuously
    connected to the Perron eigenvalue is tracked by stepping t from 0 in
    increments of at most ``step`` and matching the nearest eigenvalue.
    Two candidates within the tracking tolerance raise
    :class:`BranchAmbiguityError` rather than silently picking one.
    """
    if abs(t) > branch_radius:
        raise NumericsError(f"|t| = {abs(t)} exceeds the branch radius {branch_radius}")
    if phi.sft != sft or psi.sft != sft:
        raise PotentialError("potentials live on a different subshift")
    depth = max(psi.depth, phi.depth)
    psi_r = refine_depth(psi, depth)
    phi_r = refine_depth(phi, depth)
    m = max(depth - 1, 1)
    blocks = tuple(admissible_windows(sft, m))
    index = {b: i for i, b in enumerate(blocks)}
    shift = max(psi_r.values.values())
    size = len(blocks)
    base = np.zeros((size, size))
    phase = np.zeros((size, size))
    for i, b in enumerate(blocks):
        for c in sft.successors(b[-1]):
            j = index.get(b[1:] + (c,))
            if j is None:
                continue
            window = (b + (c,))[-depth:]
            base[i, j] = math.exp(psi_r.values[window] - shift)
            phase[i, j] = phi_r.values[window]

    lam_prev = complex(_perron(base)[0])
    if t == 0.0:
        return shift + cmath.log(lam_prev)
    n_steps = max(1, math.ceil(abs(t) / step))
    for idx in range(1, n_steps + 1):
        tt = t * idx / n_steps
        mat = base * np.exp(1j * tt * phase)
        eig = np.linalg.eigvals(mat)
        dist = np.abs(eig - lam_prev)
        order = np.argsort(dist)
        d1 = dist[order[0]]
        if len(eig) > 1:
            d2 = dist[order[1]]
            if d2 < 2.0 * d1 and d1 > 1e-12 * abs(lam_prev):
                raise BranchAmbiguityError(
                    f"two eigenvalues within tracking tolerance at t = {tt:.4f}: "
                    f"distances {d1:.3e} and {d2:.3e}")
        lam_prev = complex(eig[order[0]])
    return shift + cmath.log(lam_prev)
