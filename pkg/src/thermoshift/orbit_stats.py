"""Weighted orbit measures and their distributional statistics.

The measure on length-n closed orbits weights each orbit atom by
Lambda(gamma) exp(ell_psi(gamma)), where Lambda is the prime period of
the underlying prime orbit.  With that factor the total weight equals
the weighted trace of the transfer matrix, so each length-n cyclic word
contributes exactly once; flow windows (built in :mod:`suspension`)
drop the factor so that an unweighted window is uniform over orbits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.special import ndtr

from .errors import DegenerateVarianceError, NumericsError, PotentialError
from .potentials import LocallyConstantPotential, cyclic_sums
from .sft import ClosedOrbit, PrimeOrbit, Sft, divisors, prime_word_matrix

DEGENERATE_SCALE = 1e-8
ZERO_PERIOD_TOL_PER_STEP = 1e-9


@dataclass(frozen=True)
class _AtomSegment:
    """Contiguous run of atoms sharing base period and multiplicity."""

    base_period: int
    multiplicity: int
    words: np.ndarray  # (count, base_period)


class WeightedOrbitMeasure:
    """Probability measure on closed orbits with weights prop. to exp(ell_psi)."""

    def __init__(self, n, atom_objects: list, segments: list[_AtomSegment],
                 log_weights: np.ndarray):
        if len(atom_objects) == 0:
            raise NumericsError("weighted orbit measure has no atoms")
        log_weights = np.asarray(log_weights, dtype=float)
        mx = log_weights.max()
        self.normalizer = mx + math.log(np.exp(log_weights - mx).sum())
        w = np.exp(log_weights - self.normalizer)
        self.n = n
        self._segments = segments
        self._weights = w
        self.atoms = list(zip(atom_objects, w.tolist()))
        total = w.sum()
        if abs(total - 1.0) > 1e-12:
            raise NumericsError(f"atom weights sum to {total}, not 1")

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    def period_values(self, phi: LocallyConstantPotential) -> np.ndarray:
        """Birkhoff sums of ``phi`` over every atom, in atom order."""
        parts = [seg.multiplicity * cyclic_sums(phi, seg.words) for seg in self._segments]
        return np.concatenate(parts)


def weighted_orbit_measure(sft: Sft, psi: LocallyConstantPotential, n: int,
                           budget: int | None = None) -> WeightedOrbitMeasure:
    """The measure on closed orbits of length exactly n weighted by psi.

    Atoms are prime orbits of each period d | n traversed n/d times; the
    log-weight of an atom is log d + (n/d) ell_psi(base), normalized by a
    single log-sum-exp.
    """
    if psi.sft != sft:
        raise PotentialError("potential lives on a different subshift")
    if n < 1:
        raise NumericsError("n must be a positive integer")
    atom_objects: list[ClosedOrbit] = []
    segments: list[_AtomSegment] = []
    logs = []
    for d in divisors(n):
        words = prime_word_matrix(sft, d, budget)
        if words.shape[0] == 0:
            continue
        m = n // d
        segments.append(_AtomSegment(d, m, words))
        logs.append(math.log(d) + m * cyclic_sums(psi, words))
        for row in words:
            atom_objects.append(ClosedOrbit(PrimeOrbit(tuple(int(x) for x in row)), m))
    return WeightedOrbitMeasure(n, atom_objects, segments, np.concatenate(logs))


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted atoms of a probability distribution on the line."""

    values: np.ndarray
    masses: np.ndarray

    @staticmethod
    def from_weighted(values: np.ndarray, masses: np.ndarray) -> "EmpiricalDistribution":
        values = np.asarray(values, dtype=float)
        masses = np.asarray(masses, dtype=float)
        if values.size == 0:
            raise NumericsError("empirical distribution needs at least one atom")
        if abs(masses.sum() - 1.0) > 1e-9:
            raise NumericsError(f"masses sum to {masses.sum()}, not 1")
        uniq, inverse = np.unique(values, return_inverse=True)
        merged = np.zeros(uniq.shape)
        np.add.at(merged, inverse, masses)
        return EmpiricalDistribution(uniq, merged)

    def mean(self) -> float:
        return float(self.values @ self.masses)

    def variance(self) -> float:
        mu = self.mean()
        return float(((self.values - mu) ** 2) @ self.masses)


def normalized_period_sample(measure: WeightedOrbitMeasure, phi: LocallyConstantPotential,
                             center: float, scale: float) -> EmpiricalDistribution:
    """Distribution of (ell_phi - n center) / (scale sqrt(n)) under the measure.

    A scale at or below the degeneracy threshold is refused; callers must
    branch to the point-mass check in that regime instead of normalizing.
    """
    if scale <= DEGENERATE_SCALE:
        raise DegenerateVarianceError(
            f"scale {scale} is degenerate; check for a point mass at 0 instead")
    vals = measure.period_values(phi)
    n = measure.n
    x = (vals - n * center) / (scale * math.sqrt(n))
    return EmpiricalDistribution.from_weighted(x, measure.weights)


def ks_distance_to_standard_normal(dist: EmpiricalDistribution) -> float:
    """Sup distance between the atomic CDF and the standard normal CDF.

    Both one-sided gaps are evaluated at every atom: the CDF value just
    after the atom and just before it are each compared against Phi.
    """
    upper = np.cumsum(dist.masses)
    lower = upper - dist.masses
    phi = ndtr(dist.values)
    return float(max(np.abs(upper - phi).max(), np.abs(lower - phi).max()))


def weighted_proportion(measure: WeightedOrbitMeasure, phi: LocallyConstantPotential,
                        predicate: str, tol: float | None = None) -> float:
    """Total weight of atoms whose phi-period is zero (|.| <= tol) or positive (> tol).

    The default tolerance scales with accumulated rounding:
    1e-9 * n * sup|phi|.
    """
    if predicate not in ("zero", "positive"):
        raise NumericsError(f"predicate must be 'zero' or 'positive', got {predicate!r}")
    if tol is None:
        tol = ZERO_PERIOD_TOL_PER_STEP * measure.n * phi.sup_norm
    if tol < 0:
        raise NumericsError("tolerance must be nonnegative")
    vals = measure.period_values(phi)
    mask = np.abs(vals) <= tol if predicate == "zero" else vals > tol
    w = measure.weights
    # Dividing by the same sum makes an all-pass mask return exactly 1.0
    # and an empty mask exactly 0.0.
    return float(w[mask].sum() / w.sum())


def exponential_growth_rate(counts: Mapping[int, float]) -> float:
    """Least-squares slope of log counts against n over the top half of n.

    Zero counts are omitted; fewer than four nonzero points is an error.
    """
    pts = sorted((int(n), float(c)) for n, c in counts.items() if c > 0)
    if len(pts) < 4:
        raise NumericsError(
            f"need at least 4 nonzero counts for a growth rate, got {len(pts)}")
    top = pts[len(pts) // 2:]
    x = np.array([n for n, _ in top], dtype=float)
    y = np.array([math.log(c) for _, c in top])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
