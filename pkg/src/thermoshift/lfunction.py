"""Truncations of the weighted dynamical L-function and its log derivative.

eta(s, t) sums ell(gamma) exp(n ell_psi - s n ell + i t n ell_phi) over
prime orbits gamma and repetition counts n.  In the discrete case the
truncated double sum is evaluated exactly by regrouping prime-orbit
terms through Mobius inversion of weighted transfer-matrix traces, which
keeps large base-period truncations affordable; suspension flows fall
back to direct orbit enumeration.  Every value carries a geometric tail
bound, since the series diverges at the pole.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import curve_fit

from .errors import NumericsError, PoleFitError
from .potentials import LocallyConstantPotential, admissible_windows, cyclic_sums, refine_depth
from .sft import Sft, divisors, prime_word_matrix
from .suspension import SuspensionFlow, flow_pressure
from .thermo import complex_pressure, pressure_spectral

DEFAULT_MAX_REPETITION = 8
DOMAIN_MARGIN = 1e-3
POLE_RESIDUAL_TOL = 0.05


@dataclass(frozen=True)
class LSeriesTruncation:
    """Truncation bounds and data for the weighted L-function series."""

    system: Sft | SuspensionFlow
    psi: LocallyConstantPotential
    phi: LocallyConstantPotential | None = None
    max_base_period: int = 40
    max_repetition: int = DEFAULT_MAX_REPETITION

    def __post_init__(self):
        if self.max_base_period < 1 or self.max_repetition < 1:
            raise NumericsError("truncation bounds must be positive integers")

    @property
    def sft(self) -> Sft:
        return self.system.base if isinstance(self.system, SuspensionFlow) else self.system

    def pressure(self) -> float:
        if isinstance(self.system, SuspensionFlow):
            return flow_pressure(self.system, self.psi)
        return pressure_spectral(self.system, self.psi).value


class EtaValue(NamedTuple):
    value: complex
    tail_bound: float


def eta_truncated(trunc: LSeriesTruncation, s: complex, t: float = 0.0,
                  margin: float = DOMAIN_MARGIN) -> EtaValue:
    """Partial sum of eta(s, t) over the truncation rectangle.

    Requires Re(s) > pressure + margin so the omitted tail is summable;
    the returned tail bound is the geometric envelope of the dropped
    base periods and repetitions.
    """
    s = complex(s)
    pressure = trunc.pressure()
    if s.real <= pressure + margin:
        raise NumericsError(
            f"Re(s) = {s.real} is not above pressure {pressure:.6f} + margin {margin}")
    if isinstance(trunc.system, SuspensionFlow):
        value = _eta_flow(trunc, s, t)
        step = trunc.system.r_min
    else:
        value = _eta_discrete(trunc, s, t, pressure)
        step = 1.0
    tail = _tail_envelope(trunc, s.real - pressure, step)
    return EtaValue(value=value, tail_bound=tail)


def _eta_discrete(trunc: LSeriesTruncation, s: complex, t: float,
                  pressure: float) -> complex:
    """Exact regrouped evaluation of the truncated prime-orbit double sum.

    W_n(d) = sum over prime orbits of period d of exp(n(ell_psi + i t
    ell_phi)) satisfies tr(B_n^d) = sum_{d'|d} d' W_{n d / d'}(d') for the
    transfer matrix B_n of n(psi + i t phi); inverting the divisor sums
    recovers each W_n(d) without enumerating orbits.  The potential is
    centered by the pressure so every matrix power stays bounded.
    """
    sft = trunc.sft
    psi, phi = trunc.psi, trunc.phi
    depth = max(psi.depth, phi.depth if phi is not None else 1)
    psi_r = refine_depth(psi, depth)
    phi_r = refine_depth(phi, depth) if phi is not None else None
    m = max(depth - 1, 1)
    blocks = list(admissible_windows(sft, m))
    index = {b: i for i, b in enumerate(blocks)}
    size = len(blocks)
    entries = np.zeros((size, size), dtype=complex)
    for i, b in enumerate(blocks):
        for c in sft.successors(b[-1]):
            j = index.get(b[1:] + (c,))
            if j is None:
                continue
            w = (b + (c,))[-depth:]
            arg = psi_r.values[w] - pressure
            ph = t * phi_r.values[w] if phi_r is not None else 0.0
            entries[i, j] = cmath.exp(complex(arg, ph))
    D, N = trunc.max_base_period, trunc.max_repetition
    max_centered = max(v - pressure for v in psi.values.values())
    if max_centered * N * D > 700:
        raise NumericsError(
            "centered potential values are too large for this truncation; "
            "reduce max_base_period or max_repetition")

    eig_cache: dict[int, np.ndarray] = {}

    def trace(j: int, e: int) -> complex:
        lam = eig_cache.get(j)
        if lam is None:
            lam = np.linalg.eigvals(entries ** j)
            eig_cache[j] = lam
        return complex((lam ** e).sum())

    w_table: dict[tuple[int, int], complex] = {}
    for d in range(1, D + 1):
        divs = divisors(d)[:-1]
        for n in range(1, (N * D) // d + 1):
            acc = trace(n, d)
            for dp in divs:
                acc -= dp * w_table[(n * d // dp, dp)]
            w_table[(n, d)] = acc / d

    st = s - pressure
    total = 0.0 + 0.0j
    for d in range(1, D + 1):
        for n in range(1, N + 1):
            total += d * w_table[(n, d)] * cmath.exp(-st * n * d)
    return total


def _eta_flow(trunc: LSeriesTruncation, s: complex, t: float) -> complex:
    flow = trunc.system
    psi, phi = trunc.psi, trunc.phi
    total = 0.0 + 0.0j
    for d in range(1, trunc.max_base_period + 1):
        words = prime_word_matrix(flow.base, d)
        if words.shape[0] == 0:
            continue
        lengths = cyclic_sums(flow.roof, words)
        lpsi = cyclic_sums(psi, words)
        lphi = cyclic_sums(phi, words) if phi is not None else np.zeros(len(words))
        for n in range(1, trunc.max_repetition + 1):
            expo = n * lpsi - s * n * lengths + 1j * t * n * lphi
            total += complex((lengths * np.exp(expo)).sum())
    return total


def _tail_envelope(trunc: LSeriesTruncation, gap: float, step: float) -> float:
    """Geometric envelope for the dropped terms.

    Traces of the centered system are bounded by the state count (every
    eigenvalue is dominated by the Perron value, and repeated weights
    have nonpositive pressure), so dropped base periods d > D contribute
    at most S sum d q^d with q = exp(-gap * step), and dropped
    repetitions n > N at most S sum_d d q^(d (N+1)).
    """
    sft = trunc.sft
    depth = max(trunc.psi.depth, trunc.phi.depth if trunc.phi is not None else 1)
    states = sum(1 for _ in admissible_windows(sft, max(depth - 1, 1)))
    q = math.exp(-gap * step)
    D, N = trunc.max_base_period, trunc.max_repetition
    base_tail = states * q ** (D + 1) * ((D + 1) * (1 - q) + q) / (1 - q) ** 2 / (1 - q)
    rep_tail = states * sum(d * q ** (d * (N + 1)) / (1 - q ** d) for d in range(1, D + 1))
    return base_tail + rep_tail


def locate_real_pole(trunc: LSeriesTruncation, bracket: tuple[float, float],
                     n_points: int = 10) -> float:
    """Estimate the real pole of eta(., 0) by fitting c / (s - s0).

    eta is sampled at n_points geometrically approaching the bracket's
    left edge; a reciprocal-linear fit seeds a nonlinear least-squares
    fit of the pole model.  The relative fit residual must stay within
    5 percent.
    """
    a, b = float(bracket[0]), float(bracket[1])
    if not (b > a):
        raise NumericsError(f"bracket ({a}, {b}) is empty")
    if n_points < 8:
        raise NumericsError("pole location needs at least 8 sample points")
    ss = np.array(sorted(a + (b - a) * 0.5 ** i for i in range(n_points)))
    ys = np.array([eta_truncated(trunc, s).value.real for s in ss])
    if (ys <= 0).any():
        raise PoleFitError("eta samples are not positive; move the bracket right")
    slope, intercept = np.polyfit(ss, 1.0 / ys, 1)
    s0_init = -intercept / slope
    c_init = 1.0 / slope
    try:
        popt, _ = curve_fit(lambda s, c, s0: c / (s - s0), ss, ys,
                            p0=(c_init, s0_init), maxfev=20000)
        fit = popt[0] / (ss - popt[1])
        residual = float(np.sqrt(np.mean(((fit - ys) / ys) ** 2)))
        s0 = float(popt[1])
    except RuntimeError:
        # Reciprocal fallback: near blow-up 1/eta is close to linear.
        if c_init <= 0:
            raise PoleFitError("pole fit failed and the reciprocal slope is nonpositive")
        fit = c_init / (ss - s0_init)
        residual = float(np.sqrt(np.mean(((fit - ys) / ys) ** 2)))
        s0 = float(s0_init)
    if residual > POLE_RESIDUAL_TOL:
        raise PoleFitError(f"pole-model residual {residual:.2%} exceeds "
                           f"{POLE_RESIDUAL_TOL:.0%}")
    return s0


def s_of_t_quadratic_fit(sft: Sft, psi: LocallyConstantPotential,
                         phi: LocallyConstantPotential,
                         t_grid: Sequence[float]) -> tuple[float, float, float]:
    """Recover (pressure, mean, variance) from a quadratic fit of s(t).

    Re s(t) fits pressure - variance t^2 / 2 and Im s(t) fits mean t over
    a symmetric grid of t values within the branch radius.
    """
    ts = np.array(sorted(float(t) for t in t_grid))
    if ts.size < 3:
        raise NumericsError("t grid needs at least 3 points")
    if np.abs(np.sort(np.abs(ts)) - np.sort(np.abs(-ts))).max() > 1e-12 or \
            abs(ts.sum()) > 1e-9 * max(1.0, np.abs(ts).max()) * ts.size:
        raise NumericsError("t grid must be symmetric about 0")
    vals = np.array([complex_pressure(sft, psi, phi, float(t)) for t in ts])
    coef_real = np.polyfit(ts * ts, vals.real, 1)
    p_hat = float(coef_real[1])
    sigma2_hat = float(-2.0 * coef_real[0])
    denom = float(ts @ ts)
    mu_hat = float((ts @ vals.imag) / denom)
    return p_hat, mu_hat, sigma2_hat
