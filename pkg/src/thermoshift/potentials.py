"""Locally constant potentials and their cohomology algebra.

A depth-k potential assigns a real value to every admissible k-window of
symbols.  Locally constant functions stand in for general Holder
observables: they are dense for the statistics computed here and make
every quantity finitely computable.
"""

from __future__ import annotations

import math
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import PotentialError
from .sft import Sft, full_shift


def admissible_windows(sft: Sft, k: int) -> Iterator[tuple[int, ...]]:
    """All admissible k-windows in lexicographic order."""
    if k < 1:
        raise PotentialError("window depth must be a positive integer")
    work = [(c,) for c in range(sft.alphabet_size - 1, -1, -1)]
    while work:
        w = work.pop()
        if len(w) == k:
            yield w
            continue
        for c in reversed(sft.successors(w[-1])):
            work.append(w + (c,))


class LocallyConstantPotential:
    """A real-valued function of depth-k symbol windows on a fixed subshift."""

    __slots__ = ("sft", "depth", "values", "_table")

    def __init__(self, sft: Sft, depth: int, values: Mapping[Sequence[int], float]):
        if depth < 1:
            raise PotentialError("depth must be a positive integer")
        table = {}
        for window, v in values.items():
            w = tuple(int(x) for x in window)
            fv = float(v)
            if not math.isfinite(fv):
                raise PotentialError(f"value at window {w} is not finite")
            table[w] = fv
        expected = list(admissible_windows(sft, depth))
        missing = [w for w in expected if w not in table]
        if missing:
            raise PotentialError(f"missing value for admissible window {missing[0]}")
        if len(table) != len(expected):
            extra = sorted(set(table) - set(expected))
            raise PotentialError(f"value given for inadmissible window {extra[0]}")
        object.__setattr__(self, "sft", sft)
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "values", table)
        object.__setattr__(self, "_table", None)

    def __setattr__(self, name, value):
        raise AttributeError("LocallyConstantPotential instances are immutable")

    def __eq__(self, other):
        return (isinstance(other, LocallyConstantPotential)
                and self.sft == other.sft and self.depth == other.depth
                and self.values == other.values)

    def __repr__(self):
        return f"LocallyConstantPotential(depth={self.depth}, windows={len(self.values)})"

    @property
    def sup_norm(self) -> float:
        return max(abs(v) for v in self.values.values())

    def dense_table(self) -> np.ndarray:
        """Flat lookup array of size K^depth indexed by the base-K window code.

        Inadmissible windows hold NaN so that accidental lookups poison
        the result instead of passing silently.
        """
        cached = self._table
        if cached is None:
            K = self.sft.alphabet_size
            cached = np.full(K ** self.depth, np.nan)
            for w, v in self.values.items():
                code = 0
                for x in w:
                    code = code * K + x
                cached[code] = v
            cached.setflags(write=False)
            object.__setattr__(self, "_table", cached)
        return cached


def evaluate(potential: LocallyConstantPotential, window: Sequence[int]) -> float:
    """Table lookup; rejects windows of the wrong length or off the subshift."""
    w = tuple(int(x) for x in window)
    if len(w) != potential.depth:
        raise PotentialError(f"window {w} has length {len(w)}, expected {potential.depth}")
    try:
        return potential.values[w]
    except KeyError:
        raise PotentialError(f"window {w} is not admissible") from None


def refine_depth(potential: LocallyConstantPotential, depth: int) -> LocallyConstantPotential:
    """Re-express the potential at a larger depth without changing it.

    The refined value depends only on the first ``potential.depth`` symbols
    of each window, so all Birkhoff sums are preserved exactly.
    """
    if depth < potential.depth:
        raise PotentialError("refinement depth must be >= the current depth")
    if depth == potential.depth:
        return potential
    vals = {w: potential.values[w[:potential.depth]]
            for w in admissible_windows(potential.sft, depth)}
    return LocallyConstantPotential(potential.sft, depth, vals)


def linear_combination(coeffs: Sequence[float],
                       potentials: Sequence[LocallyConstantPotential]) -> LocallyConstantPotential:
    """Pointwise sum of coeff[i] * potentials[i] after refining to common depth."""
    if len(coeffs) != len(potentials) or not potentials:
        raise PotentialError("need matching, nonempty coefficient and potential lists")
    sft = potentials[0].sft
    for p in potentials[1:]:
        if p.sft != sft:
            raise PotentialError("potentials live on different subshifts")
    depth = max(p.depth for p in potentials)
    refined = [refine_depth(p, depth) for p in potentials]
    vals = {}
    for w in admissible_windows(sft, depth):
        vals[w] = sum(c * p.values[w] for c, p in zip(coeffs, refined))
    return LocallyConstantPotential(sft, depth, vals)


def add_constant(potential: LocallyConstantPotential, c: float) -> LocallyConstantPotential:
    """The potential shifted by a constant."""
    vals = {w: v + c for w, v in potential.values.items()}
    return LocallyConstantPotential(potential.sft, potential.depth, vals)


def scale(potential: LocallyConstantPotential, c: float) -> LocallyConstantPotential:
    vals = {w: c * v for w, v in potential.values.items()}
    return LocallyConstantPotential(potential.sft, potential.depth, vals)


def constant_potential(sft: Sft, value: float, depth: int = 1) -> LocallyConstantPotential:
    vals = {w: value for w in admissible_windows(sft, depth)}
    return LocallyConstantPotential(sft, depth, vals)


def coboundary_of(kappa: LocallyConstantPotential) -> LocallyConstantPotential:
    """The coboundary kappa(shifted window) - kappa(window), one level deeper.

    Every closed-orbit Birkhoff sum of the result telescopes to zero.
    """
    k = kappa.depth
    vals = {}
    for w in admissible_windows(kappa.sft, k + 1):
        vals[w] = kappa.values[w[1:]] - kappa.values[w[:k]]
    return LocallyConstantPotential(kappa.sft, k + 1, vals)


def coin_flip_weight(p: float, sft: Sft | None = None) -> LocallyConstantPotential:
    """The biased coin weight on the full 2-shift: log p on 0, log(1-p) on 1.

    Requires 0 < p < 1/2; exp of the two values sums to 1.
    """
    if not (0.0 < p < 0.5):
        raise PotentialError(f"p must lie strictly inside (0, 1/2), got {p}")
    sft = _require_full_two_shift(sft)
    return LocallyConstantPotential(sft, 1, {(0,): math.log(p), (1,): math.log(1.0 - p)})


def parity_observable(sft: Sft | None = None) -> LocallyConstantPotential:
    """The +-1 observable on the full 2-shift: symbol 0 maps to +1, symbol 1 to -1."""
    sft = _require_full_two_shift(sft)
    return LocallyConstantPotential(sft, 1, {(0,): 1.0, (1,): -1.0})


def _require_full_two_shift(sft: Sft | None) -> Sft:
    if sft is None:
        return full_shift(2)
    if sft.alphabet_size != 2 or not sft.transitions.all():
        raise PotentialError("this construction lives on the full 2-shift")
    return sft


def cyclic_sums(potential: LocallyConstantPotential, words: np.ndarray) -> np.ndarray:
    """Birkhoff sums of the potential over each row of a word matrix.

    ``words`` is a (count, n) integer array of cyclic words; windows wrap
    around each row.  Vectorized counterpart of :func:`sft.birkhoff_sum`.
    """
    words = np.asarray(words)
    if words.ndim != 2:
        raise PotentialError("words must be a 2-d array of cyclic words")
    count, n = words.shape
    if count == 0:
        return np.zeros(0)
    k = potential.depth
    K = potential.sft.alphabet_size
    table = potential.dense_table()
    w64 = words.astype(np.int64, copy=False)
    if k == 1:
        return table[w64].sum(axis=1)
    total = np.zeros(count)
    for j in range(n):
        code = np.zeros(count, dtype=np.int64)
        for i in range(k):
            code *= K
            code += w64[:, (j + i) % n]
        total += table[code]
    return total
