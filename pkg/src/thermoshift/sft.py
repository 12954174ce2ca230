"""Subshifts of finite type, their closed orbits, and Birkhoff sums.

A subshift is given by a 0/1 transition matrix over symbols 0..k-1; a
closed orbit is an admissible cyclic word.  Prime orbits are enumerated
as Lyndon words (lexicographically minimal aperiodic rotations) by a
Duval/FKM-style successor recursion pruned by the transition matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetError, SftError

DEFAULT_ORBIT_BUDGET = 10_000_000

# Enumerations are pure functions of (transitions, n); caching them keeps
# repeated statistics over the same system from re-walking the search tree.
_WORD_CACHE: dict[tuple[bytes, int, int], np.ndarray] = {}


class Sft:
    """A one-sided subshift of finite type over the symbols 0..k-1.

    Construction validates that the transition matrix is square with 0/1
    entries, irreducible (every symbol reaches every symbol through
    admissible paths) and aperiodic (the gcd of admissible cycle lengths
    is 1).  Instances are immutable and hashable.
    """

    __slots__ = ("transitions", "alphabet_size", "irreducible", "aperiodic",
                 "_succ", "_succ_ge", "_key")

    def __init__(self, transitions):
        arr = _as_transition_matrix(transitions)
        _check_irreducible(arr)
        g = _cycle_gcd(arr)
        if g != 1:
            raise SftError(f"transition matrix is periodic: cycle lengths have gcd {g}")
        k = arr.shape[0]
        object.__setattr__(self, "transitions", arr)
        object.__setattr__(self, "alphabet_size", k)
        object.__setattr__(self, "irreducible", True)
        object.__setattr__(self, "aperiodic", True)
        succ = tuple(tuple(int(b) for b in np.flatnonzero(arr[a])) for a in range(k))
        succ_ge = tuple(tuple(tuple(b for b in succ[a] if b >= lo) for lo in range(k))
                        for a in range(k))
        object.__setattr__(self, "_succ", succ)
        object.__setattr__(self, "_succ_ge", succ_ge)
        object.__setattr__(self, "_key", (k, arr.tobytes()))

    def __setattr__(self, name, value):
        raise AttributeError("Sft instances are immutable")

    def __eq__(self, other):
        return isinstance(other, Sft) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Sft(alphabet_size={self.alphabet_size})"

    def successors(self, symbol: int) -> tuple[int, ...]:
        return self._succ[symbol]

    def is_admissible_path(self, word: Sequence[int]) -> bool:
        """True when every adjacent pair in ``word`` is an admissible transition."""
        t = self.transitions
        return all(t[word[i], word[i + 1]] for i in range(len(word) - 1))

    def is_admissible_cycle(self, word: Sequence[int]) -> bool:
        return self.is_admissible_path(word) and bool(self.transitions[word[-1], word[0]])


def validate(transitions) -> Sft:
    """Build an :class:`Sft`, rejecting reducible or periodic matrices."""
    return Sft(transitions)


def full_shift(k: int = 2) -> Sft:
    """The full shift on ``k`` symbols (all transitions allowed)."""
    return Sft(np.ones((k, k), dtype=np.int8))


def golden_mean_shift() -> Sft:
    """The golden-mean shift: the word 11 is forbidden."""
    return Sft([[1, 1], [1, 0]])


def _as_transition_matrix(transitions) -> np.ndarray:
    arr = np.asarray(transitions)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise SftError(f"transition matrix must be square and nonempty, got shape {arr.shape}")
    if not np.isin(arr, (0, 1)).all():
        raise SftError("transition matrix entries must be 0 or 1")
    out = np.ascontiguousarray(arr, dtype=np.int8)
    out.setflags(write=False)
    return out


def _check_irreducible(arr: np.ndarray) -> None:
    k = arr.shape[0]
    reach = arr.astype(bool)
    closure = reach.copy()
    for _ in range(k):
        closure = closure | (closure @ reach)
    if not closure.all():
        i, j = np.argwhere(~closure)[0]
        raise SftError(f"transition matrix is reducible: symbol {i} cannot reach symbol {j}")


def _cycle_gcd(arr: np.ndarray) -> int:
    # BFS levels from symbol 0; the gcd of level(u)+1-level(v) over edges u->v
    # is the period of a strongly connected digraph.
    k = arr.shape[0]
    level = [-1] * k
    level[0] = 0
    queue = [0]
    order = []
    while queue:
        u = queue.pop()
        order.append(u)
        for v in np.flatnonzero(arr[u]):
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(int(v))
    g = 0
    for u in range(k):
        for v in np.flatnonzero(arr[u]):
            g = math.gcd(g, level[u] + 1 - level[int(v)])
    return g


@dataclass(frozen=True, order=True)
class PrimeOrbit:
    """A prime closed orbit, stored as its canonical (least-rotation) word."""

    word: tuple[int, ...]

    @property
    def period(self) -> int:
        return len(self.word)

    @staticmethod
    def from_word(sft: Sft, word: Sequence[int]) -> "PrimeOrbit":
        """Validate and canonicalize an arbitrary admissible cyclic word.

        Rejects words that are powers of a shorter word or traverse a
        forbidden transition (including the wrap-around edge).
        """
        w = tuple(int(x) for x in word)
        if not w:
            raise SftError("orbit word must be nonempty")
        if any(x < 0 or x >= sft.alphabet_size for x in w):
            raise SftError("orbit word contains symbols outside the alphabet")
        if not sft.is_admissible_cycle(w):
            raise SftError(f"cyclic word {w} traverses a forbidden transition")
        if _smallest_period(w) != len(w):
            raise SftError(f"word {w} is a power of a shorter word, not prime")
        return PrimeOrbit(canonical_representative(w))

    def __repr__(self):
        return f"PrimeOrbit({''.join(map(str, self.word))})"


@dataclass(frozen=True)
class ClosedOrbit:
    """A closed orbit: a prime orbit traversed ``multiplicity`` times."""

    base: PrimeOrbit
    multiplicity: int = 1

    def __post_init__(self):
        if self.multiplicity < 1:
            raise SftError("multiplicity must be a positive integer")

    @property
    def length(self) -> int:
        return self.base.period * self.multiplicity

    @property
    def is_prime(self) -> bool:
        return self.multiplicity == 1

    @property
    def von_mangoldt(self) -> int:
        """The prime period of the underlying prime orbit."""
        return self.base.period

    @property
    def word(self) -> tuple[int, ...]:
        return self.base.word * self.multiplicity

    def __repr__(self):
        s = "".join(map(str, self.base.word))
        return f"ClosedOrbit({s}^{self.multiplicity})"


def canonical_representative(word: Sequence[int]) -> tuple[int, ...]:
    """Lexicographically minimal rotation of a cyclic word (Booth's algorithm)."""
    w = tuple(word)
    if not w:
        raise SftError("cannot canonicalize an empty word")
    i = _least_rotation_index(w)
    return w[i:] + w[:i]


def _least_rotation_index(s: Sequence[int]) -> int:
    # Booth's least-rotation algorithm, O(n).
    s2 = tuple(s) + tuple(s)
    n = len(s2)
    f = [-1] * n
    k = 0
    for j in range(1, n):
        sj = s2[j]
        i = f[j - k - 1]
        while i != -1 and sj != s2[k + i + 1]:
            if sj < s2[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s2[k + i + 1]:
            if sj < s2[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k


def _smallest_period(word: Sequence[int]) -> int:
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and all(word[i] == word[i % p] for i in range(n)):
            return p
    return n


def count_periodic_points(sft: Sft, n: int) -> int:
    """Number of admissible cyclic words of length ``n``: trace of A^n.

    Computed with exact integer arithmetic, so the count never wraps.
    """
    if n < 1:
        raise SftError("n must be a positive integer")
    k = sft.alphabet_size
    a = [[int(sft.transitions[i, j]) for j in range(k)] for i in range(k)]
    result = None
    base = a
    e = n
    while e:
        if e & 1:
            result = base if result is None else _int_matmul(result, base)
        e >>= 1
        if e:
            base = _int_matmul(base, base)
    return sum(result[i][i] for i in range(k))


def _int_matmul(a, b):
    k = len(a)
    return [[sum(a[i][m] * b[m][j] for m in range(k)) for j in range(k)] for i in range(k)]


def prime_word_matrix(sft: Sft, n: int, budget: int | None = None) -> np.ndarray:
    """All canonical prime-orbit words of period ``n`` as an (count, n) array.

    Rows are Lyndon words in lexicographic order.  The result is cached
    per (system, n) and returned read-only; callers must not mutate it.
    """
    if n < 1:
        raise SftError("n must be a positive integer")
    limit = DEFAULT_ORBIT_BUDGET if budget is None else budget
    key = (sft._key[1], sft.alphabet_size, n)
    cached = _WORD_CACHE.get(key)
    if cached is None:
        flat = _lyndon_flat(sft, n, limit)
        cached = np.array(flat, dtype=np.int8).reshape(-1, n)
        cached.setflags(write=False)
        _WORD_CACHE[key] = cached
    if cached.shape[0] > limit:
        raise BudgetError(
            f"{cached.shape[0]} prime orbits of period {n} exceed the budget of {limit}")
    return cached


def _lyndon_flat(sft: Sft, n: int, limit: int, first_symbols: Iterable[int] | None = None) -> list[int]:
    """Admissible Lyndon words of length n, flattened, in lexicographic order.

    FKM prenecklace recursion: position t may hold the periodic copy
    w[t-p] (keeping period p) or any larger admissible symbol (resetting
    the period to t+1).  A length-n prenecklace is a Lyndon word exactly
    when p == n; the wrap-around edge is checked at emission.
    """
    out: list[int] = []
    k = sft.alphabet_size
    trans = sft.transitions
    succ_ge = sft._succ_ge
    w = [0] * n
    count = 0

    def rec(t: int, p: int) -> None:
        nonlocal count
        if t == n:
            if p == n and trans[w[n - 1], w[0]]:
                count += 1
                if count > limit:
                    raise BudgetError(
                        f"prime-orbit enumeration at period {n} exceeded the budget of {limit}")
                out.extend(w)
            return
        lo = w[t - p]
        for c in succ_ge[w[t - 1]][lo]:
            w[t] = c
            rec(t + 1, p if c == lo else t + 1)

    symbols = range(k) if first_symbols is None else first_symbols
    for c in symbols:
        if n == 1:
            if trans[c, c]:
                count += 1
                if count > limit:
                    raise BudgetError(
                        f"prime-orbit enumeration at period {n} exceeded the budget of {limit}")
                out.append(c)
            continue
        w[0] = c
        rec(1, 1)
    return out


def enumerate_prime_orbits(sft: Sft, n: int, budget: int | None = None,
                           first_symbols: Iterable[int] | None = None) -> list[PrimeOrbit]:
    """Prime orbits of period exactly ``n`` in lexicographic order.

    ``first_symbols`` restricts the enumeration to words starting with the
    given symbols; partitioned runs merged in ascending first symbol
    reproduce the unpartitioned output exactly.
    """
    if first_symbols is None:
        words = prime_word_matrix(sft, n, budget)
        return [PrimeOrbit(tuple(int(x) for x in row)) for row in words]
    limit = DEFAULT_ORBIT_BUDGET if budget is None else budget
    flat = _lyndon_flat(sft, n, limit, first_symbols=sorted(first_symbols))
    it = iter(flat)
    return [PrimeOrbit(t) for t in zip(*[it] * n)]


def birkhoff_sum(orbit, potential) -> float:
    """Sum of the potential over one traversal of a closed orbit.

    Windows wrap around the cyclic word, matching evaluation on the
    periodic point the word generates.  For a multiplicity-m orbit this
    is m times the sum over the base prime orbit.
    """
    if isinstance(orbit, ClosedOrbit):
        base, mult = orbit.base.word, orbit.multiplicity
    elif isinstance(orbit, PrimeOrbit):
        base, mult = orbit.word, 1
    else:
        base, mult = tuple(orbit), 1
    d = len(base)
    k = potential.depth
    values = potential.values
    total = 0.0
    for j in range(d):
        window = tuple(base[(j + i) % d] for i in range(k))
        total += values[window]
    return mult * total


def divisors(n: int) -> list[int]:
    """Positive divisors of n in increasing order."""
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]
