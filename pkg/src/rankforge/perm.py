"""Permutation algebra in one-line order notation.

A ranking ``pi`` lists candidates from most to least preferred, so
``pi(r)`` is the candidate at rank ``r`` and ``pi.inverse()(c)`` is the rank
of candidate ``c``. Ranks and candidates are 1-based on every public
surface; the tuple stored inside a :class:`Permutation` is 0-based.

Products follow the usual right-to-left convention, ``(pi * sigma)(i) =
pi(sigma(i))``. Right-multiplying by a transposition swaps two positions,
left-multiplying swaps two values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Iterator, Literal, Sequence

from .errors import CapabilityError, DimensionError

MAX_ENUMERATION_N = 10
"""Largest n for which anything enumerates the whole symmetric group."""


@total_ordering
class Permutation:
    """Immutable bijection on ``{1..n}`` in order notation."""

    __slots__ = ("_p",)

    def __init__(self, entries: Iterable[int]):
        entries = tuple(int(x) for x in entries)
        n = len(entries)
        if n < 1:
            raise ValueError("a permutation needs at least one entry")
        if sorted(entries) != list(range(1, n + 1)):
            raise ValueError(f"{entries} is not a permutation of 1..{n}")
        self._p = tuple(x - 1 for x in entries)

    @classmethod
    def _from0(cls, p: Sequence[int]) -> Permutation:
        # trusted fast path for internal 0-based tuples
        obj = cls.__new__(cls)
        obj._p = tuple(p)
        return obj

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls._from0(range(n))

    @classmethod
    def reversal(cls, n: int) -> Permutation:
        return cls._from0(range(n - 1, -1, -1))

    @classmethod
    def from_cycles(cls, n: int, *cycles: Sequence[int]) -> Permutation:
        """Product of cycles, rightmost applied first; cycles may overlap."""
        result = cls.identity(n)
        for cyc in reversed(cycles):
            result = compose(cycle_permutation(n, cyc), result)
        return result

    @property
    def entries(self) -> tuple[int, ...]:
        return tuple(x + 1 for x in self._p)

    @property
    def zero_based(self) -> tuple[int, ...]:
        return self._p

    @property
    def n(self) -> int:
        return len(self._p)

    def __len__(self) -> int:
        return len(self._p)

    def __iter__(self) -> Iterator[int]:
        return iter(self.entries)

    def __call__(self, i: int) -> int:
        """Candidate at rank ``i``."""
        if not 1 <= i <= len(self._p):
            raise IndexError(f"rank {i} out of range 1..{len(self._p)}")
        return self._p[i - 1] + 1

    def rank(self, candidate: int) -> int:
        """Rank of ``candidate`` (the inverse evaluated at it)."""
        if not 1 <= candidate <= len(self._p):
            raise IndexError(f"candidate {candidate} out of range 1..{len(self._p)}")
        return self._p.index(candidate - 1) + 1

    def inverse(self) -> Permutation:
        return Permutation._from0(_inv0(self._p))

    def __mul__(self, other: Permutation) -> Permutation:
        return compose(self, other)

    def __eq__(self, other) -> bool:
        if isinstance(other, Permutation):
            return self._p == other._p
        return NotImplemented

    def __lt__(self, other: Permutation) -> bool:
        return self._p < other._p

    def __hash__(self) -> int:
        return hash(self._p)

    def __repr__(self) -> str:
        return f"Permutation({self.entries})"

    def __str__(self) -> str:
        return "(" + ",".join(str(x) for x in self.entries) + ")"


def as_permutation(x) -> Permutation:
    """Coerce a 1-based sequence (or a Permutation) to a Permutation."""
    return x if isinstance(x, Permutation) else Permutation(x)


@dataclass(frozen=True)
class Transposition:
    """The swap ``(a b)``; whether it acts on positions or values depends on the side."""

    a: int
    b: int

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("a transposition needs two distinct indices")
        if min(self.a, self.b) < 1:
            raise ValueError("transposition indices are 1-based")

    @property
    def is_adjacent(self) -> bool:
        return abs(self.a - self.b) == 1

    def as_permutation(self, n: int) -> Permutation:
        _check_index(n, self)
        p = list(range(n))
        p[self.a - 1], p[self.b - 1] = p[self.b - 1], p[self.a - 1]
        return Permutation._from0(p)

    def __str__(self) -> str:
        return f"({self.a} {self.b})"


@dataclass(frozen=True)
class Transform:
    """Ordered sequence of swaps.

    ``side="positions"`` means each step right-multiplies (swaps two ranks);
    ``side="values"`` means each step left-multiplies (swaps two candidates).
    """

    steps: tuple[Transposition, ...]
    side: Literal["positions", "values"] = "positions"

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[Transposition]:
        return iter(self.steps)

    def apply(self, pi: Permutation) -> Permutation:
        swap = apply_position_swap if self.side == "positions" else apply_value_swap
        for t in self.steps:
            pi = swap(pi, t)
        return pi

    def weight(self, phi) -> float:
        """Total weight under any weight model exposing ``weight_of``."""
        return float(sum(phi.weight_of(t) for t in self.steps))


def _inv0(p: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def _compose0(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    return tuple(p[x] for x in q)


def _check_same_n(*perms: Permutation) -> int:
    n = perms[0].n
    for other in perms[1:]:
        if other.n != n:
            raise DimensionError(f"size mismatch: {n} vs {other.n}")
    return n


def _check_index(n: int, t: Transposition) -> None:
    if max(t.a, t.b) > n:
        raise IndexError(f"transposition {t} out of range for n={n}")


def compose(pi: Permutation, sigma: Permutation) -> Permutation:
    """``mu(i) = pi(sigma(i))``."""
    _check_same_n(pi, sigma)
    return Permutation._from0(_compose0(pi._p, sigma._p))


def inverse(pi: Permutation) -> Permutation:
    return pi.inverse()


def apply_position_swap(pi: Permutation, t: Transposition) -> Permutation:
    """``pi (a b)``: exchange the entries at ranks a and b."""
    _check_index(pi.n, t)
    p = list(pi._p)
    p[t.a - 1], p[t.b - 1] = p[t.b - 1], p[t.a - 1]
    return Permutation._from0(p)


def apply_value_swap(pi: Permutation, t: Transposition) -> Permutation:
    """``(a b) pi``: exchange the candidates a and b wherever they sit."""
    _check_index(pi.n, t)
    a, b = t.a - 1, t.b - 1
    return Permutation._from0(b if x == a else a if x == b else x for x in pi._p)


def inversion_set(pi: Permutation, sigma: Permutation) -> set[frozenset[int]]:
    """Unordered candidate pairs whose relative order differs between the two rankings."""
    n = _check_same_n(pi, sigma)
    sr = _inv0(sigma._p)
    out = set()
    p = pi._p
    for i in range(n):
        for j in range(i + 1, n):
            # p[i] is ahead of p[j] in pi
            if sr[p[i]] > sr[p[j]]:
                out.add(frozenset((p[i] + 1, p[j] + 1)))
    return out


def kendall_tau(pi: Permutation, sigma: Permutation) -> int:
    """Number of discordant pairs, counted in O(n log n) with a Fenwick tree."""
    n = _check_same_n(pi, sigma)
    sr = _inv0(sigma._p)
    seq = [sr[x] for x in pi._p]
    tree = [0] * (n + 1)
    inversions = 0
    for seen, v in enumerate(seq):
        # count earlier entries <= v
        i, le = v + 1, 0
        while i > 0:
            le += tree[i]
            i -= i & -i
        inversions += seen - le
        i = v + 1
        while i <= n:
            tree[i] += 1
            i += i & -i
    return inversions


def _kendall0(p: Sequence[int], q: Sequence[int]) -> int:
    # quadratic variant for tiny internal hot loops
    qr = _inv0(q)
    seq = [qr[x] for x in p]
    n = len(seq)
    return sum(1 for i in range(n) for j in range(i + 1, n) if seq[i] > seq[j])


def cycle_decomposition(pi: Permutation) -> list[tuple[int, ...]]:
    """Disjoint cycles of ``pi`` viewed as a map, fixed points included.

    Each cycle starts at its smallest element; cycles are ordered by that element.
    """
    p = pi._p
    seen = [False] * len(p)
    cycles = []
    for start in range(len(p)):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x + 1)
            x = p[x]
        cycles.append(tuple(cyc))
    return cycles


def cycle_permutation(n: int, cycle: Sequence[int]) -> Permutation:
    """The permutation sending ``cycle[k] -> cycle[k+1]`` (cyclically)."""
    p = list(range(n))
    if len(set(cycle)) != len(cycle):
        raise ValueError(f"repeated element in cycle {tuple(cycle)}")
    for k, x in enumerate(cycle):
        if not 1 <= x <= n:
            raise IndexError(f"cycle element {x} out of range 1..{n}")
        p[x - 1] = cycle[(k + 1) % len(cycle)] - 1
    return Permutation._from0(p)


def canonical_cycle(cycle: Sequence[int]) -> tuple[int, ...]:
    """Rotate a cycle so it starts at its minimum."""
    k = cycle.index(min(cycle))
    return tuple(cycle[k:]) + tuple(cycle[:k])


def cycle_split(cycle: Sequence[int], at: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split ``(a1 .. at .. al)`` into ``(a1 .. at)`` and ``(at .. al)``.

    The product of the two pieces, left piece applied last, is the original
    cycle. ``at`` must be an interior element so both pieces have length >= 2.
    """
    cycle = tuple(cycle)
    t = cycle.index(at)
    if not 1 <= t <= len(cycle) - 2:
        raise ValueError(f"{at} is not an interior split point of {cycle}")
    return cycle[: t + 1], cycle[t:]


def is_between(omega: Permutation, pi: Permutation, sigma: Permutation) -> bool:
    """True iff on every pair ``omega`` agrees with ``pi`` or with ``sigma``."""
    n = _check_same_n(omega, pi, sigma)
    wr, pr, sr = _inv0(omega._p), _inv0(pi._p), _inv0(sigma._p)
    for a in range(n):
        for b in range(a + 1, n):
            by_pi = pr[a] < pr[b]
            if by_pi == (sr[a] < sr[b]) and by_pi != (wr[a] < wr[b]):
                return False
    return True


def check_enumerable(n: int, limit: int = MAX_ENUMERATION_N) -> None:
    if n > min(limit, MAX_ENUMERATION_N):
        raise CapabilityError(
            f"n={n} exceeds the enumeration ceiling of {min(limit, MAX_ENUMERATION_N)}"
        )


def all_permutations(n: int, limit: int = MAX_ENUMERATION_N) -> Iterator[Permutation]:
    """Every element of S_n in lexicographic order."""
    check_enumerable(n, limit)
    for p in itertools.permutations(range(n)):
        yield Permutation._from0(p)
