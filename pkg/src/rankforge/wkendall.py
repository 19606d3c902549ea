"""Weighted Kendall distances.

``d_phi(pi, sigma)`` is the least total weight of a sequence of adjacent
position swaps turning ``pi`` into ``sigma``, where swapping ranks ``i`` and
``i+1`` costs ``phi[i]``. Everything here is left-invariant, so
``d(pi, sigma) = d(sigma^-1 pi, e)`` and the single-source search from
``e`` can be shared between all pairs.
"""

from __future__ import annotations

import heapq
import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import Callable, Literal

from .errors import CapabilityError
from .perm import (
    MAX_ENUMERATION_N,
    Permutation,
    Transform,
    Transposition,
    _check_same_n,
    _compose0,
    _inv0,
    as_permutation,
    check_enumerable,
)
from .weights import (
    TOL,
    AdjacentWeights,
    check_same_n,
    is_decreasing,
    is_increasing,
    segment_weight,
)

DEFAULT_DP_BUDGET = 12
TABLE_MAX_N = 8


def _relative0(pi: Permutation, sigma: Permutation) -> tuple[int, ...]:
    """0-based entries of ``sigma^-1 pi``."""
    return _compose0(_inv0(sigma.zero_based), pi.zero_based)


def _coerce(pi, sigma, phi: AdjacentWeights) -> tuple[Permutation, Permutation]:
    pi, sigma = as_permutation(pi), as_permutation(sigma)
    _check_same_n(pi, sigma)
    check_same_n(phi, pi.n)
    return pi, sigma


def _element_inversions(pi: Permutation, sigma: Permutation) -> list[int]:
    """``I_i``: number of inverted pairs containing candidate i (0-based list)."""
    n = pi.n
    pr, sr = _inv0(pi.zero_based), _inv0(sigma.zero_based)
    counts = [0] * n
    for x in range(n):
        for y in range(x + 1, n):
            if (pr[x] < pr[y]) != (sr[x] < sr[y]):
                counts[x] += 1
                counts[y] += 1
    return counts


def d_phi_surrogate(pi, sigma, phi: AdjacentWeights) -> float:
    """Sum over candidates of the segment weight between their two ranks."""
    pi, sigma = _coerce(pi, sigma, phi)
    pr, sr = _inv0(pi.zero_based), _inv0(sigma.zero_based)
    pre = phi.prefix
    return float(sum(abs(pre[pr[i]] - pre[sr[i]]) for i in range(pi.n)))


def _reflect(p: Permutation) -> Permutation:
    return Permutation._from0(p.zero_based[::-1])


def monotonic_distance(pi, sigma, phi: AdjacentWeights) -> float:
    """Exact distance for monotonic weights via the turnaround-rank closed form."""
    pi, sigma = _coerce(pi, sigma, phi)
    if not is_decreasing(phi):
        if is_increasing(phi):
            # mirror ranks so the weights become decreasing
            return monotonic_distance(_reflect(pi), _reflect(sigma), phi.reflected())
        raise CapabilityError(
            "weights are not monotonic; use exact_dp or exact_dijkstra instead"
        )
    pr, sr = _inv0(pi.zero_based), _inv0(sigma.zero_based)
    counts = _element_inversions(pi, sigma)
    pre = phi.prefix
    total = 0.0
    for i in range(pi.n):
        p, q = pr[i] + 1, sr[i] + 1
        turn = (p + q + counts[i]) // 2
        total += 0.5 * ((pre[turn - 1] - pre[p - 1]) + (pre[turn - 1] - pre[q - 1]))
    return total


def find_tau_monotone(pi, sigma) -> Transform:
    """Adjacent position swaps settling ``sigma(1), sigma(2), ...`` in turn.

    Each candidate is bubbled left from its current rank to its target rank.
    The result has exactly ``kendall_tau(pi, sigma)`` steps.
    """
    pi, sigma = as_permutation(pi), as_permutation(sigma)
    _check_same_n(pi, sigma)
    cur = list(pi.zero_based)
    steps = []
    for r, c in enumerate(sigma.zero_based):
        p = cur.index(c)
        while p > r:
            cur[p - 1], cur[p] = cur[p], cur[p - 1]
            steps.append(Transposition(p, p + 1))
            p -= 1
    return Transform(tuple(steps), "positions")


@dataclass(frozen=True)
class WalkBound:
    """Per-candidate minimal walks over ranks and the resulting lower bound."""

    walks: tuple[tuple[int, ...], ...]
    weights: tuple[float, ...]
    bound: float


def _min_walk(phi: AdjacentWeights, start: int, end: int, length: int) -> tuple[tuple[int, ...], float]:
    """Cheapest walk of exactly ``length`` unit steps on ranks 1..n (lexicographic tie-break)."""
    n = phi.n
    w = phi.weights
    # togo[s][v]: cheapest way to reach ``end`` from v in s more steps
    togo = [[math.inf] * (n + 1) for _ in range(length + 1)]
    togo[0][end] = 0.0
    for s in range(1, length + 1):
        prev, row = togo[s - 1], togo[s]
        for v in range(1, n + 1):
            best = math.inf
            if v > 1:
                best = min(best, w[v - 2] + prev[v - 1])
            if v < n:
                best = min(best, w[v - 1] + prev[v + 1])
            row[v] = best
    walk = [start]
    v = start
    for s in range(length, 0, -1):
        for u in (v - 1, v + 1):
            if 1 <= u <= n and abs(w[min(u, v) - 1] + togo[s - 1][u] - togo[s][v]) <= TOL:
                walk.append(u)
                v = u
                break
    return tuple(walk), togo[length][start]


def walk_lower_bound(pi, sigma, phi: AdjacentWeights) -> WalkBound:
    """Half the sum of each candidate's cheapest forced-length walk.

    Candidate i must travel from rank ``pi^-1(i)`` to ``sigma^-1(i)`` in
    exactly ``I_i`` swaps, one per inversion it takes part in.
    """
    pi, sigma = _coerce(pi, sigma, phi)
    pr, sr = _inv0(pi.zero_based), _inv0(sigma.zero_based)
    counts = _element_inversions(pi, sigma)
    walks, weights = [], []
    for i in range(pi.n):
        walk, wt = _min_walk(phi, pr[i] + 1, sr[i] + 1, counts[i])
        walks.append(walk)
        weights.append(wt)
    return WalkBound(tuple(walks), tuple(weights), 0.5 * sum(weights))


def two_level_distance(pi, a: int, b: int, sigma=None) -> int:
    """Exact distance when only the swaps ``(a a+1)`` and ``(b b+1)`` cost 1.

    Ranks split into ``R1 = 1..a``, ``R2 = a+1..b`` and ``R3 = b+1..n``;
    ``N[i][j]`` counts candidates ranked in region i that belong in region j.
    """
    pi = as_permutation(pi)
    n = pi.n
    if not 1 <= a < b < n:
        raise ValueError(f"need 1 <= a < b < n, got a={a}, b={b}, n={n}")
    rel = pi.zero_based if sigma is None else _relative0(pi, as_permutation(sigma))

    def region(r0: int) -> int:
        return 0 if r0 < a else 1 if r0 < b else 2

    N = [[0] * 3 for _ in range(3)]
    for r, c in enumerate(rel):
        N[region(r)][region(c)] += 1
    if all(N[i][j] == 0 for i in range(3) for j in range(3) if i != j):
        return 0
    if N[1][0] >= 1 or N[1][2] >= 1:
        return 2 * N[0][2] + N[0][1] + N[1][2]
    return 2 * N[0][2] + 1


def exact_dp(pi, phi: AdjacentWeights, sigma=None, budget: int = DEFAULT_DP_BUDGET) -> float:
    """Exact distance by memoised recursion over inversion-removing adjacent swaps.

    Only swaps that fix a descent are explored, so the state space is the
    set of permutations below ``pi`` in the weak order.
    """
    pi = as_permutation(pi)
    check_same_n(phi, pi.n)
    rel = pi.zero_based if sigma is None else _relative0(pi, as_permutation(sigma))
    n = len(rel)
    inv = sum(1 for i in range(n) for j in range(i + 1, n) if rel[i] > rel[j])
    if inv > budget:
        raise CapabilityError(
            f"{inv} inversions exceed the dp budget of {budget}; "
            "use exact_dijkstra, or monotonic_distance for monotonic weights"
        )
    w = phi.weights
    memo: dict[tuple[int, ...], float] = {}

    def solve(p: tuple[int, ...]) -> float:
        got = memo.get(p)
        if got is not None:
            return got
        best = math.inf
        descent = False
        for i in range(n - 1):
            if p[i] > p[i + 1]:
                descent = True
                q = p[:i] + (p[i + 1], p[i]) + p[i + 2:]
                best = min(best, w[i] + solve(q))
        if not descent:
            best = 0.0
        memo[p] = best
        return best

    return solve(tuple(rel))


def _dijkstra_from_identity(phi: AdjacentWeights, target: tuple[int, ...] | None = None):
    n = phi.n
    w = phi.weights
    start = tuple(range(n))
    dist = {start: 0.0}
    heap = [(0.0, start)]
    done = set()
    while heap:
        d, p = heapq.heappop(heap)
        if p in done:
            continue
        done.add(p)
        if p == target:
            return d
        for i in range(n - 1):
            q = p[:i] + (p[i + 1], p[i]) + p[i + 2:]
            nd = d + w[i]
            if nd < dist.get(q, math.inf):
                dist[q] = nd
                heapq.heappush(heap, (nd, q))
    return dist if target is None else math.inf


_TABLES: OrderedDict = OrderedDict()
_TABLES_MAX = 16


def distance_table(phi: AdjacentWeights) -> dict[tuple[int, ...], float]:
    """``d(p, e)`` for every p in S_n, keyed by 0-based tuples. Cached per weight vector."""
    check_enumerable(phi.n, TABLE_MAX_N)
    key = phi.key
    if key in _TABLES:
        _TABLES.move_to_end(key)
        return _TABLES[key]
    table = _dijkstra_from_identity(phi)
    _TABLES[key] = table
    if len(_TABLES) > _TABLES_MAX:
        _TABLES.popitem(last=False)
    return table


def exact_dijkstra(pi, sigma, phi: AdjacentWeights) -> float:
    """Ground-truth distance by shortest path over S_n with adjacent-swap edges."""
    pi, sigma = _coerce(pi, sigma, phi)
    check_enumerable(pi.n, MAX_ENUMERATION_N)
    rel = _relative0(pi, sigma)
    if pi.n <= TABLE_MAX_N:
        return distance_table(phi)[rel]
    # the graph is undirected, so searching from e for the relative permutation suffices
    return _dijkstra_from_identity(phi, rel)


def inversion_swap_positions(pi, sigma) -> dict[tuple[int, int], int]:
    """Rank s at which the monotone transform swaps each inverted pair.

    Keys are ordered pairs ``(b, a)`` with b ahead of a in ``pi`` and a ahead
    of b in ``sigma``; the swap is ``(s s+1)``.
    """
    pi, sigma = as_permutation(pi), as_permutation(sigma)
    n = _check_same_n(pi, sigma)
    pr, sr = _inv0(pi.zero_based), _inv0(sigma.zero_based)
    out = {}
    for b in range(n):
        for a in range(n):
            if pr[b] < pr[a] and sr[a] < sr[b]:
                later = sum(1 for k in range(n) if pr[k] > pr[b] and sr[k] > sr[a])
                out[(b + 1, a + 1)] = n - 1 - later
    return out


Method = Literal["auto", "monotonic", "dp", "dijkstra", "surrogate"]


def weighted_kendall(phi: AdjacentWeights, method: Method = "auto") -> Callable[[Permutation, Permutation], float]:
    """A distance functional ``(pi, sigma) -> d_phi`` choosing an exact method.

    ``auto`` uses the closed form for monotonic weights, the cached S_n table
    up to n = 8, and the bounded dp beyond that.
    """
    n = phi.n
    if method == "auto":
        if is_decreasing(phi) or is_increasing(phi):
            method = "monotonic"
        elif n <= TABLE_MAX_N:
            method = "dijkstra"
        else:
            method = "dp"
    if method == "monotonic":
        def dist(pi, sigma):
            return monotonic_distance(pi, sigma, phi)
    elif method == "dijkstra":
        def dist(pi, sigma):
            return exact_dijkstra(pi, sigma, phi)
    elif method == "dp":
        def dist(pi, sigma):
            return exact_dp(pi, phi, sigma=sigma)
    elif method == "surrogate":
        def dist(pi, sigma):
            return d_phi_surrogate(pi, sigma, phi)
    else:
        raise ValueError(f"unknown method {method!r}")
    dist.method = method
    dist.exact = method != "surrogate"
    return dist
