"""Weighted transposition distances.

Here any two positions may be swapped, swapping ranks ``a`` and ``b``
costing ``phi(a, b)``. Applied to rank vectors (inverse permutations) the
indices become candidates, which is how candidate similarity is modelled.
"""

from __future__ import annotations

import enum
import heapq
import math
from collections import OrderedDict
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import CapabilityError
from .perm import (
    Permutation,
    _check_same_n,
    _compose0,
    _inv0,
    as_permutation,
    canonical_cycle,
    check_enumerable,
    cycle_decomposition,
)
from .weights import (
    TOL,
    AdjacentWeights,
    DefiningTree,
    TranspositionWeights,
    check_same_n,
    finite_edge_tree,
    from_metric_tree,
    is_extended_path,
    is_metric,
    is_monotonic,
    metric_path_tree,
    single_transposition_distance,
)
from .wkendall import TABLE_MAX_N, exact_dijkstra, exact_dp, monotonic_distance

CAYLEY_MAX_N = 7


class SimilarityMode(str, enum.Enum):
    POSITIONS = "positions"
    CANDIDATES = "candidates"


def _prepare(pi, sigma, phi: TranspositionWeights, mode=SimilarityMode.POSITIONS):
    pi, sigma = as_permutation(pi), as_permutation(sigma)
    _check_same_n(pi, sigma)
    check_same_n(phi, pi.n)
    if SimilarityMode(mode) is SimilarityMode.CANDIDATES:
        pi, sigma = pi.inverse(), sigma.inverse()
    return pi, sigma


def _relative0(pi: Permutation, sigma: Permutation) -> tuple[int, ...]:
    return _compose0(_inv0(sigma.zero_based), pi.zero_based)


def d_phi_general(pi, sigma, phi: TranspositionWeights, mode=SimilarityMode.POSITIONS) -> float:
    """Sum over elements of the lightest route between their two positions in the weight graph."""
    pi, sigma = _prepare(pi, sigma, phi, mode)
    pr, sr = _inv0(pi.zero_based), _inv0(sigma.zero_based)
    sp = phi.shortest
    return float(sum(sp[pr[i], sr[i]] for i in range(pi.n)))


def _has_metric_upper(phi: TranspositionWeights) -> bool:
    return is_metric(phi) or is_extended_path(phi)


def sandwich_bounds(pi, sigma, phi: TranspositionWeights, mode=SimilarityMode.POSITIONS) -> tuple[float, float]:
    """``(D/2, D)`` for metric or extended-path weights, ``(D/2, 2D)`` otherwise."""
    D = d_phi_general(pi, sigma, phi, mode)
    return 0.5 * D, (D if _has_metric_upper(phi) else 2 * D)


def metric_path_distance(pi, sigma, phi: TranspositionWeights, mode=SimilarityMode.POSITIONS) -> float:
    """Exact distance ``D/2`` for weights induced by a weighted path."""
    if metric_path_tree(phi) is None:
        raise CapabilityError("weights are not a metric-path weight function")
    return 0.5 * d_phi_general(pi, sigma, phi, mode)


def _steiner_is_path(tree_adj: dict, vertices: tuple[int, ...], tree: DefiningTree) -> bool:
    if len(vertices) <= 2:
        return True
    edges = set()
    base = vertices[0]
    for v in vertices[1:]:
        p = tree.tree_path(base, v)
        for x, y in zip(p, p[1:]):
            edges.add((min(x, y), max(x, y)))
    deg: dict[int, int] = {}
    for x, y in edges:
        deg[x] = deg.get(x, 0) + 1
        deg[y] = deg.get(y, 0) + 1
    return max(deg.values()) <= 2


def cycle_path_factorization(cycle: tuple[int, ...], tree: DefiningTree) -> list[tuple[int, ...]] | None:
    """Split a cycle into pieces that each lie on a tree path, or None.

    A piece lies on a path when the subtree spanning its vertices has no
    vertex of degree above two. A cycle ``(a1 .. at .. al)`` may be split into
    ``(a1 .. at)(at .. al)`` when ``at`` sits on the tree path between ``al``
    and ``a1``, which keeps ``D`` additive. The factorization with the fewest
    pieces wins, ties broken by the lexicographically smallest piece list.
    """
    adj = tree.adjacency()
    w = from_metric_tree(tree).matrix

    @lru_cache(maxsize=None)
    def best(c: tuple[int, ...]):
        if _steiner_is_path(adj, c, tree):
            return (c,)
        found = None
        L = len(c)
        for r in range(L):
            rot = c[r:] + c[:r]
            a1, al = rot[0], rot[-1]
            for t in range(1, L - 1):
                at = rot[t]
                if abs(w[at - 1, a1 - 1] + w[al - 1, at - 1] - w[al - 1, a1 - 1]) > TOL:
                    continue
                left, right = best(canonical_cycle(rot[: t + 1])), best(canonical_cycle(rot[t:]))
                if left is None or right is None:
                    continue
                cand = tuple(sorted(left + right))
                if found is None or (len(cand), cand) < (len(found), found):
                    found = cand
        return found

    got = best(canonical_cycle(tuple(cycle)))
    return None if got is None else list(got)


def tree_path_decomposable_distance(
    pi, sigma, phi: TranspositionWeights, tree: DefiningTree, mode=SimilarityMode.POSITIONS
) -> float | None:
    """``D/2`` when every cycle of ``sigma^-1 pi`` factors into tree-path pieces, else None."""
    pi, sigma = _prepare(pi, sigma, phi, mode)
    if tree.n != phi.n or not np.allclose(from_metric_tree(tree).matrix, phi.matrix, atol=TOL, rtol=0):
        raise ValueError("weights do not match the metric induced by the tree")
    rel = Permutation._from0(_relative0(pi, sigma))
    for cyc in cycle_decomposition(rel):
        if len(cyc) > 1 and cycle_path_factorization(cyc, tree) is None:
            return None
    return 0.5 * d_phi_general(pi, sigma, phi)


_TABLES: OrderedDict = OrderedDict()
_TABLES_MAX = 16


def cayley_table(phi: TranspositionWeights) -> dict[tuple[int, ...], float]:
    """``d(p, e)`` for all p in S_n: Dijkstra from e with every transposition as an edge."""
    n = phi.n
    if n > CAYLEY_MAX_N:
        raise CapabilityError(f"n={n} exceeds the transposition-graph oracle ceiling of {CAYLEY_MAX_N}")
    key = phi.key
    if key in _TABLES:
        _TABLES.move_to_end(key)
        return _TABLES[key]
    m = phi.matrix
    moves = [(a, b, float(m[a, b])) for a in range(n) for b in range(a + 1, n) if math.isfinite(m[a, b])]
    start = tuple(range(n))
    dist = {start: 0.0}
    heap = [(0.0, start)]
    done = set()
    while heap:
        d, p = heapq.heappop(heap)
        if p in done:
            continue
        done.add(p)
        for a, b, w in moves:
            q = list(p)
            q[a], q[b] = q[b], q[a]
            q = tuple(q)
            nd = d + w
            if nd < dist.get(q, math.inf):
                dist[q] = nd
                heapq.heappush(heap, (nd, q))
    _TABLES[key] = dist
    if len(_TABLES) > _TABLES_MAX:
        _TABLES.popitem(last=False)
    return dist


def exact_cayley(pi, sigma, phi: TranspositionWeights, mode=SimilarityMode.POSITIONS) -> float:
    """Ground-truth distance by shortest path over S_n (n <= 7)."""
    pi, sigma = _prepare(pi, sigma, phi, mode)
    return cayley_table(phi).get(_relative0(pi, sigma), math.inf)


def _extended_path_distance(rel: tuple[int, ...], phi: TranspositionWeights) -> float:
    # relabel positions along the defining path, then it is a weighted Kendall problem
    tree = finite_edge_tree(phi)
    deg = tree.degrees()
    adj = tree.adjacency()
    end = min(v for v, d in deg.items() if d <= 1)
    order = [end]
    while len(order) < tree.n:
        nxt = [u for u in adj[order[-1]] if len(order) < 2 or u != order[-2]]
        order.append(nxt[0])
    h = {v - 1: k for k, v in enumerate(order)}
    n = len(rel)
    relabelled = [0] * n
    for x in range(n):
        relabelled[h[x]] = h[rel[x]]
    w = AdjacentWeights(adj[order[k]][order[k + 1]] for k in range(n - 1))
    p = Permutation._from0(relabelled)
    e = Permutation.identity(n)
    if is_monotonic(w):
        return monotonic_distance(p, e, w)
    if n <= TABLE_MAX_N:
        return exact_dijkstra(p, e, w)
    return exact_dp(p, w)


def heuristic_upper_bound(pi, sigma, phi: TranspositionWeights, mode=SimilarityMode.POSITIONS) -> float:
    """Weight of a concrete transform: each cycle realised by all but its costliest cyclic swap."""
    pi, sigma = _prepare(pi, sigma, phi, mode)
    rel = Permutation._from0(_relative0(pi, sigma))
    total = 0.0
    for cyc in cycle_decomposition(rel):
        if len(cyc) < 2:
            continue
        costs = [single_transposition_distance(phi, cyc[k], cyc[(k + 1) % len(cyc)]) for k in range(len(cyc))]
        total += sum(costs) - max(costs)
    return total


@dataclass(frozen=True)
class DistanceResult:
    """Outcome of :func:`transposition_distance`. ``value`` is None when only bounds are known."""

    value: float | None
    lower: float
    upper: float
    exact: bool
    method: str


def transposition_distance(
    pi,
    sigma,
    phi: TranspositionWeights,
    mode=SimilarityMode.POSITIONS,
    tree: DefiningTree | None = None,
    use_oracle: bool = True,
) -> DistanceResult:
    """Best available answer: an exact method when one applies, else certified bounds."""
    pi, sigma = _prepare(pi, sigma, phi, mode)
    D = d_phi_general(pi, sigma, phi)
    lower = 0.5 * D
    upper = D if _has_metric_upper(phi) else 2 * D
    rel = _relative0(pi, sigma)
    if rel == tuple(range(len(rel))):
        return DistanceResult(0.0, 0.0, 0.0, True, "identity")
    if metric_path_tree(phi) is not None:
        return DistanceResult(lower, lower, lower, True, "metric_path")
    if is_extended_path(phi):
        v = _extended_path_distance(rel, phi)
        return DistanceResult(v, v, v, True, "extended_path")
    if tree is not None:
        v = tree_path_decomposable_distance(pi, sigma, phi, tree)
        if v is not None:
            return DistanceResult(v, v, v, True, "tree_path_decomposable")
    if use_oracle and phi.n <= CAYLEY_MAX_N:
        v = cayley_table(phi).get(rel, math.inf)
        return DistanceResult(v, v, v, True, "cayley_oracle")
    upper = min(upper, heuristic_upper_bound(pi, sigma, phi))
    return DistanceResult(None, lower, upper, False, "bounds")


def similarity_distance(rank_a, rank_b, phi: TranspositionWeights, mode=SimilarityMode.CANDIDATES, tree=None) -> float:
    """Exact similarity distance between two rankings; raises if only bounds are available."""
    res = transposition_distance(rank_a, rank_b, phi, mode, tree)
    if not res.exact:
        raise CapabilityError(
            f"no exact method applies (bounds {res.lower:.6g}..{res.upper:.6g}); "
            "supply a defining tree or reduce n to at most 7"
        )
    return res.value


def weighted_transposition(
    phi: TranspositionWeights,
    mode=SimilarityMode.POSITIONS,
    tree: DefiningTree | None = None,
    fallback: str = "error",
) -> Callable[[Permutation, Permutation], float]:
    """Distance functional for the aggregation engines.

    ``fallback`` decides what happens when no exact method applies:
    ``"error"`` raises, ``"upper"`` uses the best upper bound and
    ``"surrogate"`` uses ``D``.
    """
    if fallback not in ("error", "upper", "surrogate"):
        raise ValueError(f"unknown fallback {fallback!r}")
    mode = SimilarityMode(mode)

    def dist(pi, sigma):
        if fallback == "surrogate":
            return d_phi_general(pi, sigma, phi, mode)
        res = transposition_distance(pi, sigma, phi, mode, tree)
        if res.exact:
            return res.value
        if fallback == "upper":
            return res.upper
        raise CapabilityError("no exact weighted transposition method applies")

    dist.method = f"wtrans-{mode.value}"
    dist.exact = fallback != "surrogate"
    return dist
