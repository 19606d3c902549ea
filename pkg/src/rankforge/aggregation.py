"""Distance-based rank aggregation.

Every engine minimises (exactly or approximately) the cumulative distance
``sum_l d(pi, sigma_l)`` to a vote profile. Distances are plain callables
``(pi, sigma) -> float`` so Kendall, weighted Kendall and similarity
distances all plug into the same code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DimensionError
from .perm import (
    MAX_ENUMERATION_N,
    Permutation,
    all_permutations,
    as_permutation,
    kendall_tau,
)
from .weights import TOL, AdjacentWeights, TranspositionWeights
from .wkendall import weighted_kendall
from .wtrans import SimilarityMode, transposition_distance

Distance = Callable[[Permutation, Permutation], float]


@dataclass(frozen=True)
class VoteProfile:
    """An ordered multiset of complete rankings over the same ``n`` candidates."""

    votes: tuple[Permutation, ...]
    labels: tuple[str, ...] | None = None

    def __init__(self, votes: Iterable, labels: Sequence[str] | None = None):
        vs = tuple(as_permutation(v) for v in votes)
        if not vs:
            raise ValueError("a profile needs at least one vote")
        n = vs[0].n
        for k, v in enumerate(vs):
            if v.n != n:
                raise DimensionError(f"vote {k + 1} ranks {v.n} candidates, expected {n}")
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != n or len(set(labels)) != n:
                raise ValueError("labels must name each candidate exactly once")
        object.__setattr__(self, "votes", vs)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.votes[0].n

    @property
    def m(self) -> int:
        return len(self.votes)

    def __len__(self) -> int:
        return len(self.votes)

    def __iter__(self):
        return iter(self.votes)

    def __getitem__(self, k: int) -> Permutation:
        return self.votes[k]

    def without(self, candidate: int) -> tuple[VoteProfile, list[int]]:
        """Drop a candidate from every vote; returns the reduced profile and the id map."""
        keep = [c for c in range(1, self.n + 1) if c != candidate]
        new_id = {c: k + 1 for k, c in enumerate(keep)}
        votes = [[new_id[c] for c in v.entries if c != candidate] for v in self.votes]
        return VoteProfile(votes), keep


def as_profile(profile) -> VoteProfile:
    return profile if isinstance(profile, VoteProfile) else VoteProfile(profile)


@dataclass
class AggregationOutcome:
    optima: list[Permutation]
    objective: float
    per_vote: list[float]
    method: str
    exact: bool
    details: dict = field(default_factory=dict)

    @property
    def best(self) -> Permutation:
        return self.optima[0]

    def average(self, m: int | None = None) -> float:
        return self.objective / (m or len(self.per_vote))


def kendall_distance(pi, sigma) -> float:
    return float(kendall_tau(as_permutation(pi), as_permutation(sigma)))


kendall_distance.method = "kendall"
kendall_distance.exact = True


def cumulative_distance(pi, profile, dist: Distance = kendall_distance) -> float:
    pi = as_permutation(pi)
    profile = as_profile(profile)
    if pi.n != profile.n:
        raise DimensionError(f"ranking has n={pi.n}, profile has n={profile.n}")
    return float(sum(dist(pi, v) for v in profile))


def _outcome(optima, profile, dist, method, exact, **details) -> AggregationOutcome:
    optima = sorted(set(optima))
    per_vote = [float(dist(optima[0], v)) for v in profile]
    return AggregationOutcome(optima, float(sum(per_vote)), per_vote, method, exact, details)


def aggregate_exhaustive(profile, dist: Distance = kendall_distance, limit: int = MAX_ENUMERATION_N) -> AggregationOutcome:
    """Scan all of S_n, keeping every ranking within 1e-9 of the minimum."""
    profile = as_profile(profile)
    best = np.inf
    optima: list[Permutation] = []
    for pi in all_permutations(profile.n, limit):
        total = sum(dist(pi, v) for v in profile)
        if total < best - TOL:
            best, optima = total, [pi]
        elif total <= best + TOL:
            optima.append(pi)
    return _outcome(optima, profile, dist, "exhaustive", True)


def aggregate_closest_vote(profile, dist: Distance = kendall_distance) -> AggregationOutcome:
    """The vote with the smallest cumulative distance to the profile (2-approximation)."""
    profile = as_profile(profile)
    scores = [cumulative_distance(v, profile, dist) for v in profile]
    low = min(scores)
    optima = [v for v, s in zip(profile, scores) if s <= low + TOL]
    return _outcome(optima, profile, dist, "closest", False)


def matching_cost_matrix(profile, phi, mode=SimilarityMode.POSITIONS) -> np.ndarray:
    """``C[i, j]``: surrogate cost of putting candidate j+1 at rank i+1, summed over votes."""
    profile = as_profile(profile)
    n = profile.n
    if phi.n != n:
        raise DimensionError(f"weights are for n={phi.n}, profile has n={n}")
    if isinstance(phi, AdjacentWeights):
        pre = np.asarray(phi.prefix)
        f = np.abs(pre[:, None] - pre[None, :])
        mode = SimilarityMode.POSITIONS
    else:
        f = np.asarray(phi.shortest)
        mode = SimilarityMode(mode)
    C = np.zeros((n, n))
    for v in profile:
        if mode is SimilarityMode.POSITIONS:
            ranks = np.array([v.rank(j) - 1 for j in range(1, n + 1)])
            # rank i vs the vote's rank of candidate j
            C += f[:, ranks]
        else:
            # on rank vectors: candidate j vs the candidate the vote puts at rank i
            at = np.array(v.zero_based)
            C += f[at, :]
    return C


def _lexicographic_assignment(C: np.ndarray) -> tuple[list[int], float]:
    n = C.shape[0]
    finite = np.where(np.isfinite(C), C, 1e300)
    r, c = linear_sum_assignment(finite)
    opt = float(finite[r, c].sum())
    scale = max(1.0, abs(opt))
    rows, cols = list(range(n)), list(range(n))
    chosen: list[int] = []
    fixed = 0.0
    for i in range(n):
        rest_rows = rows[1:]
        for j in sorted(cols):
            rest_cols = [x for x in cols if x != j]
            rest = 0.0
            if rest_rows:
                sub = finite[np.ix_(rest_rows, rest_cols)]
                rr, cc = linear_sum_assignment(sub)
                rest = float(sub[rr, cc].sum())
            if fixed + finite[i, j] + rest <= opt + TOL * scale:
                chosen.append(j)
                fixed += finite[i, j]
                cols = rest_cols
                rows = rest_rows
                break
    return chosen, opt


def _default_distance(phi, mode) -> Distance:
    if isinstance(phi, AdjacentWeights):
        return weighted_kendall(phi)

    def dist(pi, sigma):
        res = transposition_distance(pi, sigma, phi, mode)
        return res.value if res.exact else res.upper

    dist.method = "wtrans"
    dist.exact = phi.n <= 7
    return dist


def aggregate_matching(profile, phi, mode=SimilarityMode.POSITIONS, dist: Distance | None = None) -> AggregationOutcome:
    """Exact minimiser of the cumulative surrogate ``D`` via min-cost perfect matching.

    Among equally cheap matchings the lexicographically smallest ranking is
    returned. ``objective`` is measured with ``dist`` (the exact distance by
    default); the surrogate optimum is kept in ``details``.
    """
    profile = as_profile(profile)
    C = matching_cost_matrix(profile, phi, mode)
    assignment, surrogate = _lexicographic_assignment(C)
    pi = Permutation([j + 1 for j in assignment])
    dist = dist or _default_distance(phi, mode)
    return _outcome([pi], profile, dist, "matching", False, surrogate_objective=surrogate)


def local_search_adjacent(start, profile, dist: Distance, trace: list | None = None) -> Permutation:
    """Best-improvement descent over adjacent position swaps.

    A move is taken only if it lowers the objective by more than 1e-9; among
    equally good moves the smallest swap index wins.
    """
    profile = as_profile(profile)
    cur = as_permutation(start)
    cur_obj = cumulative_distance(cur, profile, dist)
    if trace is not None:
        trace.append((cur, cur_obj))
    n = cur.n
    while True:
        best_obj, best_pi = cur_obj, None
        for i in range(n - 1):
            p = list(cur.entries)
            p[i], p[i + 1] = p[i + 1], p[i]
            cand = Permutation(p)
            obj = cumulative_distance(cand, profile, dist)
            if obj < best_obj - TOL:
                best_obj, best_pi = obj, cand
        if best_pi is None:
            return cur
        cur, cur_obj = best_pi, best_obj
        if trace is not None:
            trace.append((cur, cur_obj))


def aggregate_bmls(profile, phi, mode=SimilarityMode.POSITIONS, dist: Distance | None = None) -> AggregationOutcome:
    """Matching seed refined by adjacent-swap local search under the exact distance."""
    profile = as_profile(profile)
    dist = dist or _default_distance(phi, mode)
    seed = aggregate_matching(profile, phi, mode, dist)
    trace: list = []
    final = local_search_adjacent(seed.best, profile, dist, trace)
    return _outcome(
        [final], profile, dist, "bmls", False,
        seed=seed.best, seed_objective=seed.objective, steps=len(trace) - 1,
    )


def plurality_winner_ranking(profile) -> AggregationOutcome:
    """Repeatedly take the candidate with most first places among those left.

    Ties go to the smaller candidate id. ``objective`` is the first-place
    count of the winner.
    """
    profile = as_profile(profile)
    remaining = set(range(1, profile.n + 1))
    order = []
    counts_first = None
    while remaining:
        counts = {c: 0 for c in remaining}
        for v in profile:
            top = next(c for c in v.entries if c in remaining)
            counts[top] += 1
        winner = min(remaining, key=lambda c: (-counts[c], c))
        if counts_first is None:
            counts_first = counts
        order.append(winner)
        remaining.discard(winner)
    pi = Permutation(order)
    return AggregationOutcome(
        [pi], float(counts_first[order[0]]), [1.0 if v(1) == order[0] else 0.0 for v in profile],
        "plurality", False, {"first_place_counts": dict(sorted(counts_first.items()))},
    )


def majority_criterion_holds(profile, aggregate) -> bool:
    """False only if some candidate tops more than half the votes but not the aggregate."""
    profile = as_profile(profile)
    aggregate = as_permutation(aggregate)
    tops: dict[int, int] = {}
    for v in profile:
        tops[v(1)] = tops.get(v(1), 0) + 1
    for c, k in tops.items():
        if 2 * k > profile.m:
            return aggregate(1) == c
    return True
