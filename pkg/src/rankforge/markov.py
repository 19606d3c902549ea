"""Markov-chain aggregation with position weights.

States are candidates. Each vote contributes a row-stochastic matrix in
which a candidate moves towards candidates ranked above it, with
probability growing with the adjacent-swap weights between them; the
chain's stationary distribution orders the candidates.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.sparse.csgraph import connected_components

from .aggregation import AggregationOutcome, as_profile
from .errors import DimensionError, NonConvergenceError
from .perm import Permutation, as_permutation
from .weights import AdjacentWeights
from .wkendall import weighted_kendall

ABSORBING_THRESHOLD = 1 - 1e-6
STATIONARY_TOL = 1e-12
MAX_ITERATIONS = 1_000_000


def _weights(w) -> np.ndarray:
    arr = np.asarray(w.weights if isinstance(w, AdjacentWeights) else w, dtype=float)
    if (arr < 0).any():
        raise ValueError("weights must be nonnegative")
    return arr


def beta_matrix(sigma, w) -> np.ndarray:
    """``beta[i, j]`` for candidates i+1, j+1 under a single vote.

    For j ranked above i it is the largest average weight of a run of
    swaps ending just above i and starting at or below j; the diagonal
    collects the mass flowing in from candidates ranked below.
    """
    sigma = as_permutation(sigma)
    w = _weights(w)
    n = sigma.n
    if len(w) != n - 1:
        raise DimensionError(f"need {n - 1} weights for n={n}, got {len(w)}")
    if n > 1 and not w.any():
        raise ValueError("weights are identically zero")
    beta = np.zeros((n, n))
    order = sigma.zero_based
    pre = np.concatenate([[0.0], np.cumsum(w)])
    for ri in range(n):
        i = order[ri]
        # avg[l] for l = 0..ri-1 (0-based starting rank of the run)
        best = 0.0
        for rj in range(ri - 1, -1, -1):
            best = max(best, (pre[ri] - pre[rj]) / (ri - rj))
            beta[i, order[rj]] = best
    for ri in range(n):
        i = order[ri]
        beta[i, i] = sum(beta[order[rk], i] for rk in range(ri + 1, n))
    return beta


def vote_transition(sigma, w) -> np.ndarray:
    """Row-normalised beta; a row with no mass becomes a self-loop."""
    beta = beta_matrix(sigma, w)
    sums = beta.sum(axis=1)
    P = np.zeros_like(beta)
    for i in range(len(sums)):
        if sums[i] > 0:
            P[i] = beta[i] / sums[i]
        else:
            P[i, i] = 1.0
    return P


@dataclass
class MarkovModel:
    transition: np.ndarray
    per_vote: list[np.ndarray]
    stationary: np.ndarray | None = None
    unique: bool | None = None
    iterations: int = 0
    residual: float = float("nan")


def transition_matrix(profile, w) -> MarkovModel:
    profile = as_profile(profile)
    per_vote = [vote_transition(v, w) for v in profile]
    return MarkovModel(sum(per_vote) / len(per_vote), per_vote)


def closed_classes(P: np.ndarray) -> int:
    """Number of closed communicating classes; 1 means the stationary law is unique."""
    adj = P > 0
    k, labels = connected_components(adj, directed=True, connection="strong")
    closed = 0
    for c in range(k):
        members = labels == c
        if not adj[np.ix_(members, ~members)].any():
            closed += 1
    return closed


def stationary(model, tol: float = STATIONARY_TOL, max_iter: int = MAX_ITERATIONS) -> MarkovModel:
    """Power iteration ``x <- x P`` from the uniform vector.

    Stops once the L1 change drops below ``tol``. The returned model records
    whether the stationary law is unique.
    """
    if not isinstance(model, MarkovModel):
        model = MarkovModel(np.asarray(model, dtype=float), [])
    P = model.transition
    n = P.shape[0]
    x = np.full(n, 1.0 / n)
    residual = np.inf
    for it in range(1, max_iter + 1):
        y = x @ P
        y /= y.sum()
        residual = float(np.abs(y - x).sum())
        x = y
        if residual < tol:
            break
    else:
        raise NonConvergenceError(
            f"power iteration did not converge in {max_iter} steps (residual {residual:.3g})",
            last=x, residual=residual,
        )
    return replace(model, stationary=x, unique=closed_classes(P) == 1, iterations=it, residual=residual)


def _order_by_mass(x: np.ndarray) -> list[int]:
    return sorted(range(len(x)), key=lambda c: (-round(float(x[c]), 12), c))


def mc_ranking(profile, w, trace: list | None = None) -> list[int]:
    """Candidate ids (1-based) ordered by stationary mass, with the absorbing-state fallback.

    If one candidate holds essentially all the mass it is placed next, removed
    from every vote, and the chain is rebuilt on the rest. The remaining
    candidates then occupy lower ranks, so the weights are shifted to drop
    the positions already filled.
    """
    profile = as_profile(profile)
    w = list(_weights(w))
    n = profile.n
    if n == 1:
        return [1]
    if not any(w):
        # nothing left to discriminate on
        if trace is not None:
            trace.append({"candidates": list(range(1, n + 1)), "stationary": None})
        return list(range(1, n + 1))
    model = stationary(transition_matrix(profile, w))
    x = model.stationary
    if trace is not None:
        trace.append({"candidates": list(range(1, n + 1)), "stationary": x.tolist(), "unique": model.unique})
    top = _order_by_mass(x)[0]
    if x[top] > ABSORBING_THRESHOLD:
        reduced, keep = profile.without(top + 1)
        sub_trace = [] if trace is not None else None
        rest = mc_ranking(reduced, w[1:], sub_trace)
        if trace is not None:
            for step in sub_trace:
                step["candidates"] = [keep[c - 1] for c in step["candidates"]]
                trace.append(step)
        return [top + 1] + [keep[c - 1] for c in rest]
    return [c + 1 for c in _order_by_mass(x)]


def mc_aggregate(profile, w) -> AggregationOutcome:
    """Markov-chain aggregate; ``objective`` is the cumulative weighted Kendall distance."""
    profile = as_profile(profile)
    phi = w if isinstance(w, AdjacentWeights) else AdjacentWeights(w)
    trace: list = []
    pi = Permutation(mc_ranking(profile, phi, trace))
    dist = weighted_kendall(phi)
    per_vote = [dist(pi, v) for v in profile]
    return AggregationOutcome(
        [pi], float(sum(per_vote)), per_vote, "mc", False,
        {"stationary": trace[0]["stationary"], "stages": trace},
    )


def dwork_transition(profile) -> MarkovModel:
    """Unweighted baseline: move to each higher-ranked candidate with probability 1/n."""
    profile = as_profile(profile)
    n = profile.n
    per_vote = []
    for v in profile:
        P = np.zeros((n, n))
        order = v.zero_based
        for ri, i in enumerate(order):
            for rj in range(ri):
                P[i, order[rj]] = 1.0 / n
            P[i, i] = 1.0 - ri / n
        per_vote.append(P)
    return MarkovModel(sum(per_vote) / len(per_vote), per_vote)
