"""Expected distances and cross-method diagnostics."""

from __future__ import annotations

import io
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .aggregation import (
    aggregate_bmls,
    aggregate_closest_vote,
    aggregate_exhaustive,
    aggregate_matching,
    as_profile,
)
from .errors import CapabilityError
from .markov import mc_aggregate
from .perm import MAX_ENUMERATION_N, Permutation
from .weights import AdjacentWeights, is_decreasing, is_monotonic
from .wkendall import weighted_kendall


def harmonic(i: int, exact: bool = False):
    """``H_i = 1 + 1/2 + ... + 1/i`` with ``H_0 = 0``."""
    if i < 0:
        raise ValueError("harmonic numbers are defined for i >= 0")
    h = sum((Fraction(1, l) for l in range(1, i + 1)), Fraction(0))
    return h if exact else float(h)


def _raw_weights(phi) -> list:
    return list(phi.weights) if isinstance(phi, AdjacentWeights) else list(phi)


def expected_weighted_kendall(phi, n: int | None = None, exact: bool = True):
    """Mean distance from e to a uniformly random permutation, decreasing weights only.

    With ``exact=True`` the sum is carried out in rationals (floats are
    converted exactly), and a :class:`~fractions.Fraction` is returned.
    """
    w = _raw_weights(phi)
    if n is None:
        n = len(w) + 1
    if len(w) != n - 1:
        raise ValueError(f"need {n - 1} weights for n={n}, got {len(w)}")
    if any(w[i + 1] > w[i] for i in range(len(w) - 1)):
        raise CapabilityError("the closed form needs non-increasing weights; use monte_carlo_expected")
    H = [harmonic(i, exact=True) for i in range(n + 1)]
    total = sum(
        (Fraction(w[s - 1]) * (n - s) * (H[n] - H[n - s]) for s in range(1, n)),
        Fraction(0),
    )
    return total if exact else float(total)


def _batch_monotonic(perms: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Decreasing-weight distance from e for each row of 0-based permutations (rows are pi)."""
    t, n = perms.shape
    pos = np.argsort(perms, axis=1)  # pos[:, i] = rank of candidate i (0-based)
    idx = np.arange(n)
    # inversion (i, j) iff relative order in pi differs from natural order
    disagree = (pos[:, :, None] < pos[:, None, :]) != (idx[:, None] < idx[None, :])[None]
    counts = disagree.sum(axis=2)
    p, q = pos + 1, idx[None, :] + 1
    turn = (p + q + counts) // 2
    pre = np.concatenate([[0.0], np.cumsum(w)])
    return 0.5 * ((pre[turn - 1] - pre[p - 1]) + (pre[turn - 1] - pre[q - 1])).sum(axis=1)


@dataclass(frozen=True)
class ExpectedDistanceReport:
    closed_form: float | None
    monte_carlo_mean: float
    trials: int
    std_error: float
    seed: int

    def z_score(self) -> float:
        if self.closed_form is None or self.std_error == 0:
            return 0.0 if self.closed_form == self.monte_carlo_mean else math.inf
        return (self.monte_carlo_mean - self.closed_form) / self.std_error


def monte_carlo_expected(phi, n: int | None = None, trials: int = 100_000, seed: int = 0) -> ExpectedDistanceReport:
    """Sample ``d(pi, e)`` over uniform random pi.

    Permutations come from numpy's PCG64 seeded with the given 64-bit seed.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    w = np.asarray(_raw_weights(phi), dtype=float)
    if n is None:
        n = len(w) + 1
    if len(w) != n - 1:
        raise ValueError(f"need {n - 1} weights for n={n}, got {len(w)}")
    seed = int(seed) & (2**64 - 1)
    rng = np.random.Generator(np.random.PCG64(seed))
    adj = AdjacentWeights(w)
    closed = float(expected_weighted_kendall(adj, n)) if is_decreasing(adj) else None
    if n == 1:
        return ExpectedDistanceReport(closed, 0.0, trials, 0.0, seed)
    # independent Fisher-Yates shuffle of each row
    perms = rng.permuted(np.tile(np.arange(n), (trials, 1)), axis=1)
    if is_decreasing(adj):
        samples = _batch_monotonic(perms, w)
    elif is_monotonic(adj):
        # mirror ranks and ids so the weights become decreasing
        samples = _batch_monotonic((n - 1 - perms)[:, ::-1], w[::-1])
    else:
        dist = weighted_kendall(adj)
        e = Permutation.identity(n)
        samples = np.array([dist(Permutation._from0(p), e) for p in perms])
    mean = float(samples.mean())
    se = float(samples.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return ExpectedDistanceReport(closed, mean, trials, se, seed)


@dataclass
class MethodRow:
    method: str
    aggregate: Permutation
    objective: float
    average: float
    gap: float | None
    distance_to_opt: float | None
    exact: bool


@dataclass
class ComparisonReport:
    weights: tuple[float, ...]
    m: int
    rows: list[MethodRow]
    opt_set: list[Permutation]

    def row(self, method: str) -> MethodRow:
        for r in self.rows:
            if r.method == method:
                return r
        raise KeyError(method)

    def to_tsv(self, labels: Sequence[str] | None = None) -> str:
        buf = io.StringIO()
        buf.write("method\taggregate\tobjective\taverage\tgap\tdistance_to_opt\texact\n")
        for r in self.rows:
            agg = _fmt_ranking(r.aggregate, labels)
            gap = "" if r.gap is None else f"{r.gap:.4f}"
            dto = "" if r.distance_to_opt is None else f"{r.distance_to_opt:.4f}"
            buf.write(f"{r.method}\t{agg}\t{r.objective:.4f}\t{r.average:.4f}\t{gap}\t{dto}\t{str(r.exact).lower()}\n")
        return buf.getvalue()

    def to_dict(self, labels: Sequence[str] | None = None) -> dict:
        return {
            "weights": list(self.weights),
            "m": self.m,
            "opt_set": [_ranking_list(p, labels) for p in self.opt_set],
            "rows": [
                {**{k: v for k, v in asdict(r).items() if k != "aggregate"},
                 "aggregate": _ranking_list(r.aggregate, labels)}
                for r in self.rows
            ],
        }

    def to_json(self, labels: Sequence[str] | None = None) -> str:
        return json.dumps(self.to_dict(labels), indent=2, sort_keys=True)


def _ranking_list(p: Permutation, labels) -> list:
    return [labels[c - 1] for c in p.entries] if labels else list(p.entries)


def _fmt_ranking(p: Permutation, labels) -> str:
    return "(" + ",".join(str(x) for x in _ranking_list(p, labels)) + ")"


def compare_methods(profile, phi, methods: Sequence[str] = ("opt", "bmls", "mc"), limit: int = MAX_ENUMERATION_N) -> ComparisonReport:
    """Aggregate with each method and report objectives against the exhaustive optimum.

    ``distance_to_opt`` is the weighted Kendall distance to the nearest
    exhaustive optimum.
    """
    profile = as_profile(profile)
    phi = phi if isinstance(phi, AdjacentWeights) else AdjacentWeights(phi)
    dist = weighted_kendall(phi)
    m = profile.m
    opt = None
    if "opt" in methods or profile.n <= limit:
        opt = aggregate_exhaustive(profile, dist, limit)
    rows = []
    for method in methods:
        if method == "opt":
            out = opt
        elif method == "bmls":
            out = aggregate_bmls(profile, phi, dist=dist)
        elif method == "matching":
            out = aggregate_matching(profile, phi, dist=dist)
        elif method == "mc":
            out = mc_aggregate(profile, phi)
        elif method == "closest":
            out = aggregate_closest_vote(profile, dist)
        else:
            raise ValueError(f"unknown method {method!r}")
        gap = dto = None
        if opt is not None:
            gap = out.objective - opt.objective
            dto = min(dist(out.best, o) for o in opt.optima)
        rows.append(MethodRow(method, out.best, out.objective, out.objective / m, gap, dto, out.exact))
    return ComparisonReport(phi.weights, m, rows, list(opt.optima) if opt else [])
