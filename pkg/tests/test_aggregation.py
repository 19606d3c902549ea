import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from conftest import ELEVEN_VOTES, P
from rankforge.aggregation import (
    VoteProfile,
    aggregate_bmls,
    aggregate_closest_vote,
    aggregate_exhaustive,
    aggregate_matching,
    cumulative_distance,
    kendall_distance,
    local_search_adjacent,
    majority_criterion_holds,
    matching_cost_matrix,
    plurality_winner_ranking,
)
from rankforge.errors import CapabilityError, DimensionError
from rankforge.perm import Permutation, all_permutations
from rankforge.weights import AdjacentWeights, TranspositionWeights
from rankforge.wkendall import d_phi_surrogate, weighted_kendall
from rankforge.wtrans import d_phi_general, weighted_transposition

PROFILE_A = [(4, 1, 2, 5, 3), (4, 2, 1, 3, 5), (1, 4, 5, 2, 3), (2, 3, 1, 5, 4), (5, 3, 1, 2, 4)]
PROFILE_B = [(1, 4, 2, 3), (1, 4, 3, 2), (2, 3, 1, 4), (4, 2, 3, 1), (3, 2, 4, 1)]
PROFILE_C = [(5, 4, 1, 3, 2), (1, 5, 4, 2, 3), (4, 3, 5, 1, 2), (1, 3, 4, 5, 2),
       (4, 2, 5, 3, 1), (1, 2, 5, 3, 4), (2, 4, 3, 5, 1)]
PROFILE_D = [(1, 2, 3), (1, 2, 3), (3, 2, 1), (2, 1, 3)]
G23_4 = AdjacentWeights.geometric(2 / 3, 4)
G23_5 = AdjacentWeights.geometric(2 / 3, 5)


def rand_profile(rng, n, m):
    return VoteProfile(Permutation._from0(rng.permutation(n)) for _ in range(m))


class TestProfile:
    def test_validation(self):
        with pytest.raises(ValueError):
            VoteProfile([])
        with pytest.raises(DimensionError):
            VoteProfile([(1, 2), (1, 2, 3)])
        with pytest.raises(ValueError):
            VoteProfile([(1, 2)], labels=["a", "a"])

    def test_without(self):
        reduced, keep = VoteProfile([(3, 1, 2), (2, 3, 1)]).without(1)
        assert keep == [2, 3]
        assert [v.entries for v in reduced] == [(2, 1), (1, 2)]


class TestObjective:
    def test_single_vote(self):
        assert cumulative_distance(P(2, 1, 3), [P(2, 1, 3)]) == 0

    def test_kemeny_ties(self):
        assert cumulative_distance(P(1, 2, 3), PROFILE_D) == 4

    def test_weighted_objectives(self):
        d = weighted_kendall(G23_4)
        assert cumulative_distance(P(1, 4, 2, 3), PROFILE_B, d) == pytest.approx(9)
        assert round(cumulative_distance(P(4, 2, 3, 1), PROFILE_B, d), 2) == 9.11

    def test_size_mismatch(self):
        with pytest.raises(DimensionError):
            cumulative_distance(P(1, 2), PROFILE_D)


class TestExhaustive:
    def test_examples(self):
        k = weighted_kendall(AdjacentWeights.uniform(5))
        assert aggregate_exhaustive(PROFILE_A).optima == [P(1, 4, 2, 5, 3)]
        assert aggregate_exhaustive(PROFILE_A, weighted_kendall(G23_5)).optima == [P(4, 1, 2, 5, 3)]
        assert aggregate_exhaustive(PROFILE_A, k).optima == [P(1, 4, 2, 5, 3)]
        assert aggregate_exhaustive(PROFILE_B).optima == [P(4, 2, 3, 1)]
        assert aggregate_exhaustive(PROFILE_B, weighted_kendall(G23_4)).optima == [P(1, 4, 2, 3)]
        assert aggregate_exhaustive(PROFILE_C).optima == [P(4, 5, 1, 2, 3)]
        assert aggregate_exhaustive(PROFILE_C, weighted_kendall(G23_5)).optima == [P(4, 1, 5, 2, 3)]
        g13 = AdjacentWeights.geometric(1 / 3, 5)
        assert aggregate_exhaustive(PROFILE_C, weighted_kendall(g13)).optima == [P(1, 4, 2, 5, 3)]

    def test_ties(self):
        out = aggregate_exhaustive(PROFILE_D)
        assert out.optima == [P(1, 2, 3), P(2, 1, 3)] and out.objective == 4 and out.exact
        alt = PROFILE_D[:3] + [(2, 3, 1)]
        out = aggregate_exhaustive(alt)
        assert set(out.optima) == {P(1, 2, 3), P(2, 1, 3), P(2, 3, 1)} and out.objective == 5
        assert aggregate_exhaustive(alt, weighted_kendall(AdjacentWeights([2, 1]))).optima == [P(1, 2, 3)]

    def test_single_vote(self):
        out = aggregate_exhaustive([P(3, 1, 2)])
        assert out.optima == [P(3, 1, 2)] and out.objective == 0

    def test_ceiling(self):
        with pytest.raises(CapabilityError):
            aggregate_exhaustive([Permutation.identity(6)], limit=5)

    def test_average(self):
        out = aggregate_exhaustive(ELEVEN_VOTES, weighted_kendall(AdjacentWeights.uniform(5)))
        assert out.best == P(2, 3, 4, 5, 1)
        assert round(out.average(), 4) == 2.3636


class TestApproximations:
    def test_closest_vote(self):
        out = aggregate_closest_vote(PROFILE_D)
        assert P(1, 2, 3) in out.optima
        for ex in (PROFILE_A, PROFILE_B, PROFILE_C, PROFILE_D):
            assert aggregate_closest_vote(ex).objective <= 2 * aggregate_exhaustive(ex).objective
        same = aggregate_closest_vote([P(2, 1, 3)] * 3)
        assert same.best == P(2, 1, 3) and same.objective == 0

    def test_matching_identical_votes(self):
        out = aggregate_matching([P(3, 1, 4, 2)] * 4, G23_4)
        assert out.best == P(3, 1, 4, 2) and out.details["surrogate_objective"] == 0

    def test_cost_matrix_positions(self):
        # placing candidate j at rank i costs the segment from i to the vote's rank of j
        prof = VoteProfile(PROFILE_B)
        C = matching_cost_matrix(prof, G23_4)
        pre = np.concatenate([[0], np.cumsum(G23_4.weights)])
        for i in range(4):
            for j in range(4):
                expect = sum(abs(pre[i] - pre[v.rank(j + 1) - 1]) for v in prof)
                assert C[i, j] == pytest.approx(expect)

    def test_matching_minimises_surrogate(self):
        rng = np.random.default_rng(0)
        for _ in range(40):
            n, m = int(rng.integers(2, 6)), int(rng.integers(1, 6))
            prof = rand_profile(rng, n, m)
            phi = AdjacentWeights(rng.uniform(0, 3, n - 1))
            out = aggregate_matching(prof, phi)
            best = min(sum(d_phi_surrogate(p, v, phi) for v in prof) for p in all_permutations(n))
            assert out.details["surrogate_objective"] == pytest.approx(best)
            assert sum(d_phi_surrogate(out.best, v, phi) for v in prof) == pytest.approx(best)

    def test_matching_minimises_transposition_surrogate(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            n, m = int(rng.integers(2, 6)), int(rng.integers(1, 5))
            prof = rand_profile(rng, n, m)
            a = np.triu(rng.uniform(0.1, 3, (n, n)), 1)
            tw = TranspositionWeights(a + a.T)
            for mode in ("positions", "candidates"):
                out = aggregate_matching(prof, tw, mode)
                best = min(sum(d_phi_general(p, v, tw, mode) for v in prof) for p in all_permutations(n))
                assert out.details["surrogate_objective"] == pytest.approx(best)
                assert sum(d_phi_general(out.best, v, tw, mode) for v in prof) == pytest.approx(best)

    def test_lexicographic_tie_break(self):
        # two opposite votes: every ranking in between is an optimal matching
        prof = VoteProfile([(1, 2, 3), (3, 2, 1)])
        out = aggregate_matching(prof, AdjacentWeights.uniform(3))
        assert out.best == P(1, 2, 3)

    def test_matching_agrees_with_scipy_value(self):
        rng = np.random.default_rng(2)
        prof = rand_profile(rng, 6, 7)
        phi = AdjacentWeights(rng.uniform(0, 3, 5))
        C = matching_cost_matrix(prof, phi)
        r, c = linear_sum_assignment(C)
        assert aggregate_matching(prof, phi).details["surrogate_objective"] == pytest.approx(C[r, c].sum())

    def test_two_approximation(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            n, m = int(rng.integers(2, 7)), int(rng.integers(1, 8))
            prof = rand_profile(rng, n, m)
            phi = AdjacentWeights(rng.uniform(0, 3, n - 1))
            d = weighted_kendall(phi)
            opt = aggregate_exhaustive(prof, d).objective
            assert aggregate_matching(prof, phi, dist=d).objective <= 2 * opt + 1e-9
            assert aggregate_bmls(prof, phi, dist=d).objective <= 2 * opt + 1e-9


class TestLocalSearch:
    def test_optimum_is_fixed(self):
        d = weighted_kendall(G23_5)
        opt = aggregate_exhaustive(PROFILE_A, d).best
        assert local_search_adjacent(opt, PROFILE_A, d) == opt

    def test_monotone_trajectory(self):
        rng = np.random.default_rng(4)
        for _ in range(30):
            prof = rand_profile(rng, 6, 5)
            phi = AdjacentWeights(rng.uniform(0, 3, 5))
            trace = []
            local_search_adjacent(Permutation._from0(rng.permutation(6)), prof, weighted_kendall(phi), trace)
            objs = [o for _, o in trace]
            assert all(b < a for a, b in zip(objs, objs[1:]))

    def test_bmls_local_optimum(self):
        out = aggregate_bmls(PROFILE_B, G23_4)
        assert out.best == P(4, 2, 3, 1)
        assert round(out.objective, 2) == 9.11
        assert out.objective > aggregate_exhaustive(PROFILE_B, weighted_kendall(G23_4)).objective

    def test_bmls_matches_exhaustive(self):
        for votes, phi in ((PROFILE_A, G23_5), (PROFILE_C, G23_5), (PROFILE_C, AdjacentWeights.geometric(1 / 3, 5)),
                           (PROFILE_D, AdjacentWeights([2, 1]))):
            d = weighted_kendall(phi)
            assert aggregate_bmls(votes, phi, dist=d).best in aggregate_exhaustive(votes, d).optima

    def test_identical_votes(self):
        assert aggregate_bmls([P(2, 4, 1, 3)] * 3, G23_4).best == P(2, 4, 1, 3)

    def test_similarity_bmls(self):
        parity = TranspositionWeights.from_function(4, lambda i, j: 1 if (i - j) % 2 == 0 else 2)
        votes = [(1, 2, 3, 4), (3, 2, 1, 4), (4, 1, 3, 2)]
        d = weighted_transposition(parity, "candidates")
        out = aggregate_bmls(votes, parity, "candidates", d)
        assert out.objective >= aggregate_exhaustive(votes, d).objective - 1e-9


class TestPluralityAndMajority:
    def test_plurality_ranking(self):
        out = plurality_winner_ranking(PROFILE_C)
        assert out.best(1) == 1 and out.objective == 3

    def test_plurality_single_vote(self):
        assert plurality_winner_ranking([P(3, 1, 2)]).best == P(3, 1, 2)

    def test_plurality_weights_pick_plurality_winner(self):
        rng = np.random.default_rng(5)
        for _ in range(60):
            n, m = int(rng.integers(2, 6)), int(rng.integers(1, 9))
            prof = rand_profile(rng, n, m)
            counts = np.bincount([v(1) for v in prof], minlength=n + 1)
            if sorted(counts)[-1] == sorted(counts)[-2]:
                continue  # no unique plurality winner
            opt = aggregate_exhaustive(prof, weighted_kendall(AdjacentWeights.plurality(n)))
            assert all(o(1) == plurality_winner_ranking(prof).best(1) for o in opt.optima)

    def test_majority(self):
        assert majority_criterion_holds([P(1, 2, 3)] * 3, P(1, 3, 2))
        assert not majority_criterion_holds([P(1, 2, 3)] * 3, P(2, 1, 3))

    def test_majority_random(self):
        rng = np.random.default_rng(6)
        for _ in range(300):
            n, m = int(rng.integers(2, 6)), int(rng.integers(1, 9))
            lead = int(rng.integers(1, n + 1))
            votes = []
            for k in range(m):
                if k <= m // 2:
                    rest = [int(c) for c in rng.permutation(n) + 1 if c != lead]
                    votes.append([lead] + rest)
                else:
                    votes.append([int(c) for c in rng.permutation(n) + 1])
            w = sorted(rng.uniform(0, 3, n - 1), reverse=True)
            w[0] = max(w[0], 0.05)
            out = aggregate_exhaustive(votes, weighted_kendall(AdjacentWeights(w)))
            assert all(majority_criterion_holds(votes, o) for o in out.optima)

    def test_borda_counterexample(self):
        # scores (s1, s2, s3) = (5, 4, 0): a wins a majority yet b out-scores it
        m = 11
        votes = [(1, 2, 3)] * ((m + 1) // 2) + [(2, 3, 1)] * ((m - 1) // 2)
        scores = {c: 0 for c in (1, 2, 3)}
        for v in votes:
            for r, c in enumerate(v):
                scores[c] += (5, 4, 0)[r]
        assert scores[2] > scores[1]
        out = aggregate_exhaustive(votes, weighted_kendall(AdjacentWeights([2, 1])))
        assert all(o(1) == 1 for o in out.optima)
        assert majority_criterion_holds(votes, out.best)
