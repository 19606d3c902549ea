import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankforge.perm import Permutation, Transposition
from rankforge.weights import (
    AdjacentWeights,
    DefiningTree,
    TranspositionWeights,
    finite_edge_tree,
    from_extended_tree,
    from_metric_tree,
    is_decreasing,
    is_extended_path,
    is_increasing,
    is_metric,
    is_monotonic,
    metric_path_tree,
    min_weight_path,
    segment_weight,
    single_transposition_distance,
)
from rankforge.wtrans import exact_cayley

CITY = TranspositionWeights.from_pairs(4, {(1, 2): 1, (3, 4): 2}, default=3)
PARITY = TranspositionWeights.from_function(4, lambda i, j: 1 if (i - j) % 2 == 0 else 2)


def brute_shortest(phi, a, b):
    """Lightest simple path by enumerating every vertex sequence."""
    n = phi.n
    others = [v for v in range(1, n + 1) if v not in (a, b)]
    best = math.inf
    for k in range(len(others) + 1):
        for mid in itertools.permutations(others, k):
            seq = (a, *mid, b)
            best = min(best, sum(phi(seq[i], seq[i + 1]) for i in range(len(seq) - 1)))
    return best


def random_tree(rng, n):
    edges = []
    for v in range(2, n + 1):
        edges.append((int(rng.integers(1, v)), v, float(rng.uniform(0.5, 3))))
    perm = rng.permutation(n) + 1
    return DefiningTree(n, [(int(perm[u - 1]), int(perm[v - 1]), w) for u, v, w in edges])


class TestAdjacent:
    def test_monotonicity(self):
        assert is_decreasing(AdjacentWeights.geometric(0.9, 10))
        c = AdjacentWeights([1, 1, 1])
        assert is_decreasing(c) and is_increasing(c)
        assert not is_monotonic(AdjacentWeights([2, 1, 2]))
        assert is_increasing(AdjacentWeights([0, 1, 3])) and is_monotonic(AdjacentWeights([0, 1, 3]))

    def test_segments(self):
        phi = AdjacentWeights([2, 1, 2])
        assert segment_weight(phi, 3, 3) == 0
        assert segment_weight(phi, 1, 4) == 5 == segment_weight(phi, 4, 1)
        with pytest.raises(IndexError):
            segment_weight(phi, 0, 2)

    def test_validation(self):
        with pytest.raises(ValueError):
            AdjacentWeights([1, -1])
        with pytest.raises(ValueError):
            AdjacentWeights([1, math.inf])

    def test_constructors(self):
        assert AdjacentWeights.geometric(0.5, 4).weights == (1.0, 0.5, 0.25)
        assert AdjacentWeights.two_level(5, 1, 3).weights == (1, 0, 1, 0)
        assert AdjacentWeights.plurality(4).weights == (1, 0, 0)
        with pytest.raises(ValueError):
            AdjacentWeights.two_level(4, 3, 3)

    def test_weight_of(self):
        phi = AdjacentWeights([2, 1, 2])
        assert phi.weight_of(Transposition(2, 3)) == 1
        assert phi.weight_of(Transposition(1, 3)) == math.inf

    def test_embedding(self):
        tw = AdjacentWeights([2, 1, 2]).to_transposition_weights()
        assert tw(1, 2) == 2 and tw(3, 4) == 2 and math.isinf(tw(1, 3))
        assert is_extended_path(tw)


class TestTransposition:
    def test_validation(self):
        with pytest.raises(ValueError):
            TranspositionWeights([[0, 1], [2, 0]])
        with pytest.raises(ValueError):
            TranspositionWeights([[0, -1], [-1, 0]])
        with pytest.raises(ValueError):
            TranspositionWeights(np.zeros((2, 3)))

    def test_read_only(self):
        with pytest.raises(ValueError):
            CITY.matrix[0, 1] = 5

    def test_city_path(self):
        p = min_weight_path(CITY, 2, 3)
        assert p.total_weight == 3 and p.vertices == (2, 3)

    def test_extended_path_route(self):
        tw = from_extended_tree(DefiningTree.path(range(1, 6)))
        assert min_weight_path(tw, 1, 3).vertices == (1, 2, 3)

    def test_lexicographic_tie(self):
        # 1-2-4 and 1-3-4 both cost 2; the direct edge costs 3
        tw = TranspositionWeights.from_pairs(4, {(1, 2): 1, (2, 4): 1, (1, 3): 1, (3, 4): 1, (1, 4): 3, (2, 3): 5})
        assert min_weight_path(tw, 1, 4).vertices == (1, 2, 4)

    def test_unreachable(self):
        tw = TranspositionWeights.from_pairs(3, {(1, 2): 1})
        assert not min_weight_path(tw, 1, 3).finite

    def test_metric(self):
        assert is_metric(CITY) and is_metric(PARITY)
        m = np.ones((4, 4))
        m[0, 1] = m[1, 0] = 10
        assert not is_metric(TranspositionWeights(m))

    def test_metric_trees(self):
        path = from_metric_tree(DefiningTree.path(range(1, 6)))
        for a in range(1, 6):
            for b in range(a + 1, 6):
                assert path(a, b) == b - a
        star = from_metric_tree(DefiningTree.star(5, 1))
        assert star(1, 4) == 1 and star(2, 5) == 2

    def test_metric_path_recogniser(self):
        tree = DefiningTree.path([3, 1, 4, 2], [1.0, 2.0, 0.5])
        found = metric_path_tree(from_metric_tree(tree))
        assert found is not None and found.is_path
        assert np.allclose(from_metric_tree(found).matrix, from_metric_tree(tree).matrix)
        assert metric_path_tree(CITY) is None
        assert metric_path_tree(from_metric_tree(DefiningTree.star(4, 1))) is None

    def test_extended_tree(self):
        tree = DefiningTree.star(4, 2, 1.5)
        tw = from_extended_tree(tree)
        assert tw(2, 3) == 1.5 and math.isinf(tw(1, 3))
        assert finite_edge_tree(tw) is not None and not is_extended_path(tw)
        n2 = from_extended_tree(DefiningTree.path([1, 2], [4.0]))
        assert n2(1, 2) == 4

    def test_invalid_tree(self):
        with pytest.raises(ValueError):
            DefiningTree(3, [(1, 2, 1), (2, 1, 1)])
        with pytest.raises(ValueError):
            DefiningTree(4, [(1, 2, 1), (3, 4, 1)])

    def test_single_transposition(self):
        assert single_transposition_distance(CITY, 1, 2) == 1
        tw = from_extended_tree(DefiningTree.path(range(1, 4)))
        assert single_transposition_distance(tw, 1, 3) == 3
        assert exact_cayley(Transposition(1, 3).as_permutation(3), Permutation.identity(3), tw) == 3


def test_extended_tree_routes_follow_tree():
    rng = np.random.default_rng(3)
    for _ in range(30):
        n = int(rng.integers(2, 9))
        tree = random_tree(rng, n)
        tw = from_extended_tree(tree)
        a, b = (int(x) for x in rng.choice(np.arange(1, n + 1), 2, replace=False))
        assert list(min_weight_path(tw, a, b).vertices) == tree.tree_path(a, b)


def test_metric_route_is_direct_edge():
    rng = np.random.default_rng(4)
    for _ in range(30):
        n = int(rng.integers(2, 7))
        tw = from_metric_tree(random_tree(rng, n))
        for a in range(1, n + 1):
            for b in range(a + 1, n + 1):
                assert abs(min_weight_path(tw, a, b).total_weight - tw(a, b)) <= 1e-9
                assert abs(brute_shortest(tw, a, b) - tw(a, b)) <= 1e-9


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_metric_tree_is_metric(n, seed):
    assert is_metric(from_metric_tree(random_tree(np.random.default_rng(seed), n)))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_shortest_paths_match_enumeration(n, seed):
    rng = np.random.default_rng(seed)
    m = np.triu(rng.uniform(0.1, 5, (n, n)), 1)
    m[np.triu(rng.random((n, n)) < 0.3, 1)] = math.inf
    tw = TranspositionWeights(m + m.T)
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            expect = brute_shortest(tw, a, b)
            assert min_weight_path(tw, a, b).total_weight == pytest.approx(expect)
            assert tw.shortest[a - 1, b - 1] == pytest.approx(expect)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_single_transposition_against_oracle(n, seed):
    rng = np.random.default_rng(seed)
    m = np.triu(rng.uniform(0.1, 5, (n, n)), 1)
    m[np.triu(rng.random((n, n)) < 0.4, 1)] = math.inf
    # keep the graph connected through a random path
    order = rng.permutation(n)
    for i in range(n - 1):
        u, v = sorted((order[i], order[i + 1]))
        m[u, v] = rng.uniform(0.1, 5)
    tw = TranspositionWeights(m + m.T)
    e = Permutation.identity(n)
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            d = single_transposition_distance(tw, a, b)
            assert d == pytest.approx(single_transposition_distance(tw, b, a))
            assert d == pytest.approx(exact_cayley(Transposition(a, b).as_permutation(n), e, tw))
            assert d <= 2 * min_weight_path(tw, a, b).total_weight + 1e-9
