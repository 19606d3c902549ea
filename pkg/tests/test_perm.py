import itertools
from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import P
from rankforge.errors import CapabilityError, DimensionError
from rankforge.perm import (
    Permutation,
    Transposition,
    all_permutations,
    apply_position_swap,
    apply_value_swap,
    canonical_cycle,
    compose,
    cycle_decomposition,
    cycle_permutation,
    cycle_split,
    inverse,
    inversion_set,
    is_between,
    kendall_tau,
)
from rankforge.wkendall import find_tau_monotone


@st.composite
def perms(draw, n=None, max_n=8):
    n = n or draw(st.integers(1, max_n))
    return Permutation(draw(st.permutations(range(1, n + 1))))


@st.composite
def pairs(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    return draw(perms(n)), draw(perms(n))


def bfs_kendall(pi, sigma):
    """Adjacent-swap graph distance by breadth-first search (independent oracle)."""
    start, goal = pi.entries, sigma.entries
    seen, queue = {start: 0}, deque([start])
    while queue:
        p = queue.popleft()
        if p == goal:
            return seen[p]
        for i in range(len(p) - 1):
            q = p[:i] + (p[i + 1], p[i]) + p[i + 2:]
            if q not in seen:
                seen[q] = seen[p] + 1
                queue.append(q)


class TestBasics:
    def test_validation(self):
        with pytest.raises(ValueError):
            Permutation([1, 1, 2])
        with pytest.raises(ValueError):
            Permutation([])
        with pytest.raises(ValueError):
            Permutation([0, 1])

    def test_str_and_call(self):
        p = P(3, 1, 4, 2)
        assert str(p) == "(3,1,4,2)"
        assert p(1) == 3 and p.rank(3) == 1 and p.rank(2) == 4

    def test_compose(self):
        assert compose(P(3, 1, 4, 2), P(2, 1, 3, 4)) == P(1, 3, 4, 2)
        pi = P(3, 1, 4, 2)
        e = Permutation.identity(4)
        assert compose(e, pi) == pi == compose(pi, e)
        assert pi * P(2, 1, 3, 4) == compose(pi, P(2, 1, 3, 4))

    def test_compose_size_mismatch(self):
        with pytest.raises(DimensionError):
            compose(P(1, 2), P(1, 2, 3))

    def test_inverse(self):
        assert inverse(P(4, 2, 3, 1)) == P(4, 2, 3, 1)
        assert inverse(Permutation.identity(5)) == Permutation.identity(5)
        assert inverse(P(1, 3, 4, 2)) == P(1, 4, 2, 3)

    def test_position_swap(self):
        assert apply_position_swap(P(3, 1, 4, 2), Transposition(2, 3)) == P(3, 4, 1, 2)
        assert apply_position_swap(Permutation.identity(4), Transposition(1, 2)) == P(2, 1, 3, 4)
        with pytest.raises(IndexError):
            apply_position_swap(P(1, 2, 3), Transposition(3, 4))

    def test_value_swap(self):
        assert apply_value_swap(P(3, 1, 4, 2), Transposition(2, 3)) == P(2, 1, 4, 3)
        t = Transposition(2, 4)
        assert apply_value_swap(Permutation.identity(5), t) == t.as_permutation(5)

    def test_inversion_set(self):
        assert inversion_set(P(3, 1, 2), P(3, 1, 2)) == set()
        inv = inversion_set(P(1, 2, 3, 4), P(4, 2, 1, 3))
        assert frozenset({1, 2}) in inv and frozenset({2, 3}) not in inv
        got = inversion_set(P(4, 2, 3, 1), Permutation.identity(4))
        assert got == {frozenset(s) for s in ({1, 2}, {1, 3}, {1, 4}, {2, 4}, {3, 4})}

    def test_kendall(self):
        assert kendall_tau(P(1, 3, 4, 2), P(1, 2, 3, 4)) == 2
        for n in range(1, 9):
            assert kendall_tau(Permutation.reversal(n), Permutation.identity(n)) == n * (n - 1) // 2

    def test_cycles(self):
        assert cycle_decomposition(Permutation.identity(3)) == [(1,), (2,), (3,)]
        assert cycle_decomposition(P(4, 2, 3, 1)) == [(1, 4), (2,), (3,)]
        assert canonical_cycle((6, 4, 2)) == (2, 6, 4)

    def test_cycle_split(self):
        left, right = cycle_split((2, 6, 4, 7, 5), 4)
        assert (left, right) == ((2, 6, 4), (4, 7, 5))
        n = 7
        whole = cycle_permutation(n, (2, 6, 4, 7, 5))
        assert compose(cycle_permutation(n, left), cycle_permutation(n, right)) == whole
        with pytest.raises(ValueError):
            cycle_split((1, 2, 3), 1)

    def test_from_cycles(self):
        assert Permutation.from_cycles(4, (1, 4)) == P(4, 2, 3, 1)

    def test_between(self):
        pi, sigma = P(3, 1, 2, 4), P(2, 4, 1, 3)
        assert is_between(pi, pi, sigma) and is_between(sigma, pi, sigma)
        e = Permutation.identity(3)
        assert [w for w in all_permutations(3) if is_between(w, e, e)] == [e]

    def test_between_on_bubble_path(self):
        pi, sigma = P(4, 3, 1, 5, 2), P(2, 5, 1, 4, 3)
        cur = pi
        for t in find_tau_monotone(pi, sigma):
            cur = apply_position_swap(cur, t)
            assert is_between(cur, pi, sigma)
        assert cur == sigma

    def test_enumeration_ceiling(self):
        assert sum(1 for _ in all_permutations(4)) == 24
        with pytest.raises(CapabilityError):
            next(all_permutations(11))
        with pytest.raises(CapabilityError):
            next(all_permutations(5, limit=4))

    def test_lexicographic_order(self):
        got = [p.entries for p in all_permutations(3)]
        assert got == list(itertools.permutations((1, 2, 3)))


@settings(max_examples=150, deadline=None)
@given(pairs())
def test_kendall_matches_bfs(pq):
    pi, sigma = pq
    assert kendall_tau(pi, sigma) == bfs_kendall(pi, sigma) == len(inversion_set(pi, sigma))


@settings(max_examples=150, deadline=None)
@given(pairs())
def test_kendall_left_invariant(pq):
    pi, sigma = pq
    assert kendall_tau(pi, sigma) == kendall_tau(compose(inverse(sigma), pi), Permutation.identity(pi.n))


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_value_swap_is_conjugated_position_swap(data):
    pi = data.draw(perms(max_n=8).filter(lambda p: p.n >= 2))
    a = data.draw(st.integers(1, pi.n - 1))
    b = data.draw(st.integers(a + 1, pi.n))
    t = Transposition(a, b)
    assert apply_value_swap(pi, t) == inverse(apply_position_swap(inverse(pi), t))
    assert apply_position_swap(apply_position_swap(pi, t), t) == pi


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_betweenness_triangle(data):
    n = data.draw(st.integers(1, 6))
    omega, pi, sigma = (data.draw(perms(n)) for _ in range(3))
    tri = kendall_tau(pi, omega) + kendall_tau(omega, sigma) == kendall_tau(pi, sigma)
    assert is_between(omega, pi, sigma) == tri


@settings(max_examples=100, deadline=None)
@given(perms())
def test_cycles_rebuild_permutation(pi):
    cycles = cycle_decomposition(pi)
    assert sorted(x for c in cycles for x in c) == list(range(1, pi.n + 1))
    rebuilt = Permutation.identity(pi.n)
    for c in cycles:
        rebuilt = compose(cycle_permutation(pi.n, c), rebuilt)
    assert rebuilt == pi
