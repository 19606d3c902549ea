"""Weight functions and the weight graph on ``[n]``.

Two families live here. :class:`AdjacentWeights` holds the ``n - 1`` costs
of the adjacent swaps ``(i i+1)`` and drives weighted Kendall distances.
:class:`TranspositionWeights` holds a symmetric matrix of costs for every
swap ``(a b)``; ``math.inf`` marks a forbidden swap and behaves as an
absorbing element under addition and as the maximum under comparison.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DimensionError
from .perm import Transposition

TOL = 1e-9
INF = math.inf


class AdjacentWeights:
    """Costs ``w[i] = phi_(i i+1)`` for ``i = 1..n-1`` (1-based via :meth:`__getitem__`)."""

    __slots__ = ("weights", "prefix")

    def __init__(self, weights: Iterable[float]):
        w = tuple(float(x) for x in weights)
        for x in w:
            if not math.isfinite(x) or x < 0:
                raise ValueError(f"adjacent weights must be finite and >= 0, got {x}")
        self.weights = w
        # prefix[k] = w_1 + ... + w_k, so a segment sum is one subtraction
        acc = [0.0]
        for x in w:
            acc.append(acc[-1] + x)
        self.prefix = tuple(acc)

    @classmethod
    def geometric(cls, ratio: float, n: int) -> AdjacentWeights:
        """``phi_(i i+1) = ratio ** (i - 1)``."""
        return cls(ratio**i for i in range(n - 1))

    @classmethod
    def uniform(cls, n: int, value: float = 1.0) -> AdjacentWeights:
        return cls([value] * (n - 1))

    @classmethod
    def two_level(cls, n: int, a: int, b: int) -> AdjacentWeights:
        """Unit cost on the swaps ``(a a+1)`` and ``(b b+1)``, zero elsewhere."""
        if not 1 <= a < b < n:
            raise ValueError(f"need 1 <= a < b < n, got a={a}, b={b}, n={n}")
        return cls(1.0 if i in (a, b) else 0.0 for i in range(1, n))

    @classmethod
    def plurality(cls, n: int) -> AdjacentWeights:
        return cls(1.0 if i == 1 else 0.0 for i in range(1, n))

    @property
    def n(self) -> int:
        return len(self.weights) + 1

    @property
    def key(self) -> tuple:
        return ("adjacent", self.weights)

    def __len__(self) -> int:
        return len(self.weights)

    def __getitem__(self, i: int) -> float:
        if not 1 <= i <= len(self.weights):
            raise IndexError(f"adjacent swap index {i} out of range 1..{len(self.weights)}")
        return self.weights[i - 1]

    def weight_of(self, t: Transposition) -> float:
        return self[min(t.a, t.b)] if t.is_adjacent else INF

    def scaled(self, c: float) -> AdjacentWeights:
        return AdjacentWeights(c * x for x in self.weights)

    def reflected(self) -> AdjacentWeights:
        return AdjacentWeights(reversed(self.weights))

    def to_transposition_weights(self) -> TranspositionWeights:
        """Extended-path embedding: adjacent swaps keep their cost, all others are forbidden."""
        return from_extended_tree(
            DefiningTree(self.n, [(i, i + 1, w) for i, w in enumerate(self.weights, 1)])
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, AdjacentWeights) and self.weights == other.weights

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"AdjacentWeights({list(self.weights)})"


def is_decreasing(phi: AdjacentWeights) -> bool:
    w = phi.weights
    return all(w[i + 1] <= w[i] for i in range(len(w) - 1))


def is_increasing(phi: AdjacentWeights) -> bool:
    w = phi.weights
    return all(w[i + 1] >= w[i] for i in range(len(w) - 1))


def is_monotonic(phi: AdjacentWeights) -> bool:
    return is_decreasing(phi) or is_increasing(phi)


def segment_weight(phi: AdjacentWeights, k: int, l: int) -> float:
    """Sum of the adjacent-swap costs between ranks k and l."""
    n = phi.n
    if not (1 <= k <= n and 1 <= l <= n):
        raise IndexError(f"ranks must lie in 1..{n}, got {k}, {l}")
    lo, hi = (k, l) if k <= l else (l, k)
    return phi.prefix[hi - 1] - phi.prefix[lo - 1]


class TranspositionWeights:
    """Symmetric nonnegative cost matrix over all transpositions of ``[n]``.

    The diagonal is ignored (stored as 0). Entries may be ``inf``.
    """

    __slots__ = ("matrix", "__dict__")

    def __init__(self, matrix):
        m = np.array(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"weight matrix must be square, got shape {m.shape}")
        if np.isnan(m).any():
            raise ValueError("weight matrix contains NaN")
        np.fill_diagonal(m, 0.0)
        if (m < 0).any():
            raise ValueError("transposition weights must be >= 0")
        finite = np.isfinite(m)
        if not np.array_equal(finite, finite.T) or not np.allclose(
            m[finite], m.T[finite], atol=TOL, rtol=0
        ):
            raise ValueError("transposition weight matrix must be symmetric")
        m.setflags(write=False)
        self.matrix = m

    @classmethod
    def from_function(cls, n: int, f: Callable[[int, int], float]) -> TranspositionWeights:
        """Build from ``f(a, b)`` on 1-based candidates/positions, ``a < b``."""
        m = np.zeros((n, n))
        for a in range(1, n + 1):
            for b in range(a + 1, n + 1):
                m[a - 1, b - 1] = m[b - 1, a - 1] = f(a, b)
        return cls(m)

    @classmethod
    def from_pairs(cls, n: int, pairs: dict, default: float = INF) -> TranspositionWeights:
        """``pairs`` maps ``(a, b)`` (1-based) to a cost; unlisted pairs get ``default``."""
        m = np.full((n, n), float(default))
        for (a, b), w in pairs.items():
            m[a - 1, b - 1] = m[b - 1, a - 1] = w
        return cls(m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def key(self) -> tuple:
        return ("matrix", self.n, self.matrix.tobytes())

    def weight_of(self, t: Transposition) -> float:
        return float(self.matrix[t.a - 1, t.b - 1])

    def __call__(self, a: int, b: int) -> float:
        return float(self.matrix[a - 1, b - 1])

    @cached_property
    def shortest(self) -> np.ndarray:
        """All-pairs minimum path weights in the complete weight graph (Floyd-Warshall)."""
        d = self.matrix.copy()
        for k in range(self.n):
            d = np.minimum(d, d[:, k, None] + d[None, k, :])
        d.setflags(write=False)
        return d

    def __eq__(self, other) -> bool:
        return isinstance(other, TranspositionWeights) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"TranspositionWeights(n={self.n})"


@dataclass(frozen=True)
class DefiningTree:
    """Weighted spanning tree on vertices ``1..n``; edges are ``(u, v, weight)``."""

    n: int
    edges: tuple[tuple[int, int, float], ...]

    def __init__(self, n: int, edges: Iterable[Sequence]):
        es = tuple((int(u), int(v), float(w)) for u, v, w in edges)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "edges", es)
        if len(es) != n - 1:
            raise ValueError(f"a tree on {n} vertices has {n - 1} edges, got {len(es)}")
        parent = list(range(n + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v, w in es:
            if not (1 <= u <= n and 1 <= v <= n) or u == v:
                raise ValueError(f"bad tree edge ({u}, {v})")
            if not math.isfinite(w) or w < 0:
                raise ValueError(f"tree edge weights must be finite and >= 0, got {w}")
            ru, rv = find(u), find(v)
            if ru == rv:
                raise ValueError(f"edge ({u}, {v}) closes a cycle")
            parent[ru] = rv

    @classmethod
    def path(cls, order: Sequence[int], weights: Sequence[float] | None = None) -> DefiningTree:
        """Path visiting ``order``; unit edges unless ``weights`` is given."""
        order = list(order)
        if weights is None:
            weights = [1.0] * (len(order) - 1)
        return cls(len(order), [(order[i], order[i + 1], weights[i]) for i in range(len(order) - 1)])

    @classmethod
    def star(cls, n: int, center: int = 1, weight: float = 1.0) -> DefiningTree:
        return cls(n, [(center, v, weight) for v in range(1, n + 1) if v != center])

    def adjacency(self) -> dict[int, dict[int, float]]:
        adj: dict[int, dict[int, float]] = {v: {} for v in range(1, self.n + 1)}
        for u, v, w in self.edges:
            adj[u][v] = w
            adj[v][u] = w
        return adj

    def tree_path(self, a: int, b: int) -> list[int]:
        """Vertices on the unique tree path from a to b."""
        adj = self.adjacency()
        prev = {a: None}
        stack = [a]
        while stack:
            x = stack.pop()
            if x == b:
                break
            for y in adj[x]:
                if y not in prev:
                    prev[y] = x
                    stack.append(y)
        out = [b]
        while out[-1] != a:
            out.append(prev[out[-1]])
        return out[::-1]

    def path_weight(self, a: int, b: int) -> float:
        adj = self.adjacency()
        p = self.tree_path(a, b)
        return sum(adj[p[i]][p[i + 1]] for i in range(len(p) - 1))

    def degrees(self) -> dict[int, int]:
        deg = {v: 0 for v in range(1, self.n + 1)}
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    @property
    def is_path(self) -> bool:
        return self.n <= 2 or max(self.degrees().values()) <= 2


@dataclass(frozen=True)
class WeightedPath:
    vertices: tuple[int, ...]
    total_weight: float

    @property
    def finite(self) -> bool:
        return math.isfinite(self.total_weight)

    def __len__(self) -> int:
        return max(len(self.vertices) - 1, 0)


def _dijkstra(m: np.ndarray, source: int, cap: float = INF) -> list[float]:
    """Single-source distances over edges of weight <= cap (0-based, dense)."""
    n = m.shape[0]
    dist = [INF] * n
    dist[source] = 0.0
    heap = [(0.0, source)]
    done = [False] * n
    while heap:
        d, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        row = m[x]
        for y in range(n):
            w = row[y]
            if y == x or done[y] or w > cap + TOL or not math.isfinite(w):
                continue
            nd = d + w
            if nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return dist


def min_weight_path(phi: TranspositionWeights, a: int, b: int) -> WeightedPath:
    """Minimum-weight route from a to b in the weight graph.

    Among equally light routes the lexicographically smallest simple vertex
    sequence is returned. If b is unreachable the direct (infinite) edge is
    returned.
    """
    n = phi.n
    if a == b:
        raise ValueError("endpoints must differ")
    if not (1 <= a <= n and 1 <= b <= n):
        raise IndexError(f"vertices must lie in 1..{n}")
    m = phi.matrix
    to_b = _dijkstra(m, b - 1)
    if not math.isfinite(to_b[a - 1]):
        return WeightedPath((a, b), INF)

    # depth-first over tight edges in ascending vertex order gives the lexicographic minimum
    path = [a - 1]
    on_path = {a - 1}

    def extend(x: int) -> bool:
        if x == b - 1:
            return True
        for y in range(n):
            if y in on_path or not math.isfinite(m[x, y]):
                continue
            if abs(m[x, y] + to_b[y] - to_b[x]) <= TOL:
                path.append(y)
                on_path.add(y)
                if extend(y):
                    return True
                path.pop()
                on_path.discard(y)
        return False

    extend(a - 1)
    verts = tuple(v + 1 for v in path)
    total = sum(float(m[path[i], path[i + 1]]) for i in range(len(path) - 1))
    return WeightedPath(verts, total)


def is_metric(phi: TranspositionWeights) -> bool:
    """Triangle inequality on every triple, non-strict with the shared tolerance."""
    m = phi.matrix
    # m[a, b] <= m[a, c] + m[c, b] for all a, b, c
    via = m[:, :, None] + m.T[None, :, :]  # via[a, c, b] = m[a, c] + m[c, b]
    return bool((via.min(axis=1) + TOL >= m).all())


def from_metric_tree(tree: DefiningTree) -> TranspositionWeights:
    """Each pair costs the weight of its tree path."""
    n = tree.n
    adj = tree.adjacency()
    m = np.zeros((n, n))
    for s in range(1, n + 1):
        dist = {s: 0.0}
        stack = [s]
        while stack:
            x = stack.pop()
            for y, w in adj[x].items():
                if y not in dist:
                    dist[y] = dist[x] + w
                    stack.append(y)
        for t, d in dist.items():
            m[s - 1, t - 1] = d
    return TranspositionWeights(m)


def from_extended_tree(tree: DefiningTree) -> TranspositionWeights:
    """Tree edges keep their weight; every other swap is forbidden."""
    return TranspositionWeights.from_pairs(tree.n, {(u, v): w for u, v, w in tree.edges})


def metric_path_tree(phi: TranspositionWeights) -> DefiningTree | None:
    """Recover a defining path if ``phi`` is a metric-path weight function, else None.

    Coordinates are read off from one endpoint of a heaviest pair; the
    candidate line metric is then checked against every entry.
    """
    n = phi.n
    m = phi.matrix
    if n == 1:
        return DefiningTree(1, [])
    if not np.isfinite(m).all():
        return None
    u = int(np.unravel_index(np.argmax(m), m.shape)[0])
    x = m[u]
    if not np.allclose(np.abs(x[:, None] - x[None, :]), m, atol=TOL, rtol=0):
        return None
    order = sorted(range(n), key=lambda v: (x[v], v))
    return DefiningTree(
        n, [(order[i] + 1, order[i + 1] + 1, float(x[order[i + 1]] - x[order[i]])) for i in range(n - 1)]
    )


def finite_edge_tree(phi: TranspositionWeights) -> DefiningTree | None:
    """The defining tree if the finite off-diagonal entries of ``phi`` form a spanning tree."""
    n = phi.n
    m = phi.matrix
    edges = [(a + 1, b + 1, float(m[a, b])) for a in range(n) for b in range(a + 1, n) if math.isfinite(m[a, b])]
    try:
        return DefiningTree(n, edges)
    except ValueError:
        return None


def is_extended_path(phi: TranspositionWeights) -> bool:
    tree = finite_edge_tree(phi)
    if tree is None or not tree.is_path:
        return False
    # the finite entries must be exactly the tree edges
    return sum(1 for a in range(phi.n) for b in range(a + 1, phi.n) if math.isfinite(phi.matrix[a, b])) == phi.n - 1


def single_transposition_distance(phi: TranspositionWeights, a: int, b: int) -> float:
    """Cost of realising the single swap ``(a b)``.

    Minimises ``2 wt(p) - max edge of p`` over routes p from a to b: for every
    candidate maximum edge, shortest routes restricted to edges no heavier
    than it are joined through that edge.
    """
    n = phi.n
    if a == b:
        raise ValueError("endpoints must differ")
    if not (1 <= a <= n and 1 <= b <= n):
        raise IndexError(f"vertices must lie in 1..{n}")
    m = phi.matrix
    edges = [(float(m[u, v]), u, v) for u in range(n) for v in range(u + 1, n) if math.isfinite(m[u, v])]
    best = INF
    for cap in sorted({w for w, _, _ in edges}):
        da = _dijkstra(m, a - 1, cap)
        db = _dijkstra(m, b - 1, cap)
        for w, u, v in edges:
            if abs(w - cap) > TOL:
                continue
            route = min(da[u] + db[v], da[v] + db[u]) + w
            best = min(best, 2 * route - w)
    return best


def check_same_n(phi, n: int) -> None:
    if phi.n != n:
        raise DimensionError(f"weights are for n={phi.n}, rankings have n={n}")
