"""Connected simple graphs on labeled vertices 1..n."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

MAX_N = 6


@dataclass(frozen=True)
class LabeledGraph:
    n: int
    edges: tuple[tuple[int, int], ...]  # sorted pairs (i, j), i < j, 1-based

    def degree(self, v: int) -> int:
        return sum(v in e for e in self.edges)

    @property
    def betti(self) -> int:
        """First Betti number |E| - n + 1 (connected graphs)."""
        return len(self.edges) - self.n + 1


def _slots(n: int) -> list[tuple[int, int]]:
    return list(combinations(range(1, n + 1), 2))


def _connected(n: int, edges) -> bool:
    parent = list(range(n + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in edges:
        parent[find(i)] = find(j)
    root = find(1)
    return all(find(v) == root for v in range(2, n + 1))


@lru_cache(maxsize=None)
def enumerate_connected(n: int) -> tuple[LabeledGraph, ...]:
    """All connected simple graphs on n labeled vertices, by ascending edge bitmask."""
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be in 1..{MAX_N}")
    slots = _slots(n)
    out = []
    for mask in range(1 << len(slots)):
        edges = tuple(s for b, s in enumerate(slots) if mask >> b & 1)
        if _connected(n, edges):
            out.append(LabeledGraph(n, edges))
    return tuple(out)


def classify(g: LabeledGraph) -> tuple[tuple[int, ...], tuple[tuple[int, int], ...]]:
    """(internal vertices, leaf edges).

    Internal vertices have degree >= 2 (the lone vertex when n = 1); a leaf
    edge has exactly one endpoint of degree 1.
    """
    deg = {v: g.degree(v) for v in range(1, g.n + 1)}
    if g.n == 1:
        return (1,), ()
    internal = tuple(v for v in range(1, g.n + 1) if deg[v] >= 2)
    leaf_edges = tuple(e for e in g.edges if (deg[e[0]] == 1) != (deg[e[1]] == 1))
    return internal, leaf_edges
