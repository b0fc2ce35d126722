"""Immutable simple graphs on vertices 0..n-1 and seeded G(n,p) sampling.

The graph board of every game in this package is an instance of
:class:`Graph`.  Vertices are dense integer ids; edges are unordered pairs
stored canonically as ``(u, v)`` with ``u < v``.  A graph is immutable
after construction and safe to share across concurrent workers.

Set primitives follow the usual conventions: for vertex sets U, W
(disjoint for the cross count) and a vertex v,

* ``external_neighborhood(g, U)`` is {x not in U : some u in U with ux an edge},
* ``edges_within(g, U)`` counts edges with both endpoints in U,
* ``edges_between(g, U, W)`` counts edges with one endpoint in each,
* ``edges_from_vertex(g, v, U)`` counts edges from v into U.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .rng import pair_uniforms

__all__ = [
    "Edge",
    "edge",
    "Graph",
    "GnpParams",
    "sample_gnp",
    "external_neighborhood",
    "edges_within",
    "edges_between",
    "edges_from_vertex",
    "graph_to_text",
    "graph_from_text",
    "complete_graph",
    "cycle_graph",
    "path_graph",
    "complete_bipartite_graph",
    "empty_graph",
]

Edge = tuple[int, int]


def edge(u: int, v: int) -> Edge:
    """Canonical form of the undirected edge {u, v}: sorted, no loops."""
    if u == v:
        raise ValueError(f"loop edge ({u},{v}) not allowed")
    if u < 0 or v < 0:
        raise ValueError(f"negative vertex id in ({u},{v})")
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable undirected simple graph on vertices ``0..n-1``.

    Provides, beyond the edge set itself: sorted neighbor lists, O(1)
    edge membership, per-vertex incident edge-id lists (edge ids index
    the sorted edge list), and cached neighborhood bitmasks for the
    set-expansion checkers.
    """

    __slots__ = ("n", "edge_list", "edge_index", "_adj", "_adjset",
                 "incident", "_masks")

    def __init__(self, n: int, edges: Iterable[Edge]):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        canon = sorted({edge(u, v) for (u, v) in edges})
        for (u, v) in canon:
            if v >= n:
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
        self.n = n
        self.edge_list: tuple[Edge, ...] = tuple(canon)
        self.edge_index: dict[Edge, int] = {e: i for i, e in enumerate(canon)}
        adj: list[list[int]] = [[] for _ in range(n)]
        inc: list[list[int]] = [[] for _ in range(n)]
        for i, (u, v) in enumerate(canon):
            adj[u].append(v)
            adj[v].append(u)
            inc[u].append(i)
            inc[v].append(i)
        self._adj = tuple(tuple(sorted(a)) for a in adj)
        self._adjset = tuple(frozenset(a) for a in adj)
        self.incident = tuple(tuple(i) for i in inc)
        self._masks: tuple[int, ...] | None = None

    # --- basic views -------------------------------------------------

    @property
    def edges(self) -> frozenset[Edge]:
        return frozenset(self.edge_list)

    @property
    def num_edges(self) -> int:
        return len(self.edge_list)

    def vertices(self) -> range:
        return range(self.n)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adjset[u] if 0 <= u < self.n else False

    def neighbor_masks(self) -> tuple[int, ...]:
        """Per-vertex adjacency as bit masks (bit j set iff j adjacent)."""
        if self._masks is None:
            masks = [0] * self.n
            for (u, v) in self.edge_list:
                masks[u] |= 1 << v
                masks[v] |= 1 << u
            self._masks = tuple(masks)
        return self._masks

    # --- derived graphs ----------------------------------------------

    def with_edge(self, u: int, v: int) -> "Graph":
        return Graph(self.n, self.edge_list + (edge(u, v),))

    def subgraph_of_edges(self, edges: Iterable[Edge]) -> "Graph":
        return Graph(self.n, edges)

    def complement_non_edges(self) -> Iterator[Edge]:
        for u in range(self.n):
            for v in range(u + 1, self.n):
                if v not in self._adjset[u]:
                    yield (u, v)

    # --- equality ----------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Graph) and self.n == other.n
                and self.edge_list == other.edge_list)

    def __hash__(self) -> int:
        return hash((self.n, self.edge_list))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"


@dataclass(frozen=True)
class GnpParams:
    """Parameters of a seeded G(n,p) sample.

    The scale unit ``f = n*p / ln(n)`` is recomputed on access (defined
    for n >= 2 only); it is the natural yardstick for critical biases.
    """

    n: int
    p: float
    seed: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"p={self.p} outside [0, 1]")

    @property
    def f(self) -> float:
        if self.n < 2:
            raise ValueError("f(n) requires n >= 2")
        return self.n * self.p / math.log(self.n)


def sample_gnp(params: GnpParams) -> Graph:
    """Sample G(n,p): each of the C(n,2) pairs is an edge independently
    with probability p, driven solely by the seed.

    Pair i in lexicographic order consumes draw i of the seed's Philox
    stream, so the result is bit-reproducible and independent of
    evaluation order.
    """
    n = params.n
    m = n * (n - 1) // 2
    u = pair_uniforms(params.seed, m)
    keep = np.flatnonzero(u < params.p)
    if keep.size:
        rows, cols = np.triu_indices(n, k=1)
        pairs = zip(rows[keep].tolist(), cols[keep].tolist())
    else:
        pairs = ()
    return Graph(n, pairs)


# --- set / neighborhood / edge-count primitives ----------------------


def _check_vertices(g: Graph, U: Iterable[int]) -> set[int]:
    s = set(U)
    for v in s:
        if not (0 <= v < g.n):
            raise ValueError(f"vertex {v} out of range for n={g.n}")
    return s


def external_neighborhood(g: Graph, U: Iterable[int]) -> set[int]:
    """{v outside U adjacent to some vertex of U}; disjoint from U."""
    s = _check_vertices(g, U)
    out: set[int] = set()
    for u in s:
        out.update(g.neighbors(u))
    return out - s


def edges_within(g: Graph, U: Iterable[int]) -> int:
    s = _check_vertices(g, U)
    return sum(1 for u in s for v in g.neighbors(u) if v > u and v in s)


def edges_between(g: Graph, U: Iterable[int], W: Iterable[int]) -> int:
    su, sw = _check_vertices(g, U), _check_vertices(g, W)
    if su & sw:
        raise ValueError("U and W must be disjoint for the cross count")
    if len(sw) < len(su):
        su, sw = sw, su
    return sum(1 for u in su for v in g.neighbors(u) if v in sw)


def edges_from_vertex(g: Graph, v: int, U: Iterable[int]) -> int:
    s = _check_vertices(g, U)
    if not (0 <= v < g.n):
        raise ValueError(f"vertex {v} out of range")
    return sum(1 for w in g.neighbors(v) if w in s)


# --- serialization ----------------------------------------------------


def graph_to_text(g: Graph) -> str:
    """Line format: header ``n <count>``, then one sorted ``u v`` per line."""
    lines = [f"n {g.n}"]
    lines.extend(f"{u} {v}" for (u, v) in g.edge_list)
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> Graph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("n "):
        raise ValueError("graph text must start with a 'n <count>' header")
    n = int(lines[0].split()[1])
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line: {ln!r}")
        edges.append(edge(int(parts[0]), int(parts[1])))
    return Graph(n, edges)


# --- small constructors (test boards and CLI conveniences) ------------


def empty_graph(n: int) -> Graph:
    return Graph(n, ())


def complete_graph(n: int) -> Graph:
    return Graph(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph(n, ((i, (i + 1) % n) for i in range(n)))


def path_graph(n: int) -> Graph:
    return Graph(n, ((i, i + 1) for i in range(n - 1)))


def complete_bipartite_graph(a: int, b: int) -> Graph:
    return Graph(a + b, ((i, a + j) for i in range(a) for j in range(b)))
