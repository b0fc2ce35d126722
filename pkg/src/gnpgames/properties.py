"""Exact graph-property decision procedures.

Everything here is a pure function of the input graph.  The deciders are
exact; the ones with exponential worst cases (Hamiltonicity, longest
path, boosters, expansion) are meant for desk-scale graphs and say so in
their docstrings.  ``ham_status`` additionally accepts a node budget and
may answer "unknown", which callers that only need a monotone win check
can treat as "not yet".

Rotation-extension search (``posa_explore``) is used as a certified
fast path: a cycle it returns is verified edge by edge, so a positive
answer is exact even though the search itself is heuristic.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .graphs import Edge, Graph, edge, external_neighborhood
from .rng import substream

__all__ = [
    "is_connected",
    "connected_components",
    "is_two_connected",
    "minimum_degree",
    "ham_status",
    "is_hamiltonian",
    "longest_path_length",
    "BoosterReport",
    "booster_set",
    "maximum_matching",
    "has_perfect_matching",
    "is_k_connected",
    "ExpanderWitness",
    "is_expander",
    "find_expansion_violation",
    "PosaResult",
    "posa_explore",
]

_PATH_DP_LIMIT = 18


# --- connectivity ------------------------------------------------------


def connected_components(g: Graph) -> list[set[int]]:
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        comp = {s}
        seen[s] = True
        stack = [s]
        while stack:
            v = stack.pop()
            for w in g.neighbors(v):
                if not seen[w]:
                    seen[w] = True
                    comp.add(w)
                    stack.append(w)
        comps.append(comp)
    return comps


def is_connected(g: Graph) -> bool:
    if g.n <= 1:
        return True
    return len(connected_components(g)) == 1


def is_two_connected(g: Graph) -> bool:
    """No articulation vertex and connected (n >= 3). Iterative Tarjan."""
    n = g.n
    if n < 3:
        return False
    num = [-1] * n
    low = [0] * n
    parent = [-1] * n
    counter = 0
    root_children = 0
    # single DFS from 0; disconnected graphs fail via unvisited check
    stack: list[tuple[int, int]] = [(0, 0)]
    num[0] = low[0] = counter
    counter += 1
    order = [0]
    it_state = {0: iter(g.neighbors(0))}
    while stack:
        v, _ = stack[-1]
        advanced = False
        for w in it_state[v]:
            if num[w] == -1:
                parent[w] = v
                num[w] = low[w] = counter
                counter += 1
                if v == 0:
                    root_children += 1
                stack.append((w, 0))
                order.append(w)
                it_state[w] = iter(g.neighbors(w))
                advanced = True
                break
            elif w != parent[v]:
                low[v] = min(low[v], num[w])
        if not advanced:
            stack.pop()
            if parent[v] != -1:
                p = parent[v]
                low[p] = min(low[p], low[v])
                if p != 0 and low[v] >= num[p]:
                    return False
    if counter != n:
        return False
    return root_children <= 1


def minimum_degree(g: Graph) -> int:
    if g.n == 0:
        return 0
    return min(g.degrees())


# --- rotation-extension search ----------------------------------------


@dataclass
class PosaResult:
    """Outcome of a rotation-extension run.

    ``cycle`` is a verified Hamilton cycle (vertex order) or None.
    ``best_path`` is the longest simple path encountered.
    ``endpoint_pairs`` are non-adjacent endpoint pairs of spanning paths
    seen during the search: adding any of them as an edge would close a
    Hamilton cycle, so they are certified boosters of the graph.
    """

    cycle: Optional[list[int]]
    best_path: list[int]
    endpoint_pairs: set[Edge]


def _verify_cycle(g: Graph, cyc: list[int]) -> bool:
    if len(cyc) != g.n or len(set(cyc)) != g.n:
        return False
    return all(g.has_edge(cyc[i], cyc[(i + 1) % g.n]) for i in range(g.n))


def _rotation_endpoints(g: Graph, path: list[int]) -> dict[int, list[int]]:
    """All endpoints reachable from ``path`` by rotation sequences that
    keep the start fixed, each with a concrete witness path."""
    seen = {path[-1]}
    out = {path[-1]: path}
    stack = [path]
    while stack:
        p = stack.pop()
        pos = {v: i for i, v in enumerate(p)}
        e = p[-1]
        for v in g.neighbors(e):
            i = pos.get(v)
            if i is None or i >= len(p) - 2:
                continue
            new_end = p[i + 1]
            if new_end in seen:
                continue
            np_ = p[: i + 1] + p[i + 1:][::-1]
            seen.add(new_end)
            out[new_end] = np_
            stack.append(np_)
    return out


def _closure_search(g: Graph, path: list[int], flips: int,
                    pairs: set[Edge]) -> tuple[list[int] | None, list[int]]:
    """Explore the rotation closure of a path with start flips.

    Returns (hamilton_cycle_or_None, some_path).  For spanning paths the
    non-adjacent endpoint pairs met on the way are recorded in ``pairs``
    (each certifies a cycle-closing edge).  For non-spanning paths the
    search instead hunts for a rotated endpoint with an unvisited
    neighbor and returns that extendable path.
    """
    spanning = len(path) == g.n
    cur = path
    used_starts: set[int] = set()
    for _ in range(max(1, flips)):
        s = cur[0]
        used_starts.add(s)
        reach = _rotation_endpoints(g, cur)
        if spanning:
            for e in sorted(reach):
                if g.has_edge(e, s):
                    return reach[e], reach[e]
                pairs.add(edge(s, e))
        else:
            in_path = set(cur)
            for e in sorted(reach):
                if any(w not in in_path for w in g.neighbors(e)):
                    return None, reach[e]
        cand = [e for e in sorted(reach) if e not in used_starts]
        if not cand:
            return None, cur
        cur = list(reversed(reach[cand[0]]))
    return None, cur


def posa_explore(g: Graph, seed: int = 0, restarts: int = 4,
                 steps: int | None = None, flips: int = 8) -> PosaResult:
    """Randomized rotation-extension search for long paths and a
    Hamilton cycle, with full rotation closures at stuck points.
    Deterministic given its arguments.  A returned cycle is verified
    edge by edge; endpoint pairs are certified boosters (each closes a
    Hamilton cycle of a spanning path)."""
    n = g.n
    rng = substream(seed, 0x90A5)
    best_path: list[int] = [0] if n else []
    pairs: set[Edge] = set()
    if n < 3:
        return PosaResult(None, best_path, pairs)
    if steps is None:
        steps = 40 * n
    for _ in range(max(1, restarts)):
        start = int(rng.integers(n))
        path = [start]
        in_path = [False] * n
        in_path[start] = True
        budget = steps
        while budget > 0:
            budget -= 1
            end = path[-1]
            ext = [w for w in g.neighbors(end) if not in_path[w]]
            if ext:
                w = ext[int(rng.integers(len(ext)))] if len(ext) > 1 else ext[0]
                in_path[w] = True
                path.append(w)
                continue
            if len(path) == n and g.has_edge(end, path[0]):
                if _verify_cycle(g, path):
                    return PosaResult(list(path), list(path), pairs)
            cyc, nxt = _closure_search(g, path, flips, pairs)
            if cyc is not None and _verify_cycle(g, cyc):
                return PosaResult(cyc, cyc, pairs)
            if nxt is path or nxt == path:
                break  # closure made no progress; restart
            path = nxt
            for v in range(n):
                in_path[v] = False
            for v in path:
                in_path[v] = True
            end = path[-1]
            if len(path) == n or not any(not in_path[w]
                                         for w in g.neighbors(end)):
                break  # nothing extendable came back; restart
        if len(path) > len(best_path):
            best_path = list(path)
    return PosaResult(None, best_path, pairs)


# --- Hamiltonicity ------------------------------------------------------


def _ham_backtrack(g: Graph, budget: int | None) -> bool | None:
    """Exact Hamilton-cycle search with degree/connectivity pruning.

    Returns True/False, or None if the node budget ran out first.
    """
    n = g.n
    adj = g.neighbor_masks()
    full = (1 << n) - 1
    degs = g.degrees()
    start = min(range(n), key=lambda v: degs[v])
    sbit = 1 << start
    nodes = [0]

    def dfs(cur: int, visited: int) -> bool | None:
        if budget is not None:
            nodes[0] += 1
            if nodes[0] > budget:
                return None
        unvisited = full & ~visited
        if unvisited == 0:
            return bool(adj[cur] & sbit)
        cbit = 1 << cur
        # every unvisited vertex still needs two usable neighbors
        avail = unvisited | cbit | sbit
        m = unvisited
        while m:
            wbit = m & -m
            m ^= wbit
            w = wbit.bit_length() - 1
            if (adj[w] & avail & ~wbit).bit_count() < 2:
                return False
        # unvisited + current endpoint must be one connected blob
        reach = cbit
        frontier = cbit
        target = unvisited | cbit
        while frontier:
            nxt = 0
            f = frontier
            while f:
                vbit = f & -f
                f ^= vbit
                nxt |= adj[vbit.bit_length() - 1]
            nxt &= target & ~reach
            if not nxt:
                break
            reach |= nxt
            frontier = nxt
        if reach != target:
            return False
        cands = [w for w in _bits(adj[cur] & unvisited)]
        cands.sort(key=lambda w: (adj[w] & avail).bit_count())
        saw_unknown = False
        for w in cands:
            r = dfs(w, visited | (1 << w))
            if r:
                return True
            if r is None:
                saw_unknown = True
        return None if saw_unknown else False

    return dfs(start, sbit)


def _bits(mask: int):
    while mask:
        b = mask & -mask
        mask ^= b
        yield b.bit_length() - 1


def ham_status(g: Graph, budget: int | None = None,
               posa_restarts: int = 4, posa_flips: int = 8) -> bool | None:
    """Hamiltonicity with an optional work budget.

    True and False are exact.  None means the exact search exceeded
    ``budget`` backtracking nodes (budget 0 skips it entirely and only
    rotation-certified cycles count); with ``budget=None`` the answer is
    always exact.
    """
    n = g.n
    if n < 3:
        return False
    if minimum_degree(g) < 2:
        return False
    if not is_two_connected(g):
        return False
    res = posa_explore(g, seed=0, restarts=posa_restarts, flips=posa_flips)
    if res.cycle is not None:
        return True
    if budget == 0:
        return None
    return _ham_backtrack(g, budget)


def is_hamiltonian(g: Graph) -> bool:
    """Exact Hamiltonicity by pruned backtracking (n < 3 is False).

    Intended for desk-scale graphs (roughly n <= 30, or larger when the
    graph is dense enough for the rotation fast path to certify a cycle).
    """
    return bool(ham_status(g, budget=None))


# --- longest paths and boosters ----------------------------------------


class _PathDP:
    """Subset DP over simple paths: for every (vertex set, endpoint) the
    bitmask of possible start vertices.  Exponential; n <= 18."""

    def __init__(self, g: Graph):
        if g.n > _PATH_DP_LIMIT:
            raise ValueError(f"exhaustive path search limited to n <= {_PATH_DP_LIMIT}")
        self.g = g
        n = g.n
        adj = g.neighbor_masks()
        states: dict[int, dict[int, int]] = {}
        for v in range(n):
            states[1 << v] = {v: 1 << v}
        for mask in range(1, 1 << n):
            ends = states.get(mask)
            if not ends:
                continue
            for v, starts in list(ends.items()):
                free = adj[v] & ~mask
                for w in _bits(free):
                    nm = mask | (1 << w)
                    d = states.get(nm)
                    if d is None:
                        states[nm] = {w: starts}
                    else:
                        d[w] = d.get(w, 0) | starts
        self.states = states
        self.full = (1 << n) - 1

    def longest_path_edges(self) -> int:
        best = 1
        for mask in self.states:
            c = mask.bit_count()
            if c > best:
                best = c
        return best - 1

    def hamilton_path_exists(self, u: int, v: int) -> bool:
        ends = self.states.get(self.full)
        if not ends:
            return False
        return bool(ends.get(v, 0) & (1 << u))

    def has_hamilton_cycle(self) -> bool:
        if self.g.n < 3:
            return False
        ends = self.states.get(self.full)
        if not ends:
            return False
        for (u, v) in self.g.edge_list:
            if ends.get(v, 0) & (1 << u):
                return True
        return False

    def masks_ending_at(self, v: int) -> list[int]:
        return [m for m, ends in self.states.items() if v in ends]

    def best_subpath_within(self, v: int) -> list[int]:
        """f[S] = size of the largest B subseteq S with a path spanning B
        ending at v (0 if none); table over all S by subset-max DP."""
        n = self.g.n
        f = [0] * (1 << n)
        for m in self.masks_ending_at(v):
            f[m] = m.bit_count()
        for i in range(n):
            bit = 1 << i
            for s in range(1 << n):
                if s & bit:
                    prev = f[s ^ bit]
                    if prev > f[s]:
                        f[s] = prev
        return f


def longest_path_length(g: Graph) -> int:
    """Exact maximum path length (in edges) by memoized subset search."""
    if g.n == 0:
        raise ValueError("empty graph has no paths")
    return _PathDP(g).longest_path_edges()


@dataclass(frozen=True)
class BoosterReport:
    longest_path_len: int
    is_hamiltonian: bool
    boosters: frozenset[Edge]


def booster_set(g: Graph) -> BoosterReport:
    """All non-edges uv such that g+uv is Hamiltonian or has a strictly
    longer maximum path.  Exact, exponential; n <= 18.

    For Hamiltonian input every non-edge qualifies (adding an edge keeps
    the Hamilton cycle), which the definition already implies.
    """
    dp = _PathDP(g)
    L = dp.longest_path_edges()
    ham = dp.has_hamilton_cycle()
    boosters: set[Edge] = set()
    non_edges = list(g.complement_non_edges())
    if ham:
        return BoosterReport(L, True, frozenset(non_edges))
    sos_cache: dict[int, list[int]] = {}
    masks_cache: dict[int, list[tuple[int, int]]] = {}

    def masks_desc(u: int) -> list[tuple[int, int]]:
        if u not in masks_cache:
            ms = [(m.bit_count(), m) for m in dp.masks_ending_at(u)]
            ms.sort(reverse=True)
            masks_cache[u] = ms
        return masks_cache[u]

    for (u, v) in non_edges:
        if g.n >= 3 and dp.hamilton_path_exists(u, v):
            boosters.add((u, v))
            continue
        if L >= g.n - 1:
            continue  # no room for a longer path
        need = L + 2
        if v not in sos_cache:
            sos_cache[v] = dp.best_subpath_within(v)
        fv = sos_cache[v]
        for sz, m in masks_desc(u):
            if sz + (g.n - sz) < need:
                break
            if sz + fv[dp.full ^ m] >= need:
                boosters.add((u, v))
                break
    return BoosterReport(L, ham, frozenset(boosters))


# --- matching -----------------------------------------------------------


def maximum_matching(g: Graph) -> list[Edge]:
    """Maximum cardinality matching in a general graph (blossom
    contraction, O(n^3))."""
    n = g.n
    match = [-1] * n
    p = [-1] * n
    base = list(range(n))

    def lca(a: int, b: int) -> int:
        used2 = [False] * n
        x = a
        while True:
            x = base[x]
            used2[x] = True
            if match[x] == -1:
                break
            x = p[match[x]]
        y = b
        while True:
            y = base[y]
            if used2[y]:
                return y
            y = p[match[y]]

    def find_path(root: int) -> bool:
        used = [False] * n
        for i in range(n):
            p[i] = -1
            base[i] = i
        used[root] = True
        q = deque([root])

        def mark_path(v: int, b: int, child: int, blossom: list[bool]) -> None:
            while base[v] != b:
                blossom[base[v]] = True
                blossom[base[match[v]]] = True
                p[v] = child
                child = match[v]
                v = p[match[v]]

        while q:
            v = q.popleft()
            for to in g.neighbors(v):
                if base[v] == base[to] or match[v] == to:
                    continue
                if to == root or (match[to] != -1 and p[match[to]] != -1):
                    cur = lca(v, to)
                    blossom = [False] * n
                    mark_path(v, cur, to, blossom)
                    mark_path(to, cur, v, blossom)
                    for i in range(n):
                        if blossom[base[i]]:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                q.append(i)
                elif p[to] == -1:
                    p[to] = v
                    if match[to] == -1:
                        u = to
                        while u != -1:
                            pv = p[u]
                            ppv = match[pv]
                            match[u] = pv
                            match[pv] = u
                            u = ppv
                        return True
                    else:
                        used[match[to]] = True
                        q.append(match[to])
        return False

    for v in range(n):
        if match[v] == -1 and g.degree(v) > 0:
            find_path(v)
    return [(u, match[u]) for u in range(n) if match[u] > u]


def has_perfect_matching(g: Graph) -> bool:
    """Matching of size floor(n/2) exists (odd n: all but one vertex)."""
    return len(maximum_matching(g)) >= g.n // 2


# --- vertex connectivity -------------------------------------------------


def _vertex_flow_at_least(g: Graph, s: int, t: int, k: int) -> bool:
    """At least k internally vertex-disjoint s-t paths (s,t non-adjacent).

    Unit vertex capacities via node splitting; BFS augmentation, early
    exit at k paths.
    """
    n = g.n
    # nodes: 2v = in, 2v+1 = out; cap[in->out]=1; edges out->in cap 1
    cap: dict[tuple[int, int], int] = {}
    for v in range(n):
        cap[(2 * v, 2 * v + 1)] = 1 if v not in (s, t) else k
    for (u, v) in g.edge_list:
        cap[(2 * u + 1, 2 * v)] = 1
        cap[(2 * v + 1, 2 * u)] = 1
    adj: dict[int, list[int]] = {}
    for (a, b) in list(cap):
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
        cap.setdefault((b, a), 0)
    src, snk = 2 * s + 1, 2 * t
    flow = 0
    while flow < k:
        prev = {src: -1}
        dq = deque([src])
        while dq and snk not in prev:
            x = dq.popleft()
            for y in adj.get(x, ()):
                if y not in prev and cap[(x, y)] > 0:
                    prev[y] = x
                    dq.append(y)
        if snk not in prev:
            return False
        y = snk
        while y != src:
            x = prev[y]
            cap[(x, y)] -= 1
            cap[(y, x)] += 1
            y = x
        flow += 1
    return True


def is_k_connected(g: Graph, k: int) -> bool:
    """Exact k-vertex-connectivity: n > k and no vertex cut below k,
    checked by vertex-disjoint-path computations over non-adjacent pairs."""
    if k < 1:
        raise ValueError("k must be >= 1")
    n = g.n
    if n <= k:
        return False
    if k == 1:
        return is_connected(g)
    if minimum_degree(g) < k:
        return False
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)
             if not g.has_edge(u, v)]
    if not pairs:
        return True  # complete graph, connectivity n-1 >= k
    return all(_vertex_flow_at_least(g, u, v, k) for (u, v) in pairs)


# --- expansion -----------------------------------------------------------


@dataclass(frozen=True)
class ExpanderWitness:
    holds: bool
    violating_set: Optional[frozenset[int]]
    R: int
    c: float


def is_expander(g: Graph, R: int, c: float) -> ExpanderWitness:
    """Exhaustively checks |N(U)| >= c|U| over all U with 1 <= |U| <= R.

    Exponential in R; meant for R <= ~12 or n <= ~25.  On failure the
    witness set is returned (re-checkable via external_neighborhood).
    """
    if R < 1:
        raise ValueError("R must be >= 1")
    if c <= 0:
        raise ValueError("c must be > 0")
    if R > g.n:
        raise ValueError(f"R={R} exceeds vertex count {g.n}")
    masks = g.neighbor_masks()
    n = g.n

    witness: list[int] | None = None

    def search(start: int, chosen: list[int], umask: int, nbmask: int) -> bool:
        size = len(chosen)
        if size >= 1 and (nbmask & ~umask).bit_count() < c * size:
            nonlocal witness
            witness = list(chosen)
            return True
        if size == R:
            return False
        for v in range(start, n):
            if search(v + 1, chosen + [v], umask | (1 << v), nbmask | masks[v]):
                return True
        return False

    found = search(0, [], 0, 0)
    if found and witness is not None:
        return ExpanderWitness(False, frozenset(witness), R, c)
    return ExpanderWitness(True, None, R, c)


def find_expansion_violation(g: Graph, R: int, c: float,
                             seed: int = 0, tries: int = 32
                             ) -> Optional[frozenset[int]]:
    """Heuristic search for a violating set at sizes exhaustive checking
    cannot reach: exhaustive for |U| <= 2, then greedy deficit-driven
    growth from low-degree seeds.  May miss violations; any set returned
    is a real one.
    """
    n = g.n
    masks = g.neighbor_masks()
    degs = g.degrees()
    for v in range(n):
        if degs[v] < c:
            return frozenset([v])
    if R >= 2:
        for u in range(n):
            for v in range(u + 1, n):
                um = (1 << u) | (1 << v)
                if ((masks[u] | masks[v]) & ~um).bit_count() < 2 * c:
                    return frozenset([u, v])
    if R < 3:
        return None
    rng = substream(seed, 0xE7)
    order = sorted(range(n), key=lambda v: degs[v])
    seeds = order[: min(n, tries)]
    for s in seeds:
        u = [s]
        umask = 1 << s
        nb = masks[s]
        while len(u) < R:
            # candidate growth: vertices in N(U) (they remove themselves
            # from the neighborhood) plus a few random others
            cands = list(_bits(nb & ~umask))
            if not cands:
                cands = [v for v in range(n) if not (umask >> v) & 1]
            if not cands:
                break
            best_v, best_score = -1, None
            for v in cands:
                nn = (nb | masks[v]) & ~(umask | (1 << v))
                score = nn.bit_count() - c * (len(u) + 1)
                if best_score is None or score < best_score:
                    best_v, best_score = v, score
            u.append(best_v)
            umask |= 1 << best_v
            nb |= masks[best_v]
            if (nb & ~umask).bit_count() < c * len(u):
                return frozenset(u)
        rng.shuffle(seeds)
    return None
