"""Executable game strategies for the random-board edge games.

Builder side (Maker):

* :class:`MinDegreeBuilder` pushes every vertex to a target claimed
  degree, always playing at the vertex with the highest danger value
  ``d_opponent(v) - 2 * b * d_own(v)`` and picking a uniformly random
  free edge there.
* :class:`HamiltonicityPipeline` runs the degree builder, then repairs
  vertex expansion of its claimed graph, then claims cycle-closing
  edges until the claimed graph is Hamiltonian (or k-connected in the
  k-connectivity variant).

Blocking side (Breaker):

* :class:`BreakerIsolator` grows a claimed-clique of untouched vertices
  and then plays the box game on their free stars, trying to swallow a
  whole star and isolate its center.

Avoiding / forcing sides:

* :class:`AvoiderIsolator` picks a sparse vertex set U up front, dumps
  every edge away from U in one huge first move, then defends the
  triplet stars of U so that some vertex of U never enters his graph.
* :class:`EnforcerForcer` builds the expansion-and-cross-edge target
  family and avoids completing any of its sets himself, which forces
  the opponent's final graph to hit all of them.

Asymptotic constants behind stage sizes are exposed as explicit
constructor parameters with finite-size defaults; harness records carry
the values used.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .engine import (
    BoardState,
    Convention,
    GameSpec,
    MovePolicy,
    Role,
    Strategy,
    StrategyForfeit,
    minimal_claim_size,
)
from .graphs import Edge, Graph
from .hypergraphs import AvoiderPotential, Hypergraph
from .properties import (
    booster_set,
    find_expansion_violation,
    is_expander,
    posa_explore,
)

__all__ = [
    "RandomClaimer",
    "DangerView",
    "danger_trace",
    "MinDegreeBuilder",
    "BreakerIsolator",
    "HamiltonicityPipeline",
    "AvoiderIsolator",
    "ForcerFamily",
    "build_forcer_family",
    "EnforcerForcer",
    "default_isolator_c_size",
    "default_sparse_set_size",
]


class RandomClaimer(Strategy):
    """Uniformly random minimal-size claims; the baseline opponent."""

    name = "random"

    def new_policy(self, spec, g, role, rng):
        class P(MovePolicy):
            def choose(self, state: BoardState) -> Sequence[int]:
                k = minimal_claim_size(spec, role, state.free_count)
                free = state.free_edge_ids()
                return rng.choice(free, size=k, replace=False).tolist()

        return P()


# --- danger diagnostics ---------------------------------------------------


@dataclass
class DangerView:
    danger: np.ndarray
    dangerous: np.ndarray
    b: int
    c: int

    def avdan(self, X) -> float:
        idx = sorted(X)
        if not idx:
            raise ValueError("average danger over an empty set")
        return float(self.danger[idx].mean())


def danger_trace(state: BoardState, b: int, c: int) -> DangerView:
    """Per-vertex danger values for the building side, for diagnostics."""
    if state.spec.convention is not Convention.MAKER_BREAKER:
        raise ValueError("danger values are defined for the Maker-Breaker convention")
    danger = state.d_b - 2 * b * state.d_a
    return DangerView(danger=danger, dangerous=state.d_a < c, b=b, c=c)


# --- builder: minimum degree ----------------------------------------------


class MinDegreeBuilder(Strategy):
    """Claim a random free edge at the most endangered uncovered vertex
    until every vertex has claimed degree >= c; then defer to a
    continuation (random claims by default).

    Forfeits exactly when an uncovered vertex has no free edge left,
    which is the opponent's winning condition in the degree game.
    """

    def __init__(self, c: int, continuation: Optional[Strategy] = None):
        if c < 1:
            raise ValueError("target degree must be >= 1")
        self.c = c
        self.continuation = continuation or RandomClaimer()
        self.name = "degree-builder"

    @property
    def params(self) -> dict:
        return {"c": self.c, "continuation": self.continuation.describe()}

    def new_policy(self, spec, g, role, rng):
        cont = self.continuation.new_policy(spec, g, role, rng)
        c = self.c

        class P(MovePolicy):
            def choose(self, state: BoardState) -> Sequence[int]:
                if int(state.d_a.min()) >= c:
                    return cont.choose(state)
                k = minimal_claim_size(spec, role, state.free_count)
                return _danger_claims(state, spec, rng, c, k)

        return P()


def _danger_claims(state: BoardState, spec: GameSpec,
                   rng: np.random.Generator, c: int, k: int) -> list[int]:
    """k claims by the max-danger rule, updating degrees within the turn."""
    d_a = state.d_a.copy()
    danger = (state.d_b - 2 * spec.bias_b * d_a).astype(float)
    own = state.own
    picked: list[int] = []
    picked_set: set[int] = set()
    for _ in range(k):
        masked = np.where(d_a < c, danger, -np.inf)
        if not np.isfinite(masked.max()):
            # everything covered mid-turn: pad with a random free edge
            free = [i for i in state.free_edge_ids() if i not in picked_set]
            picked.append(int(free[int(rng.integers(len(free)))]))
            picked_set.add(picked[-1])
            continue
        v = int(masked.argmax())
        options = [i for i in state.g.incident[v]
                   if own[i] == 0 and i not in picked_set]
        if not options:
            raise StrategyForfeit(f"uncovered vertex {v} has no free edge")
        e = int(options[int(rng.integers(len(options)))])
        picked.append(e)
        picked_set.add(e)
        u, w = state.g.edge_list[e]
        d_a[u] += 1
        d_a[w] += 1
        danger[u] -= 2 * spec.bias_b
        danger[w] -= 2 * spec.bias_b
    return picked


# --- blocker: star isolator -------------------------------------------------


def default_isolator_c_size(n: int) -> int:
    """Finite-size stand-in for the n / ln^2 n clique-size target."""
    if n < 2:
        return 1
    return max(4, int(n / math.log(n) ** 2))


class BreakerIsolator(Strategy):
    """Two stages: grow a set C of vertices untouched by the opponent
    whose internal board edges are all ours, then race to claim one
    whole free star A_v, v in C, isolating v in the opponent's graph.

    ``eps`` caps the board degree of vertices admitted to C at
    (1 + eps/2) times the mean degree.  Forfeits when stage one cannot
    add two fresh vertices within one move's bias, which small boards
    routinely trigger (recorded, expected at desk scale).
    """

    def __init__(self, c_size: Optional[int] = None, eps: float = 0.5):
        self.c_size = c_size
        self.eps = eps
        self.name = "star-isolator"

    @property
    def params(self) -> dict:
        return {"c_size": self.c_size if self.c_size is not None else "auto",
                "eps": self.eps}

    def new_policy(self, spec, g, role, rng):
        if spec.convention is not Convention.MAKER_BREAKER:
            raise ValueError("the star isolator plays the Maker-Breaker convention")
        target_size = self.c_size if self.c_size is not None \
            else default_isolator_c_size(g.n)
        mean_deg = 2 * g.num_edges / g.n if g.n else 0.0
        deg_cap = (1 + self.eps / 2) * mean_deg
        degs = g.degrees()
        outer = self

        class P(MovePolicy):
            def __init__(self):
                self.C: set[int] = set()
                self.stage = 1
                self.boxes: dict[int, list[int]] = {}
                self.snapshots: list[tuple[int, frozenset[int]]] = []

            def _evict(self, state: BoardState) -> None:
                gone = [v for v in self.C if state.d_a[v] > 0]
                for v in gone:
                    self.C.discard(v)
                    self.boxes.pop(v, None)

            def _free_into_c(self, state: BoardState, v: int,
                             extra: set[int]) -> list[int]:
                ids = []
                for i in state.g.incident[v]:
                    if state.own[i] != 0:
                        continue
                    a, b2 = state.g.edge_list[i]
                    other = b2 if a == v else a
                    if other in self.C or other in extra:
                        ids.append(i)
                return ids

            def _stage1(self, state: BoardState, k: int) -> list[int]:
                cands = [v for v in range(g.n)
                         if v not in self.C and state.d_a[v] == 0
                         and degs[v] <= deg_cap]
                cands.sort(key=lambda v: (len(self._free_into_c(state, v, set())), v))
                for u, w in itertools.combinations(cands[:12], 2):
                    claim = dict.fromkeys(
                        self._free_into_c(state, u, {w})
                        + self._free_into_c(state, w, set()))
                    claim = list(claim)
                    if len(claim) <= k:
                        self.C.update((u, w))
                        return claim
                raise StrategyForfeit("no admissible vertex pair fits the bias")

            def _box_claims(self, state: BoardState, k: int) -> list[int]:
                rem = {}
                for v in self.C:
                    free = [i for i in self.boxes.get(v, ())
                            if state.own[i] == 0]
                    if free and state.d_a[v] == 0:
                        rem[v] = free
                picks: list[int] = []
                while len(picks) < k and rem:
                    finishable = [v for v, ids in rem.items() if
                                  len(ids) <= k - len(picks)]
                    if finishable:
                        v = min(finishable, key=lambda v: (len(rem[v]), v))
                    else:
                        v = max(rem, key=lambda v: (len(rem[v]), -v))
                    picks.append(rem[v].pop(0))
                    if not rem[v]:
                        del rem[v]
                return picks

            def choose(self, state: BoardState) -> Sequence[int]:
                self._evict(state)
                k = minimal_claim_size(spec, role, state.free_count)
                if self.stage == 1 and len(self.C) >= target_size:
                    self.stage = 2
                    self.boxes = {v: list(state.free_edges_at(v))
                                  for v in self.C}
                claim = (self._stage1(state, k) if self.stage == 1
                         else self._box_claims(state, k))
                claim = _pad_claims(state, claim, k)
                self.snapshots.append((state.move_no, frozenset(self.C)))
                return claim

        return P()


def _pad_claims(state: BoardState, claim: list[int], k: int) -> list[int]:
    if len(claim) >= k:
        return claim[:k]
    have = set(claim)
    for i in state.free_edge_ids():
        if len(claim) >= k:
            break
        if int(i) not in have:
            claim.append(int(i))
            have.add(int(i))
    return claim


# --- builder: expander and cycle pipeline -----------------------------------


class HamiltonicityPipeline(Strategy):
    """Degree building, expansion repair, then cycle closing.

    Stage one runs the danger-driven degree builder with random edge
    choice up to degree ``stage1_degree``.  Stage two finds vertex sets
    of the claimed graph with poor expansion (exact checker up to
    ``exact_limit`` vertices, greedy search beyond) and claims boundary
    edges that add fresh external neighbors, first at radius ``r1``,
    then up to ``r2``.  Stage three claims free edges whose addition
    provably lengthens or closes a longest path of the claimed graph
    (exact booster sets at small n, rotation-derived candidates beyond)
    until the claimed graph is Hamiltonian.

    With ``connectivity_k`` set the pipeline targets a k-vertex-connected
    claimed graph instead: expansion constant k, radius targets sized so
    that R * k >= (n + k) / 2, and no cycle-closing stage.
    """

    def __init__(self, stage1_degree: Optional[int] = None,
                 r1: Optional[int] = None, r2: Optional[int] = None,
                 connectivity_k: Optional[int] = None,
                 exact_limit: int = 25, booster_exact_limit: int = 14):
        self.stage1_degree = stage1_degree
        self.r1 = r1
        self.r2 = r2
        self.connectivity_k = connectivity_k
        self.exact_limit = exact_limit
        self.booster_exact_limit = booster_exact_limit
        self.name = ("hamiltonian-builder" if connectivity_k is None
                     else "k-connected-builder")

    @property
    def params(self) -> dict:
        return {"stage1_degree": self.stage1_degree or "auto",
                "r1": self.r1 or "auto", "r2": self.r2 or "auto",
                "connectivity_k": self.connectivity_k or 0,
                "exact_limit": self.exact_limit,
                "booster_exact_limit": self.booster_exact_limit}

    def new_policy(self, spec, g, role, rng):
        n = g.n
        expansion = float(self.connectivity_k or 2)
        c1 = self.stage1_degree or max(int(self.connectivity_k or 0) + 1,
                                       math.ceil(math.log(max(n, 3))))
        r1 = self.r1 or max(2, round(n / 25))
        if self.r2 is not None:
            r2 = self.r2
        elif self.connectivity_k is None:
            r2 = max(r1, math.ceil(n / 5))
        else:
            r2 = max(r1, math.ceil((n + self.connectivity_k)
                                   / (2 * self.connectivity_k)))
        exact = n <= self.exact_limit
        outer = self

        class P(MovePolicy):
            def __init__(self):
                self.stage = 1
                self.candidates: list[int] = []

            def _violation(self, ga: Graph, radius: int):
                if exact:
                    w = is_expander(ga, min(radius, ga.n), expansion)
                    return None if w.holds else w.violating_set
                return find_expansion_violation(
                    ga, min(radius, ga.n), expansion,
                    seed=int(rng.integers(2**62)))

            def _repair(self, state: BoardState, U, k: int) -> list[int] | None:
                """Boundary claims growing the claimed neighborhood of U;
                None when U has no free incident edge at all (the
                expansion target is dead, the pipeline moves on)."""
                nbhd = set()
                for u in U:
                    for i in state.g.incident[u]:
                        if state.own[i] == 1:
                            a, b2 = state.g.edge_list[i]
                            nbhd.add(b2 if a == u else a)
                fresh, fallback = [], []
                for u in sorted(U):
                    for i in state.g.incident[u]:
                        if state.own[i] != 0:
                            continue
                        a, b2 = state.g.edge_list[i]
                        other = b2 if a == u else a
                        if other in U:
                            fallback.append(i)
                        elif other not in nbhd:
                            fresh.append(i)
                        else:
                            fallback.append(i)
                picks = list(dict.fromkeys(fresh + fallback))[:k]
                return picks or None

            def _boosters(self, state: BoardState, ga: Graph, k: int) -> list[int]:
                free_pairs = None
                for attempt in range(3):
                    cands = [i for i in self.candidates if state.own[i] == 0]
                    if cands:
                        self.candidates = cands
                        return cands[:k]
                    if n <= outer.booster_exact_limit:
                        rep = booster_set(ga)
                        if rep.is_hamiltonian:
                            return []
                        free_pairs = rep.boosters
                    else:
                        res = posa_explore(ga, seed=int(rng.integers(2**62)),
                                           restarts=6)
                        if res.cycle is not None:
                            return []
                        free_pairs = res.endpoint_pairs
                    idx = state.g.edge_index
                    self.candidates = sorted(
                        idx[e] for e in free_pairs
                        if e in idx and state.own[idx[e]] == 0)
                    if self.candidates:
                        continue
                    if n <= outer.booster_exact_limit:
                        raise StrategyForfeit("no free booster available")
                    break
                return []

            def choose(self, state: BoardState) -> Sequence[int]:
                k = minimal_claim_size(spec, role, state.free_count)
                if self.stage == 1:
                    if int(state.d_a.min()) < c1:
                        try:
                            return _danger_claims(state, spec, rng, c1, k)
                        except StrategyForfeit:
                            # the degree target is dead; the game may
                            # still be winnable if no vertex is starved
                            # below the expansion constant
                            floor = max(2, int(expansion))
                            starved = (state.d_a + state.d_f) < floor
                            if bool(starved.any()):
                                raise
                    self.stage = 2
                while self.stage in (2, 3):
                    radius = r1 if self.stage == 2 else r2
                    ga = state.graph_of("a")
                    U = self._violation(ga, radius)
                    if U is not None:
                        picks = self._repair(state, U, k)
                        if picks is not None:
                            return _pad_claims(state, picks, k)
                    self.stage += 1
                if self.stage == 4 and outer.connectivity_k is None:
                    ga = state.graph_of("a")
                    picks = self._boosters(state, ga, k)
                    if picks:
                        return _pad_claims(state, picks, k)
                # target reached as far as this policy can tell: keep
                # claiming useful material (random free edges)
                free = state.free_edge_ids()
                pick = rng.choice(free, size=k, replace=False)
                return [int(i) for i in pick]

        return P()


# --- avoider: sparse-set isolator -------------------------------------------


def default_sparse_set_size(n: int) -> int:
    """Finite-size stand-in for the sqrt(n / ln n) sparse-set size,
    trimmed to a multiple of three."""
    if n < 3:
        return 0
    raw = math.isqrt(max(1, round(n / math.log(n))))
    return max(3, 3 * (raw // 3))


class AvoiderIsolator(Strategy):
    """Keep a sparse set U out of the claimed graph.

    Before moving, pick U greedily from the lowest-degree vertices
    (random retries if the greedy set is too dense); the first move
    claims every free edge not touching U; afterwards spend the minimal
    claim inside the triplet stars of U, always in the star farthest
    from being swallowed by the opponent, and enter U itself only when
    nothing else is free.
    """

    def __init__(self, u_size: Optional[int] = None, retries: int = 100,
                 density_slack: float = 1.0):
        self.u_size = u_size
        self.retries = retries
        self.density_slack = density_slack
        self.name = "sparse-set-avoider"

    @property
    def params(self) -> dict:
        return {"u_size": self.u_size if self.u_size is not None else "auto",
                "retries": self.retries}

    def new_policy(self, spec, g, role, rng):
        if spec.convention is not Convention.AVOIDER_ENFORCER:
            raise ValueError("the sparse-set avoider plays the monotone convention")
        size = self.u_size if self.u_size is not None \
            else default_sparse_set_size(g.n)
        outer = self

        class P(MovePolicy):
            def __init__(self):
                self.U: Optional[list[int]] = None
                self.triplets: list[tuple[int, ...]] = []
                self.boxes: list[list[int]] = []

            def _pick_u(self, state: BoardState) -> list[int]:
                n = g.n
                if size < 3 or size > n:
                    raise StrategyForfeit("board too small for a sparse set")
                p_hat = g.num_edges / (n * (n - 1) / 2) if n > 1 else 0.0
                cap = outer.density_slack * n * p_hat / (2 * math.log(n)) \
                    if n > 2 else 0.0
                degs = g.degrees()
                by_degree = sorted(range(n), key=lambda v: (degs[v], v))
                cand = by_degree[:size]
                if _edges_inside(g, cand) <= cap:
                    return cand
                for _ in range(outer.retries):
                    cand = rng.choice(n, size=size, replace=False).tolist()
                    if _edges_inside(g, cand) <= cap:
                        return sorted(cand)
                raise StrategyForfeit("no sparse enough vertex set found")

            def _setup(self, state: BoardState) -> None:
                self.U = self._pick_u(state)
                u_set = set(self.U)
                self.triplets = [tuple(self.U[i:i + 3])
                                 for i in range(0, len(self.U), 3)]
                self.boxes = []
                for trip in self.triplets:
                    box = []
                    for v in trip:
                        for i in g.incident[v]:
                            a, b2 = g.edge_list[i]
                            other = b2 if a == v else a
                            if other not in u_set:
                                box.append(i)
                    self.boxes.append(sorted(set(box)))

            def choose(self, state: BoardState) -> Sequence[int]:
                if self.U is None:
                    self._setup(state)
                u_set = set(self.U)
                k = minimal_claim_size(spec, role, state.free_count)
                own = state.own
                el = g.edge_list
                if state.a_mask == 0:
                    away = [i for i in state.free_edge_ids()
                            if el[i][0] not in u_set and el[i][1] not in u_set]
                    if len(away) >= k:
                        return away
                picks: list[int] = []
                alive = []
                for trip, box in zip(self.triplets, self.boxes):
                    if any(state.d_a[v] > 0 for v in trip):
                        continue
                    free = [i for i in box if own[i] == 0]
                    if free:
                        alive.append((len(free), trip, free))
                alive.sort(key=lambda t: (-t[0], t[1]))
                for _, _, free in alive:
                    for i in free:
                        if len(picks) < k:
                            picks.append(i)
                if len(picks) >= k:
                    return picks[:k]
                # nothing free outside U: touch as few untouched vertices
                # as possible
                rest = [i for i in state.free_edge_ids() if i not in picks]
                rest.sort(key=lambda i: (sum(1 for v in el[i]
                                             if state.d_a[v] == 0), i))
                picks.extend(rest[: k - len(picks)])
                return picks

        return P()


def _edges_inside(g: Graph, vs) -> int:
    s = set(vs)
    return sum(1 for v in s for w in g.neighbors(v) if w > v and w in s)


# --- enforcer: expansion forcer ----------------------------------------------


@dataclass(frozen=True)
class ForcerFamily:
    """Edge-set targets whose coverage forces expansion in the opponent's
    final graph: star-block sets E(S, F) for every small S (F a union of
    half of the 2d|S| neighborhood blocks), plus cross sets E(A, B) for
    every disjoint pair of size-k2 vertex sets."""

    d: int
    k1: int
    k2: int
    expansion_sets: tuple[frozenset[Edge], ...]
    cross_sets: tuple[frozenset[Edge], ...]
    skipped: int

    @property
    def all_sets(self) -> tuple[frozenset[Edge], ...]:
        return self.expansion_sets + self.cross_sets

    def hypergraph(self, g: Graph) -> Hypergraph:
        idx = g.edge_index
        return Hypergraph.build(
            g.num_edges, [[idx[e] for e in F] for F in self.all_sets])


def _family_size_bound(n: int, d: int, k1: int, k2: int) -> int:
    total = sum(math.comb(n, k) * math.comb(2 * d * k, d * k)
                for k in range(1, k1 + 1))
    total += math.comb(n, k2) * math.comb(n - k2, k2) // 2
    return total


def build_forcer_family(g: Graph, d: int, k1: int, k2: int,
                        max_sets: int = 20000) -> ForcerFamily:
    """Enumerate the forcing family on g (desk scale; the count is
    checked against ``max_sets`` before any enumeration)."""
    if d < 1 or k1 < 1 or k2 < 1:
        raise ValueError("d, k1, k2 must be >= 1")
    bound = _family_size_bound(g.n, d, k1, k2)
    if bound > max_sets:
        raise ValueError(
            f"forcing family would have up to {bound} sets, cap {max_sets}")
    expansion: list[frozenset[Edge]] = []
    skipped = 0
    for k in range(1, k1 + 1):
        blocks_count = 2 * d * k
        for S in itertools.combinations(range(g.n), k):
            nbhd = sorted(set().union(*(g.neighbors(v) for v in S)) - set(S))
            if len(nbhd) < blocks_count:
                skipped += 1
                continue
            size = len(nbhd) // blocks_count
            blocks = [nbhd[i * size:(i + 1) * size]
                      for i in range(blocks_count)]
            blocks[-1] = nbhd[(blocks_count - 1) * size:]
            for combo in itertools.combinations(range(blocks_count), d * k):
                members = set().union(*(blocks[i] for i in combo))
                es = frozenset((min(u, v), max(u, v))
                               for u in S for v in members if g.has_edge(u, v))
                if es:
                    expansion.append(es)
                else:
                    skipped += 1
    cross: list[frozenset[Edge]] = []
    for A in itertools.combinations(range(g.n), k2):
        rest = [v for v in range(g.n) if v not in A]
        for B in itertools.combinations(rest, k2):
            if B < A:
                continue
            es = frozenset((min(u, v), max(u, v))
                           for u in A for v in B if g.has_edge(u, v))
            if es:
                cross.append(es)
            else:
                skipped += 1
    return ForcerFamily(d, k1, k2, tuple(expansion), tuple(cross), skipped)


class EnforcerForcer(Strategy):
    """Force the opponent's final graph to expand: never complete any
    set of the forcing family yourself, playing the avoidance potential
    over it with your own bias as the claim size."""

    def __init__(self, d: int, k1: int, k2: int, max_sets: int = 20000):
        self.d = d
        self.k1 = k1
        self.k2 = k2
        self.max_sets = max_sets
        self.name = "expansion-forcer"

    @property
    def params(self) -> dict:
        return {"d": self.d, "k1": self.k1, "k2": self.k2}

    def new_policy(self, spec, g, role, rng):
        if spec.convention is not Convention.AVOIDER_ENFORCER:
            raise ValueError("the forcing reduction plays the monotone convention")
        family = build_forcer_family(g, self.d, self.k1, self.k2,
                                     self.max_sets)
        edge_sets = tuple(
            frozenset(g.edge_list[i] for i in F)
            for F in family.hypergraph(g).family)
        inner = AvoiderPotential(a=spec.role_bias(role), family=edge_sets)
        policy = inner.new_policy(spec, g, role, rng)
        policy.family_built = family
        return policy
