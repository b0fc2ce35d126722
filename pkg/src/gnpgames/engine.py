"""Turn-by-turn engine for biased edge-claiming games.

Two conventions share one board:

* Maker-Breaker: per move the players claim exactly ``bias_a`` / ``bias_b``
  free edges (a short final move claims whatever remains).  Maker wins by
  making his claimed graph satisfy the target property; Breaker wins when
  the board is exhausted without that (or earlier, when the property has
  become impossible on Maker's plus the free edges).
* Avoider-Enforcer, monotone: the players claim AT LEAST their bias per
  move (the final short move claims all that remain).  Avoider loses at
  the first moment his claimed graph satisfies the target property.

All targets here are monotone increasing, which is what makes the
optional early cutoff outcome-equivalent: once the property is
impossible on ``claimed-by-a plus free`` it stays impossible.

Board states are values: ``apply_claim`` returns a new state and the old
one stays valid, so strategies may keep references freely and games can
be replayed from history alone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .graphs import Edge, Graph, edge
from .properties import (
    ham_status,
    is_connected,
    is_k_connected,
    is_two_connected,
    maximum_matching,
    minimum_degree,
)
from .rng import substream

__all__ = [
    "Role",
    "Convention",
    "Connectivity",
    "PerfectMatching",
    "Hamiltonicity",
    "KConnectivity",
    "MinDegree",
    "IsolateVertex",
    "ExplicitHypergraph",
    "GameSpec",
    "BoardState",
    "GameResult",
    "IllegalMove",
    "WrongMoverError",
    "NonFreeEdgeError",
    "CardinalityError",
    "StrategyForfeit",
    "Strategy",
    "MovePolicy",
    "new_game",
    "apply_claim",
    "minimal_claim_size",
    "check_winner",
    "play",
    "replay",
    "fake_moves_wrapper",
    "transcript_to_text",
    "transcript_from_text",
]


class Role(enum.Enum):
    MAKER = "maker"
    BREAKER = "breaker"
    AVOIDER = "avoider"
    ENFORCER = "enforcer"


class Convention(enum.Enum):
    MAKER_BREAKER = "maker-breaker"
    AVOIDER_ENFORCER = "avoider-enforcer-monotone"


_A_SIDE = {Role.MAKER, Role.AVOIDER}


def roles_of(convention: Convention) -> tuple[Role, Role]:
    """(a-side, b-side) role pair of a convention."""
    if convention is Convention.MAKER_BREAKER:
        return Role.MAKER, Role.BREAKER
    return Role.AVOIDER, Role.ENFORCER


def opponent(role: Role) -> Role:
    return {Role.MAKER: Role.BREAKER, Role.BREAKER: Role.MAKER,
            Role.AVOIDER: Role.ENFORCER, Role.ENFORCER: Role.AVOIDER}[role]


# --- targets -------------------------------------------------------------


@dataclass(frozen=True)
class Connectivity:
    name = "connectivity"


@dataclass(frozen=True)
class PerfectMatching:
    name = "perfect-matching"


@dataclass(frozen=True)
class Hamiltonicity:
    """Hamiltonicity target.

    ``search_budget`` caps the exact backtracking effort of the per-move
    win check (0 accepts only rotation-certified cycles); a capped check
    reports "not yet", which is harmless for this monotone target: the
    win registers on a later check or at exhaustion.  ``final_budget``
    caps the board-exhaustion decision instead; if that cap is hit the
    builder is scored as not having won, a conservative call that large
    boards opt into.  The None defaults keep every check exact,
    appropriate at desk scale.
    """

    search_budget: Optional[int] = None
    final_budget: Optional[int] = None
    name = "hamiltonicity"


@dataclass(frozen=True)
class KConnectivity:
    k: int
    name = "k-connectivity"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")


@dataclass(frozen=True)
class MinDegree:
    c: int
    name = "min-degree"

    def __post_init__(self):
        if self.c < 1:
            raise ValueError("c must be >= 1")


@dataclass(frozen=True)
class IsolateVertex:
    """Vertex-isolation framing: the blocking side (Breaker / the
    Avoider himself in reverse games) wants an isolated vertex in the
    building side's final graph; equivalently the building side's target
    property is minimum degree 1."""

    name = "isolate-vertex"


@dataclass(frozen=True)
class ExplicitHypergraph:
    family: tuple[frozenset[Edge], ...]
    name = "explicit-family"

    def __post_init__(self):
        if any(len(F) == 0 for F in self.family):
            raise ValueError("empty target set not allowed")


Target = (Connectivity | PerfectMatching | Hamiltonicity | KConnectivity
          | MinDegree | IsolateVertex | ExplicitHypergraph)


@dataclass(frozen=True)
class GameSpec:
    convention: Convention
    target: Target
    bias_a: int = 1
    bias_b: int = 1
    first_player: Optional[Role] = None
    early_cutoff: bool = True

    def __post_init__(self):
        if self.bias_a < 1 or self.bias_b < 1:
            raise ValueError("biases must be >= 1")
        a, b = roles_of(self.convention)
        if self.first_player is None:
            # Maker-Breaker default: the building side moves second;
            # Avoider-Enforcer default: Avoider moves first
            object.__setattr__(self, "first_player",
                               b if self.convention is Convention.MAKER_BREAKER else a)
        elif self.first_player not in (a, b):
            raise ValueError(f"{self.first_player} not a role of {self.convention}")

    def role_bias(self, role: Role) -> int:
        return self.bias_a if role in _A_SIDE else self.bias_b


# --- board state ----------------------------------------------------------

_FREE, _OWN_A, _OWN_B = 0, 1, 2


class BoardState:
    """One game in progress: edge ownership plus derived degree views.

    ``d_a``/``d_b``/``d_f`` are per-vertex degrees in the a-player's,
    b-player's and free graphs; they always sum to the board degree.
    """

    __slots__ = ("g", "spec", "own", "to_move", "d_a", "d_b", "d_f",
                 "free_count", "a_mask", "b_mask", "_hist", "move_no",
                 "last_mover", "_graph_cache", "_parent_a", "a_components")

    def __init__(self, g: Graph, spec: GameSpec):
        self.g = g
        self.spec = spec
        m = g.num_edges
        self.own = np.zeros(m, dtype=np.uint8)
        self.to_move = spec.first_player
        self.d_a = np.zeros(g.n, dtype=np.int64)
        self.d_b = np.zeros(g.n, dtype=np.int64)
        self.d_f = np.asarray(g.degrees(), dtype=np.int64)
        self.free_count = m
        self.a_mask = 0
        self.b_mask = 0
        self._hist: tuple = ()
        self.move_no = 0
        self.last_mover: Optional[Role] = None
        self._graph_cache: dict = {}
        # union-find over the a-side graph (it only ever grows)
        self._parent_a = list(range(g.n))
        self.a_components = g.n

    def _find_a(self, v: int) -> int:
        p = self._parent_a
        while p[v] != v:
            p[v] = p[p[v]]
            v = p[v]
        return v

    def _union_a(self, u: int, v: int) -> None:
        ru, rv = self._find_a(u), self._find_a(v)
        if ru != rv:
            self._parent_a[ru] = rv
            self.a_components -= 1

    # -- views ------------------------------------------------------------

    def owner(self, e: Edge | int) -> int:
        return int(self.own[self._eid(e)])

    def _eid(self, e: Edge | int) -> int:
        if isinstance(e, int) or isinstance(e, np.integer):
            if not (0 <= e < self.g.num_edges):
                raise NonFreeEdgeError(f"edge id {e} out of range")
            return int(e)
        try:
            return self.g.edge_index[edge(*e)]
        except KeyError:
            raise NonFreeEdgeError(f"{e} is not a board edge") from None

    def free_edge_ids(self) -> np.ndarray:
        return np.flatnonzero(self.own == _FREE)

    def free_edges_at(self, v: int) -> list[int]:
        return [i for i in self.g.incident[v] if self.own[i] == _FREE]

    def side_of(self, role: Role) -> int:
        return _OWN_A if role in _A_SIDE else _OWN_B

    def edges_of_side(self, code: int) -> list[Edge]:
        el = self.g.edge_list
        if code == _FREE:
            ids = np.flatnonzero(self.own == _FREE)
        else:
            ids = np.flatnonzero(self.own == code)
        return [el[i] for i in ids]

    def graph_of(self, which: str) -> Graph:
        """Claimed-edge graphs: 'a', 'b', 'f', or 'af' (a plus free)."""
        if which in self._graph_cache:
            return self._graph_cache[which]
        el = self.g.edge_list
        if which == "a":
            ids = np.flatnonzero(self.own == _OWN_A)
        elif which == "b":
            ids = np.flatnonzero(self.own == _OWN_B)
        elif which == "f":
            ids = np.flatnonzero(self.own == _FREE)
        elif which == "af":
            ids = np.flatnonzero(self.own != _OWN_B)
        else:
            raise ValueError(which)
        gr = Graph(self.g.n, (el[i] for i in ids))
        self._graph_cache[which] = gr
        return gr

    def history(self) -> list[tuple[Role, tuple[int, ...]]]:
        out = []
        h = self._hist
        while h:
            h, entry = h
            out.append(entry)
        out.reverse()
        return out

    def _child(self) -> "BoardState":
        c = object.__new__(BoardState)
        c.g = self.g
        c.spec = self.spec
        c.own = self.own.copy()
        c.to_move = self.to_move
        c.d_a = self.d_a.copy()
        c.d_b = self.d_b.copy()
        c.d_f = self.d_f.copy()
        c.free_count = self.free_count
        c.a_mask = self.a_mask
        c.b_mask = self.b_mask
        c._hist = self._hist
        c.move_no = self.move_no
        c.last_mover = self.last_mover
        c._graph_cache = {}
        c._parent_a = list(self._parent_a)
        c.a_components = self.a_components
        return c


class IllegalMove(Exception):
    pass


class WrongMoverError(IllegalMove):
    pass


class NonFreeEdgeError(IllegalMove):
    pass


class CardinalityError(IllegalMove):
    pass


class StrategyForfeit(Exception):
    """Raised by a strategy that cannot follow its own rules; the engine
    scores it as an immediate loss, never a silent correction."""


def new_game(spec: GameSpec, g: Graph) -> BoardState:
    if g.n < 1:
        raise ValueError("board needs at least one vertex")
    if isinstance(spec.target, Hamiltonicity) and g.n < 3:
        raise ValueError("Hamiltonicity needs n >= 3")
    if isinstance(spec.target, KConnectivity) and g.n <= spec.target.k:
        raise ValueError("k-connectivity needs n > k")
    if isinstance(spec.target, ExplicitHypergraph):
        for F in spec.target.family:
            for e in F:
                if edge(*e) not in g.edge_index:
                    raise ValueError(f"target set uses non-board edge {e}")
    return BoardState(g, spec)


def _required_claim_size(spec: GameSpec, role: Role, free: int,
                         claimed: int) -> Optional[str]:
    bias = spec.role_bias(role)
    if free == 0:
        return "no free edges remain"
    if spec.convention is Convention.MAKER_BREAKER:
        need = min(bias, free)
        if claimed != need:
            return f"must claim exactly {need} edges, got {claimed}"
    else:
        if free < bias:
            if claimed != free:
                return f"short final move must claim all {free} free edges"
        elif claimed < bias:
            return f"must claim at least {bias} edges, got {claimed}"
    return None


def minimal_claim_size(spec: GameSpec, role: Role, free: int) -> int:
    """Smallest legal claim size at ``free`` remaining edges (also the
    exact size under the Maker-Breaker convention)."""
    bias = spec.role_bias(role)
    return free if free < bias else bias


def apply_claim(state: BoardState, who: Role,
                edges: Iterable[Edge | int]) -> BoardState:
    if who is not state.to_move:
        raise WrongMoverError(f"{who} moved out of turn")
    raw = list(edges)
    ids = sorted({state._eid(e) for e in raw})
    if len(ids) != len(raw):
        raise CardinalityError("duplicate edges in claim")
    err = _required_claim_size(state.spec, who, state.free_count, len(ids))
    if err:
        raise CardinalityError(err)
    own = state.own
    for i in ids:
        if own[i] != _FREE:
            raise NonFreeEdgeError(f"edge {state.g.edge_list[i]} already claimed")
    child = state._child()
    code = state.side_of(who)
    d_side = child.d_a if code == _OWN_A else child.d_b
    mask = 0
    for i in ids:
        child.own[i] = code
        u, v = state.g.edge_list[i]
        d_side[u] += 1
        d_side[v] += 1
        child.d_f[u] -= 1
        child.d_f[v] -= 1
        if code == _OWN_A:
            child._union_a(u, v)
        mask |= 1 << i
    if code == _OWN_A:
        child.a_mask |= mask
    else:
        child.b_mask |= mask
    child.free_count -= len(ids)
    child.to_move = opponent(who)
    child.move_no += 1
    child.last_mover = who
    child._hist = (state._hist, (who, tuple(ids)))
    return child


# --- win detection ---------------------------------------------------------


def _achieved(state: BoardState) -> bool:
    """Does the a-side's claimed graph satisfy the target property?"""
    t = state.spec.target
    n = state.g.n
    if isinstance(t, ExplicitHypergraph):
        fam = _family_masks(state)
        return any(f & ~state.a_mask == 0 for f in fam)
    if isinstance(t, (MinDegree, IsolateVertex)):
        c = t.c if isinstance(t, MinDegree) else 1
        return bool((state.d_a >= c).all())
    if isinstance(t, Connectivity):
        return state.a_components == 1
    if isinstance(t, PerfectMatching):
        if int((state.d_a > 0).sum()) < 2 * (n // 2):
            return False
        return len(maximum_matching(state.graph_of("a"))) >= n // 2
    if isinstance(t, KConnectivity):
        if int(state.d_a.min()) < t.k or state.a_components != 1:
            return False
        return is_k_connected(state.graph_of("a"), t.k)
    if isinstance(t, Hamiltonicity):
        if (int(state.d_a.min()) < 2 or state.a_mask.bit_count() < n
                or state.a_components != 1):
            return False
        if state.free_count == 0:
            ga = state.graph_of("a")
            if not is_two_connected(ga):
                return False
            return bool(ham_status(ga, budget=t.final_budget,
                                   posa_restarts=12))
        # budgeted mode also thins the expensive checks to a
        # deterministic cadence; detection can only be delayed, and the
        # target is monotone
        if t.search_budget is not None and state.move_no % 3 != 0 \
                and state.free_count > 2 * n:
            return False
        ga = state.graph_of("a")
        if not is_two_connected(ga):
            return False
        return bool(ham_status(ga, budget=t.search_budget,
                               posa_restarts=4, posa_flips=6))
    raise TypeError(f"unknown target {t}")


def _unreachable(state: BoardState) -> bool:
    """Sound (never false-positive) impossibility check on a-side + free.

    Degree and mask conditions run every time; the graph-traversal
    conditions run on a deterministic cadence (every eighth move, and
    always near exhaustion), which can only delay an early cutoff, never
    change a winner: the targets are monotone and exhaustion decides
    exactly.
    """
    t = state.spec.target
    n = state.g.n
    d_af = state.d_a + state.d_f
    if isinstance(t, ExplicitHypergraph):
        fam = _family_masks(state)
        return all(f & state.b_mask for f in fam)
    if isinstance(t, (MinDegree, IsolateVertex)):
        c = t.c if isinstance(t, MinDegree) else 1
        return bool((d_af < c).any())
    deep = state.move_no % 8 == 0 or state.free_count <= 2 * n
    if isinstance(t, Connectivity):
        if n > 1 and int(d_af.min()) < 1:
            return True
        return deep and not is_connected(state.graph_of("af"))
    if isinstance(t, PerfectMatching):
        if int((d_af > 0).sum()) < 2 * (n // 2):
            return True
        return deep and len(maximum_matching(state.graph_of("af"))) < n // 2
    if isinstance(t, KConnectivity):
        if int(d_af.min()) < t.k:
            return True
        return deep and not is_k_connected(state.graph_of("af"), t.k)
    if isinstance(t, Hamiltonicity):
        if int(d_af.min()) < 2:
            return True
        if not deep:
            return False
        af = state.graph_of("af")
        return not (is_connected(af) and is_two_connected(af))
    raise TypeError(f"unknown target {t}")


def _family_masks(state: BoardState) -> tuple[int, ...]:
    key = "family_masks"
    cached = state._graph_cache.get(key)
    if cached is None:
        t = state.spec.target
        idx = state.g.edge_index
        cached = tuple(
            sum(1 << idx[edge(*e)] for e in F) for F in t.family)
        state._graph_cache[key] = cached
    return cached


@dataclass(frozen=True)
class GameResult:
    winner: Role
    reason: str  # target-achieved | target-unavoidable | board-exhausted | forfeit
    move_count: int
    final_state: BoardState


def check_winner(state: BoardState) -> Optional[GameResult]:
    """Resolve the game at this state, if it is decided.

    The achieved check runs when the a-side was the last mover (or at
    the initial state); the impossibility check when the b-side was (the
    other side's claims cannot change the respective quantity).
    """
    spec = state.spec
    a_role, b_role = roles_of(spec.convention)
    mb = spec.convention is Convention.MAKER_BREAKER
    last = state.last_mover
    if last in (None, a_role) and _achieved(state):
        return GameResult(a_role if mb else b_role, "target-achieved",
                          state.move_no, state)
    if state.free_count == 0:
        if _achieved(state):
            return GameResult(a_role if mb else b_role, "target-achieved",
                              state.move_no, state)
        return GameResult(b_role if mb else a_role, "board-exhausted",
                          state.move_no, state)
    if spec.early_cutoff and last in (None, b_role) and _unreachable(state):
        return GameResult(b_role if mb else a_role, "target-unavoidable",
                          state.move_no, state)
    return None


# --- strategies -------------------------------------------------------------


class MovePolicy:
    """Per-game decision object; ``choose`` returns the edge ids to claim."""

    def choose(self, state: BoardState) -> Sequence[int]:
        raise NotImplementedError


class Strategy:
    """A named, parameterized factory of per-game move policies.

    ``markov=True`` promises that choices depend only on the visible
    board state (no internal randomness or path dependence), which the
    exact-oracle adversary search needs for memoization.
    """

    name: str = "strategy"
    markov: bool = False

    @property
    def params(self) -> dict:
        return {}

    def new_policy(self, spec: GameSpec, g: Graph, role: Role,
                   rng: np.random.Generator) -> MovePolicy:
        raise NotImplementedError

    def describe(self) -> str:
        ps = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.name}({ps})" if ps else self.name


def play(spec: GameSpec, g: Graph, strategy_a: Strategy, strategy_b: Strategy,
         seed: int, max_moves: Optional[int] = None) -> GameResult:
    """Run one full game; deterministic given (spec, g, strategies, seed).

    Strategy randomness comes from split substreams of ``seed``.  An
    illegal move or an explicit forfeit loses immediately.
    """
    a_role, b_role = roles_of(spec.convention)
    state = new_game(spec, g)
    policies = {
        a_role: strategy_a.new_policy(spec, g, a_role, substream(seed, 1)),
        b_role: strategy_b.new_policy(spec, g, b_role, substream(seed, 2)),
    }
    limit = max_moves if max_moves is not None else 2 * g.num_edges + 4
    while True:
        res = check_winner(state)
        if res is not None:
            return res
        if state.move_no >= limit:
            raise RuntimeError("move limit exceeded without resolution")
        mover = state.to_move
        try:
            claim = policies[mover].choose(state)
            state = apply_claim(state, mover, claim)
        except (IllegalMove, StrategyForfeit):
            return GameResult(opponent(mover), "forfeit", state.move_no, state)


def replay(spec: GameSpec, g: Graph,
           history: Iterable[tuple[Role, Sequence[int]]]) -> BoardState:
    """Reconstruct the state reached by a recorded move sequence."""
    state = new_game(spec, g)
    for role, ids in history:
        state = apply_claim(state, role, list(ids))
    return state


def fake_moves_wrapper(inner: Strategy, b: int, b_prime: int) -> Strategy:
    """Adapt a strategy designed against opponent bias ``b`` to a game
    with the smaller opponent bias ``b_prime``.

    The adapter presents the inner strategy with a board where the
    opponent bias reads ``b``; the b - b' claims the real opponent never
    makes are phantom elements outside every target set, so they affect
    no potential or danger computation and never leak onto the real
    board.  A winning inner strategy then finishes within
    ceil(|board| / (b+1)) of its own moves.
    """
    if b_prime >= b:
        raise ValueError("wrapper needs b_prime < b")

    class _Wrapped(Strategy):
        name = f"fake-moves({inner.name},b={b},b'={b_prime})"
        markov = inner.markov

        @property
        def params(self) -> dict:
            return {"inner": inner.describe(), "b": b, "b_prime": b_prime}

        def new_policy(self, spec, g, role, rng):
            shadow = replace(spec, bias_b=b)
            return inner.new_policy(shadow, g, role, rng)

    return _Wrapped()


# --- transcripts -------------------------------------------------------------


def transcript_to_text(state: BoardState) -> str:
    """One move per line: ``<round> <role> <edge list>``."""
    lines = []
    for rnd, (role, ids) in enumerate(state.history(), start=1):
        pairs = " ".join(f"{u}-{v}" for (u, v) in
                         (state.g.edge_list[i] for i in ids))
        lines.append(f"{rnd} {role.value} {pairs}")
    return "\n".join(lines) + ("\n" if lines else "")


def transcript_from_text(text: str) -> list[tuple[Role, list[Edge]]]:
    moves = []
    for ln in text.splitlines():
        if not ln.strip():
            continue
        parts = ln.split()
        role = Role(parts[1])
        pairs = [tuple(int(x) for x in tok.split("-")) for tok in parts[2:]]
        moves.append((role, [edge(u, v) for (u, v) in pairs]))
    return moves
