"""Exact game-tree ground truth for tiny boards.

``solve_exact`` computes who wins under optimal play by full alternating
minimax over ownership states, memoized on (a-side mask, b-side mask,
mover).  ``best_response_value`` pins one side to a concrete strategy
and searches only the adversary's choices, which is how strategy
soundness sweeps are run.

Under the monotone convention the searches branch over ALL legal claim
sizes by default.  Restricting to minimal claims looks tempting but is
not outcome-preserving: claim sizes carry parity information, and either
side can need to over-claim to dodge or force the final move (on a K4
board with biases (1,2) and a minimum-degree-1 target the forcing side
wins only by claiming four edges in one move).  The minimal-claims
search remains available as an explicit reduction via
``minimal_claims=True`` for callers that accept the approximation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .engine import (
    BoardState,
    Convention,
    GameResult,
    GameSpec,
    IllegalMove,
    Role,
    Strategy,
    StrategyForfeit,
    apply_claim,
    check_winner,
    minimal_claim_size,
    new_game,
    opponent,
    roles_of,
)
from .graphs import Graph
from .rng import substream

__all__ = ["SolveResult", "solve_exact", "best_response_value"]

_DEFAULT_LIMIT = 16


@dataclass(frozen=True)
class SolveResult:
    winner: Role
    principal_variation: tuple[tuple[Role, tuple[int, ...]], ...]
    states_explored: int


def _claim_options(state: BoardState, minimal_claims: bool):
    spec = state.spec
    free = state.free_edge_ids().tolist()
    k_min = minimal_claim_size(spec, state.to_move, len(free))
    if spec.convention is Convention.MAKER_BREAKER or minimal_claims:
        sizes = [k_min]
    else:
        sizes = list(range(k_min, len(free) + 1))
    for k in sizes:
        yield from itertools.combinations(free, k)


def solve_exact(spec: GameSpec, g: Graph, max_elements: int = _DEFAULT_LIMIT,
                minimal_claims: bool = False, use_memo: bool = True) -> SolveResult:
    """Winner under optimal play, with a principal variation that replays
    to the stated winner."""
    if g.num_edges > max_elements:
        raise ValueError(f"board has {g.num_edges} edges, limit {max_elements}")
    memo: dict = {}
    explored = [0]

    def value(state: BoardState) -> tuple[Role, tuple[int, ...] | None]:
        key = (state.a_mask, state.b_mask, state.to_move)
        if use_memo and key in memo:
            return memo[key]
        explored[0] += 1
        res = check_winner(state)
        if res is not None:
            out = (res.winner, None)
            if use_memo:
                memo[key] = out
            return out
        mover = state.to_move
        best: tuple[Role, tuple[int, ...] | None] | None = None
        for claim in _claim_options(state, minimal_claims):
            w, _ = value(apply_claim(state, mover, claim))
            if w is mover:
                best = (mover, claim)
                break
            if best is None:
                best = (w, claim)
        assert best is not None, "no legal claims in an unresolved state"
        if use_memo:
            memo[key] = best
        return best

    root = new_game(spec, g)
    winner, _ = value(root)
    # reconstruct a principal variation by replaying best moves
    pv: list[tuple[Role, tuple[int, ...]]] = []
    state = root
    while check_winner(state) is None:
        mover = state.to_move
        if use_memo:
            _, claim = memo[(state.a_mask, state.b_mask, state.to_move)]
        else:
            _, claim = value(state)
        assert claim is not None
        pv.append((mover, tuple(claim)))
        state = apply_claim(state, mover, claim)
    return SolveResult(winner, tuple(pv), explored[0])


def best_response_value(spec: GameSpec, g: Graph, fixed: Strategy,
                        fixed_role: Role, seed: int = 0,
                        max_elements: int = _DEFAULT_LIMIT,
                        minimal_claims: bool = False) -> Role:
    """Winner when ``fixed_role`` plays ``fixed`` and the other side
    searches all replies.

    Memoization requires the fixed strategy to be markov (state-driven);
    path-dependent strategies are searched without it.
    """
    if g.num_edges > max_elements:
        raise ValueError(f"board has {g.num_edges} edges, limit {max_elements}")
    a_role, b_role = roles_of(spec.convention)
    if fixed_role not in (a_role, b_role):
        raise ValueError(f"{fixed_role} not a role of this convention")
    adversary = opponent(fixed_role)
    policy = fixed.new_policy(spec, g, fixed_role,
                              substream(seed, 1 if fixed_role is a_role else 2))
    memo: dict = {}

    def walk(state: BoardState) -> Role:
        key = (state.a_mask, state.b_mask, state.to_move)
        if fixed.markov and key in memo:
            return memo[key]
        res = check_winner(state)
        if res is not None:
            w = res.winner
        elif state.to_move is fixed_role:
            try:
                claim = policy.choose(state)
                w = walk(apply_claim(state, fixed_role, claim))
            except (IllegalMove, StrategyForfeit):
                w = adversary
        else:
            w = fixed_role
            for claim in _claim_options(state, minimal_claims):
                if walk(apply_claim(state, adversary, claim)) is adversary:
                    w = adversary
                    break
        if fixed.markov:
            memo[key] = w
        return w

    return walk(new_game(spec, g))
