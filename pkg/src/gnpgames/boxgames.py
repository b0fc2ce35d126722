"""Box games: disjoint boxes, claims versus destruction or avoidance.

Forward game ``Box(m, l, b)``: BoxMaker claims b elements per round from
m disjoint boxes of size l, then BoxBreaker destroys one box.  BoxMaker
wins by fully claiming a box before it is destroyed; the guiding
threshold is b > l / ln m.

BoxMaker's implemented policy is finish-first balancing: complete any
completable box with the claims left this turn, otherwise spread claims
into the fullest surviving boxes to keep them level.  (Claiming into the
emptiest box instead stacks one box per round, which demonstrably loses
games the threshold says are winnable, e.g. five boxes of five at b=4;
the balancing policy wins every above-threshold instance we can solve
exactly, see the oracle sweep in the tests.)

Reverse game ``rbox(sizes, (p, q))``, monotone: the avoiding side claims
at least p elements per move, the forcing side at least q, and the
avoider loses by ever owning a whole box.  The forcing side's policy is
to spend its single claim in the surviving box farthest from completion,
preserving the boxes the avoider is closest to being forced into.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Optional

__all__ = [
    "BOXMAKER",
    "BOXBREAKER",
    "RBOX_AVOIDER",
    "RBOX_ENFORCER",
    "BoxState",
    "RBoxState",
    "box_threshold",
    "boxmaker_claims",
    "play_box",
    "boxmaker_beats_optimal_breaker",
    "solve_box_exact",
    "enforcer_rbox_choice",
    "enforcer_beats_optimal_avoider",
    "solve_rbox_exact",
]

BOXMAKER = "boxmaker"
BOXBREAKER = "boxbreaker"
RBOX_AVOIDER = "rbox-avoider"
RBOX_ENFORCER = "rbox-enforcer"

_SOLVE_LIMIT = 24


@dataclass(frozen=True)
class BoxState:
    """Forward box game position (BoxMaker about to claim)."""

    sizes: tuple[int, ...]
    claimed: tuple[int, ...]
    destroyed: tuple[bool, ...]
    bias: int

    @staticmethod
    def new(m: int, length: int, bias: int) -> "BoxState":
        if m < 1 or length < 1 or bias < 1:
            raise ValueError("m, l, b must all be >= 1")
        return BoxState((length,) * m, (0,) * m, (False,) * m, bias)

    def __post_init__(self):
        for s, c in zip(self.sizes, self.claimed):
            if not (0 <= c <= s):
                raise ValueError("claimed count outside box size")

    def remaining(self, i: int) -> int:
        return self.sizes[i] - self.claimed[i]

    def surviving(self) -> list[int]:
        return [i for i in range(len(self.sizes)) if not self.destroyed[i]]

    def won(self) -> bool:
        return any(not self.destroyed[i] and self.claimed[i] == self.sizes[i]
                   for i in range(len(self.sizes)))


def box_threshold(m: int, length: int) -> float:
    """The winning-bias threshold l / ln m (needs m >= 2)."""
    if m < 2:
        raise ValueError("threshold needs m >= 2 boxes")
    return length / math.log(m)


def boxmaker_claims(state: BoxState) -> list[int]:
    """Box indices for this turn's claims (finish-first, then balance).

    Claims at most ``bias`` elements, fewer only when the surviving
    boxes run out of free elements.
    """
    rem = {i: state.remaining(i) for i in state.surviving()
           if state.remaining(i) > 0}
    picks: list[int] = []
    budget = min(state.bias, sum(rem.values()))
    while budget > 0 and rem:
        finishable = [i for i, r in rem.items() if r <= budget]
        if finishable:
            target = min(finishable, key=lambda i: (rem[i], i))
        else:
            target = max(rem, key=lambda i: (rem[i], -i))
        picks.append(target)
        rem[target] -= 1
        budget -= 1
        if rem[target] == 0:
            del rem[target]
    return picks


def _apply_maker(state: BoxState, picks: list[int]) -> BoxState:
    claimed = list(state.claimed)
    for i in picks:
        if state.destroyed[i] or claimed[i] >= state.sizes[i]:
            raise ValueError(f"illegal claim into box {i}")
        claimed[i] += 1
    return replace(state, claimed=tuple(claimed))


def _apply_breaker(state: BoxState, i: int) -> BoxState:
    if state.destroyed[i]:
        raise ValueError(f"box {i} already destroyed")
    destroyed = list(state.destroyed)
    destroyed[i] = True
    return replace(state, destroyed=tuple(destroyed))


def play_box(m: int, length: int, bias: int,
             breaker_choice: Callable[[BoxState], int]) -> str:
    """One playout: greedy BoxMaker against the given destroyer policy."""
    state = BoxState.new(m, length, bias)
    while True:
        picks = boxmaker_claims(state)
        if not picks:
            return BOXBREAKER
        state = _apply_maker(state, picks)
        if state.won():
            return BOXMAKER
        alive = [i for i in state.surviving() if state.remaining(i) > 0]
        if not alive:
            return BOXBREAKER
        state = _apply_breaker(state, breaker_choice(state))
        if not any(state.remaining(i) > 0 for i in state.surviving()):
            return BOXBREAKER


def boxmaker_beats_optimal_breaker(m: int, length: int, bias: int) -> bool:
    """Does the greedy BoxMaker win against every destroyer line?"""

    @lru_cache(maxsize=None)
    def wins(rem: tuple[int, ...]) -> bool:
        # rem: sorted remaining counts of surviving, unfinished boxes
        state = BoxState(tuple(r for r in rem), tuple(0 for _ in rem),
                         (False,) * len(rem), bias)
        picks = boxmaker_claims(state)
        if not picks:
            return False
        state = _apply_maker(state, picks)
        if state.won():
            return True
        child_rem = sorted(state.remaining(i) for i in state.surviving())
        if not child_rem:
            return False
        for v in sorted(set(child_rem)):
            nxt = list(child_rem)
            nxt.remove(v)
            if not nxt:
                return False  # destroyer removes the last box
            if not wins(tuple(nxt)):
                return False
        return True

    return wins(tuple(sorted([length] * m)))


def solve_box_exact(state: BoxState | "RBoxState") -> str:
    """Winner under optimal play on both sides (memoized minimax)."""
    if isinstance(state, RBoxState):
        return _solve_rbox_state(state)
    total = sum(state.remaining(i) for i in state.surviving())
    if total > _SOLVE_LIMIT:
        raise ValueError(f"exact solve limited to {_SOLVE_LIMIT} elements")
    bias = state.bias

    @lru_cache(maxsize=None)
    def maker_wins(rem: tuple[int, ...]) -> bool:
        if not rem:
            return False
        k = min(bias, sum(rem))
        if rem[0] <= k:
            return True  # complete the smallest box outright
        # distribute k claims, all boxes stay incomplete; then destroyer moves
        def distributions(idx: int, left: int, acc: list[int]):
            if idx == len(rem):
                if left == 0:
                    yield tuple(acc)
                return
            room = min(left, rem[idx] - 1)
            for take in range(room + 1):
                acc.append(rem[idx] - take)
                yield from distributions(idx + 1, left - take, acc)
                acc.pop()

        for after in {tuple(sorted(d)) for d in distributions(0, k, [])}:
            ok = True
            for v in sorted(set(after)):
                nxt = list(after)
                nxt.remove(v)
                if not nxt or not maker_wins(tuple(nxt)):
                    ok = False
                    break
            if ok:
                return True
        return False

    rem0 = tuple(sorted(state.remaining(i) for i in state.surviving()))
    if state.won():
        return BOXMAKER
    return BOXMAKER if rem0 and maker_wins(rem0) else BOXBREAKER


# --- reverse (avoidance) box game ----------------------------------------


@dataclass(frozen=True)
class RBoxState:
    """Monotone reverse box game position.

    Boxes sorted by size.  A box is dead for the avoider once the
    forcing side claims into it; free elements of dead boxes remain
    claimable filler.  The avoider loses by owning every element of
    some box.
    """

    sizes: tuple[int, ...]
    avoider_claimed: tuple[int, ...]
    enforcer_claimed: tuple[int, ...]
    avoider_bias: int
    enforcer_bias: int = 1
    to_move: str = RBOX_AVOIDER

    @staticmethod
    def new(sizes: tuple[int, ...], avoider_bias: int,
            enforcer_bias: int = 1, first: str = RBOX_AVOIDER) -> "RBoxState":
        if any(s < 1 for s in sizes):
            raise ValueError("box sizes must be >= 1")
        if avoider_bias < 1 or enforcer_bias < 1:
            raise ValueError("biases must be >= 1")
        srt = tuple(sorted(sizes))
        z = (0,) * len(srt)
        return RBoxState(srt, z, z, avoider_bias, enforcer_bias, first)

    def __post_init__(self):
        if list(self.sizes) != sorted(self.sizes):
            raise ValueError("sizes must be sorted nondecreasing")
        for s, a, e in zip(self.sizes, self.avoider_claimed, self.enforcer_claimed):
            if a < 0 or e < 0 or a + e > s:
                raise ValueError("claims exceed box size")

    def free(self, i: int) -> int:
        return self.sizes[i] - self.avoider_claimed[i] - self.enforcer_claimed[i]

    def total_free(self) -> int:
        return sum(self.free(i) for i in range(len(self.sizes)))

    def alive(self, i: int) -> bool:
        return self.enforcer_claimed[i] == 0

    def avoider_lost(self) -> bool:
        return any(a == s for a, s in zip(self.avoider_claimed, self.sizes))


def enforcer_rbox_choice(state: RBoxState) -> Optional[int]:
    """Box to claim into: the surviving box farthest from avoider
    completion (most free elements; ties lowest index); falls back to
    any free element when no box survives."""
    best = None
    for i in range(len(state.sizes)):
        if state.alive(i) and state.free(i) > 0:
            key = (state.free(i), -i)
            if best is None or key > best[0]:
                best = (key, i)
    if best is not None:
        return best[1]
    for i in range(len(state.sizes)):
        if state.free(i) > 0:
            return i
    return None


def _rbox_canonical(state: RBoxState) -> tuple:
    alive = sorted((state.sizes[i], state.avoider_claimed[i])
                   for i in range(len(state.sizes)) if state.alive(i))
    slack = sum(state.free(i) for i in range(len(state.sizes))
                if not state.alive(i))
    return (tuple(alive), slack, state.to_move)


def _avoider_distributions(frees: list[int], slack: int, k: int):
    """All ways to place k claims into alive boxes (capacities ``frees``)
    plus a slack pool."""
    def rec(idx: int, left: int, acc: list[int]):
        if idx == len(frees):
            if left <= slack:
                yield tuple(acc), left
            return
        for take in range(min(left, frees[idx]) + 1):
            acc.append(take)
            yield from rec(idx + 1, left - take, acc)
            acc.pop()

    yield from rec(0, k, [])


def _solve_rbox(canon: tuple, avoider_bias: int, enforcer_bias: int,
                memo: dict, minimal_claims: bool = False) -> str:
    if canon in memo:
        return memo[canon]
    alive, slack, mover = canon
    total_free = sum(s - a for (s, a) in alive) + slack
    if total_free == 0:
        memo[canon] = RBOX_AVOIDER
        return RBOX_AVOIDER
    frees = [s - a for (s, a) in alive]
    if mover == RBOX_AVOIDER:
        k_min = min(avoider_bias, total_free)
        k_options = [k_min] if minimal_claims else list(range(k_min, total_free + 1))
        result = RBOX_ENFORCER
        for k in k_options:
            for dist, to_slack in _avoider_distributions(frees, slack, k):
                new_alive = []
                lost = False
                for (s, a), take in zip(alive, dist):
                    if a + take == s:
                        lost = True
                        break
                    new_alive.append((s, a + take))
                if lost:
                    continue
                child = (tuple(sorted(new_alive)), slack - to_slack, RBOX_ENFORCER)
                if _solve_rbox(child, avoider_bias, enforcer_bias, memo,
                               minimal_claims) == RBOX_AVOIDER:
                    result = RBOX_AVOIDER
                    break
            if result == RBOX_AVOIDER:
                break
        memo[canon] = result
        return result
    # forcing side: each claim either kills an alive box or burns slack
    k_min = min(enforcer_bias, total_free)
    k_options = [k_min] if minimal_claims else list(range(k_min, total_free + 1))

    def enforcer_moves(al: tuple, sl: int, left: int):
        if left == 0:
            yield (al, sl)
            return
        seen = set()
        for j, (s, a) in enumerate(al):
            if (s, a) in seen:
                continue
            seen.add((s, a))
            if s - a > 0:
                nal = al[:j] + al[j + 1:]
                yield from enforcer_moves(nal, sl + (s - a) - 1, left - 1)
        if sl > 0:
            yield from enforcer_moves(al, sl - 1, left - 1)

    result = RBOX_AVOIDER
    for k in k_options:
        for nal, nsl in set(enforcer_moves(alive, slack, k)):
            child = (tuple(sorted(nal)), nsl, RBOX_AVOIDER)
            if _solve_rbox(child, avoider_bias, enforcer_bias, memo,
                           minimal_claims) == RBOX_ENFORCER:
                result = RBOX_ENFORCER
                break
        if result == RBOX_ENFORCER:
            break
    memo[canon] = result
    return result


def _solve_rbox_state(state: RBoxState, minimal_claims: bool = False) -> str:
    if state.total_free() > _SOLVE_LIMIT:
        raise ValueError(f"exact solve limited to {_SOLVE_LIMIT} elements")
    if state.avoider_lost():
        return RBOX_ENFORCER
    return _solve_rbox(_rbox_canonical(state), state.avoider_bias,
                       state.enforcer_bias, {}, minimal_claims)


def solve_rbox_exact(sizes: tuple[int, ...], avoider_bias: int,
                     enforcer_bias: int = 1, first: str = RBOX_AVOIDER,
                     minimal_claims: bool = False) -> str:
    """Winner of the monotone reverse box game under optimal play.

    By default both sides branch over every legal claim size; claim-size
    parity genuinely matters in monotone games, so restricting to
    minimal claims (``minimal_claims=True``) is only a lossy reduction
    kept for comparison runs.
    """
    state = RBoxState.new(sizes, avoider_bias, enforcer_bias, first)
    if state.total_free() > _SOLVE_LIMIT:
        raise ValueError(f"exact solve limited to {_SOLVE_LIMIT} elements")
    return _solve_rbox(_rbox_canonical(state), avoider_bias, enforcer_bias,
                       {}, minimal_claims)


def enforcer_beats_optimal_avoider(sizes: tuple[int, ...], avoider_bias: int,
                                   first: str = RBOX_AVOIDER) -> bool:
    """Does the greedy forcing policy beat every avoider line?

    The avoider searches every legal claim size and distribution; the
    forcing side is pinned to ``enforcer_rbox_choice``.
    """
    state = RBoxState.new(sizes, avoider_bias, 1, first)
    if state.total_free() > _SOLVE_LIMIT:
        raise ValueError(f"exact solve limited to {_SOLVE_LIMIT} elements")
    memo: dict = {}

    def avoider_cannot_escape(st: RBoxState) -> bool:
        key = _rbox_canonical(st)
        if key in memo:
            return memo[key]
        if st.avoider_lost():
            memo[key] = True
            return True
        total = st.total_free()
        if total == 0:
            memo[key] = False
            return False
        if st.to_move == RBOX_ENFORCER:
            i = enforcer_rbox_choice(st)
            if i is None:
                memo[key] = False
                return False
            enf = list(st.enforcer_claimed)
            enf[i] += 1
            nxt = replace(st, enforcer_claimed=tuple(enf), to_move=RBOX_AVOIDER)
            res = avoider_cannot_escape(nxt)
            memo[key] = res
            return res
        frees = [st.free(i) for i in range(len(st.sizes))]
        res = True
        for k in range(min(st.avoider_bias, total), total + 1):
            for dist in _distribute(frees, k):
                av = tuple(a + t for a, t in zip(st.avoider_claimed, dist))
                nxt = replace(st, avoider_claimed=av, to_move=RBOX_ENFORCER)
                if not avoider_cannot_escape(nxt):
                    res = False
                    break
            if not res:
                break
        memo[key] = res
        return res

    return avoider_cannot_escape(state)


def _distribute(caps: list[int], k: int):
    def rec(idx: int, left: int, acc: list[int]):
        if idx == len(caps):
            if left == 0:
                yield tuple(acc)
            return
        for take in range(min(left, caps[idx]) + 1):
            acc.append(take)
            yield from rec(idx + 1, left - take, acc)
            acc.pop()

    yield from rec(0, k, [])
