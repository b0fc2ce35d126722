"""Win criteria over set families and the potential strategies they induce.

A :class:`Hypergraph` is a ground set plus a family of target sets.  Two
classical sufficient conditions are computed as plain sums:

* breaker criterion: sum over F of (1+b)^(-|F|/a) < 1/(1+b) guarantees
  the blocking side a win in the (a,b) game;
* avoider criterion: sum over F of (1+1/a)^(-|F|) < (1+1/a)^(-a)
  guarantees the avoiding side a win at any opponent bias.

The induced strategies score each element by the weight of the live sets
containing it (a set is live while the relevant opponent owns none of
it) and claim greedily: the blocker maximizes the potential drop, the
avoider minimizes the potential rise, ties broken by lowest element id.
Both derive every quantity from the visible board state, so they are
safe to memoize against in adversary searches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .engine import (
    BoardState,
    Convention,
    ExplicitHypergraph,
    GameSpec,
    MovePolicy,
    Role,
    Strategy,
    minimal_claim_size,
)
from .graphs import Edge, Graph, edge

__all__ = [
    "Hypergraph",
    "beck_criterion",
    "avoider_criterion",
    "BreakerPotential",
    "AvoiderPotential",
    "hypergraph_to_text",
    "hypergraph_from_text",
    "line_board",
    "family_on_edges",
]


@dataclass(frozen=True)
class Hypergraph:
    """Ground set 0..m-1 with a normalized family of target sets.

    Normalization drops duplicate sets and supersets (a superset can
    only be completed after one of its subsets already was, so the games
    coincide).  Empty sets are rejected.
    """

    ground_size: int
    family: tuple[frozenset[int], ...]

    @staticmethod
    def build(ground_size: int, sets: Iterable[Iterable[int]]) -> "Hypergraph":
        fam = {frozenset(s) for s in sets}
        if any(len(f) == 0 for f in fam):
            raise ValueError("empty target set not allowed")
        for f in fam:
            for x in f:
                if not (0 <= x < ground_size):
                    raise ValueError(f"element {x} outside ground set")
        minimal = [f for f in fam if not any(g < f for g in fam)]
        minimal.sort(key=lambda f: (len(f), sorted(f)))
        return Hypergraph(ground_size, tuple(minimal))


def beck_criterion(h: Hypergraph, a: int, b: int) -> tuple[bool, float]:
    """(satisfied, sum) of the blocking-side criterion for the (a,b) game."""
    if a < 1 or b < 1:
        raise ValueError("biases must be >= 1")
    total = math.fsum((1 + b) ** (-len(F) / a) for F in h.family)
    return total < 1.0 / (1 + b), total


def avoider_criterion(h: Hypergraph, a: int, b: int | None = None
                      ) -> tuple[bool, float]:
    """(satisfied, sum) of the avoiding-side criterion; the threshold
    depends only on the avoider's own bias a (b accepted for signature
    symmetry)."""
    if a < 1:
        raise ValueError("a must be >= 1")
    base = 1 + 1 / a
    total = math.fsum(base ** (-len(F)) for F in h.family)
    return total < base ** (-a), total


# --- board adapters -----------------------------------------------------


def line_board(m: int) -> Graph:
    """A board with m edges and no graph structure that matters: the
    path 0-1-...-m, whose edge i is (i, i+1).  Used to play abstract
    set-family games through the regular engine."""
    if m < 1:
        raise ValueError("need at least one element")
    return Graph(m + 1, ((i, i + 1) for i in range(m)))


def family_on_edges(h: Hypergraph) -> ExplicitHypergraph:
    """The hypergraph as an engine target on the line board."""
    return ExplicitHypergraph(tuple(
        frozenset((x, x + 1) for x in F) for F in h.family))


def _family_ids(spec: GameSpec, g: Graph) -> tuple[tuple[int, ...], ...]:
    t = spec.target
    if not isinstance(t, ExplicitHypergraph):
        raise ValueError("potential strategies need an explicit target family")
    idx = g.edge_index
    return tuple(tuple(sorted(idx[edge(*e)] for e in F)) for F in t.family)


# --- potential strategies -------------------------------------------------


class BreakerPotential(Strategy):
    """Blocking side: claim the elements whose removal most decreases
    sum over live sets of (1+b)^(-free(F)/a).

    A set dies once the blocker owns any of its elements; the builder
    claiming into a set shrinks its free count and raises its weight.
    """

    markov = True

    def __init__(self, a: int = 1, b: int = 1):
        if a < 1 or b < 1:
            raise ValueError("biases must be >= 1")
        self.a = a
        self.b = b
        self.name = "potential-blocker"

    @property
    def params(self) -> dict:
        return {"a": self.a, "b": self.b}

    def new_policy(self, spec: GameSpec, g: Graph, role: Role, rng) -> MovePolicy:
        fam = _family_ids(spec, g)
        a, b = self.a, self.b
        own_code = 1 if role in (Role.MAKER, Role.AVOIDER) else 2
        opp_code = 3 - own_code

        class P(MovePolicy):
            def choose(self, state: BoardState) -> Sequence[int]:
                own = state.own
                k = minimal_claim_size(spec, role, state.free_count)
                taken: list[int] = []
                taken_set: set[int] = set()
                for _ in range(k):
                    weights: dict[int, float] = {}
                    for F in fam:
                        if any(own[i] == own_code or i in taken_set for i in F):
                            continue  # dead
                        free = sum(1 for i in F
                                   if own[i] == 0 and i not in taken_set)
                        w = (1 + b) ** (-free / a)
                        for i in F:
                            if own[i] == 0 and i not in taken_set:
                                weights[i] = weights.get(i, 0.0) + w
                    best = None
                    for i in range(len(own)):
                        if own[i] == 0 and i not in taken_set:
                            score = weights.get(i, 0.0)
                            if best is None or score > best[0]:
                                best = (score, i)
                    if best is None:
                        break
                    taken.append(best[1])
                    taken_set.add(best[1])
                return taken

        return P()


class AvoiderPotential(Strategy):
    """Avoiding side: claim exactly the minimal number of elements,
    picking each to minimize the rise of sum over live sets of
    (1+1/a)^(-unclaimed-by-me(F)).

    A set is dead (harmless) once the opponent owns any element of it.
    By default the family comes from the game's explicit target; pass
    ``family`` (edge sets) to avoid a different family than the game is
    scored on, as the forcing reductions do.
    """

    markov = True

    def __init__(self, a: int = 1,
                 family: tuple[frozenset[Edge], ...] | None = None):
        if a < 1:
            raise ValueError("a must be >= 1")
        self.a = a
        self.family = family
        self.name = "potential-avoider"

    @property
    def params(self) -> dict:
        return {"a": self.a}

    def new_policy(self, spec: GameSpec, g: Graph, role: Role, rng) -> MovePolicy:
        if self.family is None:
            fam = _family_ids(spec, g)
        else:
            idx = g.edge_index
            fam = tuple(tuple(sorted(idx[edge(*e)] for e in F))
                        for F in self.family)
        a = self.a
        base = 1 + 1 / a
        own_code = 1 if role in (Role.MAKER, Role.AVOIDER) else 2
        opp_code = 3 - own_code

        class P(MovePolicy):
            def choose(self, state: BoardState) -> Sequence[int]:
                own = state.own
                k = minimal_claim_size(spec, role, state.free_count)
                taken: list[int] = []
                taken_set: set[int] = set()
                for _ in range(k):
                    danger: dict[int, float] = {}
                    for F in fam:
                        if any(own[i] == opp_code for i in F):
                            continue  # dead
                        mine = sum(1 for i in F
                                   if own[i] == own_code or i in taken_set)
                        w = base ** (-(len(F) - mine))
                        for i in F:
                            if own[i] == 0 and i not in taken_set:
                                danger[i] = danger.get(i, 0.0) + w
                    best = None
                    for i in range(len(own)):
                        if own[i] == 0 and i not in taken_set:
                            score = danger.get(i, 0.0)
                            if best is None or score < best[0]:
                                best = (score, i)
                    if best is None:
                        break
                    taken.append(best[1])
                    taken_set.add(best[1])
                return taken

        return P()


# --- text format ----------------------------------------------------------


def hypergraph_to_text(h: Hypergraph) -> str:
    """Header ``elements <m>`` then one set per line of element ids."""
    lines = [f"elements {h.ground_size}"]
    lines.extend(" ".join(str(x) for x in sorted(F)) for F in h.family)
    return "\n".join(lines) + "\n"


def hypergraph_from_text(text: str) -> Hypergraph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("elements "):
        raise ValueError("hypergraph text must start with 'elements <m>'")
    m = int(lines[0].split()[1])
    sets = [[int(tok) for tok in ln.split()] for ln in lines[1:]]
    return Hypergraph.build(m, sets)
