"""Biased edge-claiming games on random graphs.

Simulator and strategy library for Maker-Breaker and monotone
Avoider-Enforcer games played on the edge set of G(n,p) boards, with
exact graph-property checkers, potential and box-game strategies, an
exact game-tree oracle for tiny boards, and a Monte Carlo harness for
critical-bias estimation.
"""

__version__ = "0.1.0"

from .graphs import Graph, GnpParams, sample_gnp
from .engine import (
    BoardState,
    Connectivity,
    Convention,
    ExplicitHypergraph,
    GameResult,
    GameSpec,
    Hamiltonicity,
    IsolateVertex,
    KConnectivity,
    MinDegree,
    PerfectMatching,
    Role,
    Strategy,
    apply_claim,
    check_winner,
    new_game,
    play,
)

__all__ = [
    "__version__",
    "Graph",
    "GnpParams",
    "sample_gnp",
    "BoardState",
    "Connectivity",
    "Convention",
    "ExplicitHypergraph",
    "GameResult",
    "GameSpec",
    "Hamiltonicity",
    "IsolateVertex",
    "KConnectivity",
    "MinDegree",
    "PerfectMatching",
    "Role",
    "Strategy",
    "apply_claim",
    "check_winner",
    "new_game",
    "play",
]
