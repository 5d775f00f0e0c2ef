"""Anytime Monte Carlo tree search for combinatorial optimization."""
from .engine import (
    MCTS,
    EdgeStats,
    ObjectiveSense,
    ProblemAdapter,
    SearchNode,
    SearchParams,
    SolveReport,
    Status,
    rank_scores,
    select_child,
    solve,
    uct_value,
)

__all__ = [
    "MCTS",
    "EdgeStats",
    "ObjectiveSense",
    "ProblemAdapter",
    "SearchNode",
    "SearchParams",
    "SolveReport",
    "Status",
    "rank_scores",
    "select_child",
    "solve",
    "uct_value",
]
