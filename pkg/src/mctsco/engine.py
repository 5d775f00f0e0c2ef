"""Problem-agnostic anytime Monte Carlo tree search over search space trees.

Every level of the tree fixes one decision variable. An iteration descends
through the partial tree with a rank-based UCT rule, adds one node, checks
its bound against the incumbent (pruning the subtree when it cannot win),
completes the partial solution with the problem's own heuristic and
backpropagates the objective value. The run is split into ``depth`` stages;
after stage ``i`` only the ``beam_width`` most promising nodes at depth ``i``
remain traversable.
"""
from __future__ import annotations

import enum
import json
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Hashable, Protocol, Sequence


class ObjectiveSense(enum.Enum):
    MINIMIZE = "min"
    MAXIMIZE = "max"

    def better(self, a, b) -> bool:
        """True iff ``a`` is strictly better than ``b``."""
        return a < b if self is ObjectiveSense.MINIMIZE else a > b

    def cannot_improve(self, bound, incumbent) -> bool:
        # equal cannot improve: replacement is strict
        return bound >= incumbent if self is ObjectiveSense.MINIMIZE else bound <= incumbent

    @property
    def worst(self) -> float:
        return math.inf if self is ObjectiveSense.MINIMIZE else -math.inf


class Status(enum.Enum):
    ACTIVE = "active"
    DELETED = "deleted"
    BEAM_DROPPED = "beam_dropped"


@dataclass
class EdgeStats:
    """Statistics of the edge parent -> child, detached from any tree."""

    value: Hashable
    visits: int = 0
    total: Any = 0

    @property
    def average(self) -> float:
        return self.total / self.visits


class SearchNode:
    """A node of the partial search tree.

    ``visits`` and ``total`` double as the statistics of the incoming edge:
    every iteration that uses the edge also visits the node.
    """

    __slots__ = (
        "parent", "value", "depth", "state", "visits", "total",
        "bound", "status", "domain", "children", "expanded",
    )

    def __init__(self, parent: SearchNode | None, value, depth: int, state):
        self.parent = parent
        self.value = value
        self.depth = depth
        self.state = state
        self.visits = 0
        self.total = 0
        self.bound = None
        self.status = Status.ACTIVE
        self.domain: list | None = None
        self.children: dict = {}
        self.expanded = False

    @property
    def average(self) -> float:
        return self.total / self.visits

    @property
    def active(self) -> bool:
        return self.status is Status.ACTIVE

    def __repr__(self):
        return (f"SearchNode(depth={self.depth}, value={self.value!r}, visits={self.visits}, "
                f"status={self.status.value})")


class ProblemAdapter(Protocol):
    """What a problem has to provide to be searched.

    ``bound`` must bound every completion of ``state`` (below when minimizing,
    above when maximizing) and ``reduced_domain`` may only drop values that
    are dominated by a value it keeps.
    """

    sense: ObjectiveSense
    depth: int

    def root_state(self): ...
    def reduced_domain(self, state) -> list: ...
    def apply_value(self, state, value): ...
    def bound(self, state): ...
    def heuristic_complete(self, state) -> tuple: ...
    def objective(self, solution) -> Any: ...
    def is_feasible(self, solution) -> bool: ...


@dataclass
class SearchParams:
    time_budget: float = 1.0
    beam_width: int = 10
    seed: int = 0
    max_iterations: int | None = None

    def __post_init__(self):
        if self.time_budget <= 0:
            raise ValueError("time budget must be positive")
        if self.beam_width < 1:
            raise ValueError("beam width must be a positive integer")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be a positive integer")


@dataclass
class SolveReport:
    best_solution: tuple
    best_objective: Any
    root_bound: Any
    iterations: int = 0
    iterations_completed: int = 0
    iterations_pruned: int = 0
    infeasible_completions: int = 0
    exhausted: bool = False
    beam_dropped: int = 0
    per_stage_elapsed: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def found(self) -> bool:
        return len(self.best_solution) > 0

    @property
    def proven_optimal(self) -> bool:
        # beam drops cut the tree without proof, so exhaustion only proves
        # optimality when the beam never removed anything
        return self.exhausted and self.beam_dropped == 0 and self.found

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "best_solution": list(self.best_solution),
            "best_objective": _plain(self.best_objective),
            "root_bound": _plain(self.root_bound),
            "iterations": self.iterations,
            "iterations_completed": self.iterations_completed,
            "iterations_pruned": self.iterations_pruned,
            "infeasible_completions": self.infeasible_completions,
            "exhausted": self.exhausted,
            "beam_dropped": self.beam_dropped,
        }
        if timing:
            d["seconds"] = self.seconds
            d["per_stage_elapsed"] = list(self.per_stage_elapsed)
        return d

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing=timing), sort_keys=True)


def _plain(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def rank_scores(edges: Sequence, sense: ObjectiveSense) -> dict:
    """Normalized rank score per edge value.

    ``edges`` is in domain order and each item exposes ``value`` and
    ``average``. Edges are ranked from bad to good (rank 1 is worst); equal
    averages keep domain order, the earlier one ranking lower.
    """
    if not edges:
        raise ValueError("rank_scores needs at least one visited edge")
    avgs = [e.average for e in edges]
    if sense is ObjectiveSense.MINIMIZE:
        order = sorted(range(len(edges)), key=lambda i: (-avgs[i], i))
    else:
        order = sorted(range(len(edges)), key=lambda i: (avgs[i], i))
    k = len(edges)
    rank_sum = k * (k + 1) / 2
    return {edges[i].value: (rank + 1) / rank_sum for rank, i in enumerate(order)}


def uct_value(parent_visits: int, child_visits: int, score: float) -> float:
    if child_visits < 1:
        raise ValueError("uct_value is undefined for unvisited children")
    return score + math.sqrt(2.0 * math.log(parent_visits) / child_visits)


def select_child(node: SearchNode, sense: ObjectiveSense, rng: random.Random,
                 allow_new: bool = True):
    """Pick the value to descend along, or None when nothing is traversable.

    Unmaterialized domain values count as unvisited children (only when
    ``allow_new``); materialized children must be ACTIVE to be eligible.
    """
    unvisited = []
    visited = []
    for v in node.domain:
        child = node.children.get(v)
        if child is None:
            if allow_new:
                unvisited.append(v)
        elif child.status is Status.ACTIVE:
            visited.append(child)
    k1, k2 = len(unvisited), len(visited)
    if k1 + k2 == 0:
        return None
    if k1 and (k2 == 0 or rng.random() < k1 / (k1 + k2)):
        return unvisited[rng.randrange(k1)] if k1 > 1 else unvisited[0]
    if k2 == 1:
        return visited[0].value
    scores = rank_scores(visited, sense)
    best, best_val = None, -math.inf
    for child in visited:
        u = uct_value(node.visits, child.visits, scores[child.value])
        if u > best_val:
            best, best_val = child.value, u
    return best


def backpropagate(path: Sequence[SearchNode], objective) -> None:
    for node in path:
        node.visits += 1
        node.total += objective


class MCTS:
    """One search tree bound to one adapter. Not thread-safe."""

    ABORTED = "aborted"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"

    def __init__(self, adapter: ProblemAdapter, params: SearchParams):
        self.adapter = adapter
        self.params = params
        self.sense = adapter.sense
        self.rng = random.Random(params.seed)
        self.root = SearchNode(None, None, 0, adapter.root_state())
        self.best_solution: tuple = ()
        self.best_objective = self.sense.worst
        self.exhausted = False
        # depths <= beam_depth accept no new nodes; frontier holds the survivors there
        self.beam_depth = 0
        self.frontier = [self.root]
        self.iterations = 0
        self.completed = 0
        self.pruned = 0
        self.infeasible = 0
        self.beam_dropped = 0
        self.trace: list = []

    @property
    def has_incumbent(self) -> bool:
        return len(self.best_solution) > 0

    def _cannot_improve(self, node: SearchNode) -> bool:
        return self.has_incumbent and self.sense.cannot_improve(node.bound, self.best_objective)

    def _has_available_child(self, node: SearchNode) -> bool:
        if node.domain is None:
            return True
        allow_new = node.depth + 1 > self.beam_depth
        for v in node.domain:
            child = node.children.get(v)
            if child is None:
                if allow_new:
                    return True
            elif child.status is Status.ACTIVE:
                return True
        return False

    def delete(self, node: SearchNode) -> None:
        """Delete ``node`` and every ancestor left without a traversable child."""
        node.status = Status.DELETED
        parent = node.parent
        while parent is not None and parent.status is Status.ACTIVE:
            if self._has_available_child(parent):
                return
            parent.status = Status.DELETED
            node, parent = parent, parent.parent
        if self.root.status is not Status.ACTIVE:
            self.exhausted = True

    def run_iteration(self):
        """Run one selection/expansion/simulation/backpropagation pass.

        Returns ``(outcome, solution, objective)`` where outcome is one of
        ABORTED, FEASIBLE, INFEASIBLE. Aborted passes touch no statistics.
        """
        if self.root.status is not Status.ACTIVE:
            self.exhausted = True
            return self.ABORTED, None, None
        adapter = self.adapter
        self.iterations += 1
        node = self.root
        path = [node]
        while True:
            if node.bound is None:
                node.bound = adapter.bound(node.state)
                if self._cannot_improve(node):
                    return self._abort(node)
                break
            if self._cannot_improve(node):
                return self._abort(node)
            if node.domain is None:
                node.domain = adapter.reduced_domain(node.state)
            value = select_child(node, self.sense, self.rng, node.depth + 1 > self.beam_depth)
            if value is None:
                return self._abort(node)
            child = node.children.get(value)
            if child is None:
                child = SearchNode(node, value, node.depth + 1, adapter.apply_value(node.state, value))
                node.children[value] = child
            node = child
            path.append(node)

        solution = adapter.heuristic_complete(node.state)
        objective = adapter.objective(solution)
        feasible = adapter.is_feasible(solution)
        node.expanded = True
        backpropagate(path, objective)
        self.completed += 1
        if feasible:
            if not self.has_incumbent or self.sense.better(objective, self.best_objective):
                self.best_solution = tuple(solution)
                self.best_objective = objective
                self.trace.append((self.iterations, objective))
        else:
            self.infeasible += 1
        if node.depth == adapter.depth:
            # a complete assignment has nothing left to explore
            self.delete(node)
        return (self.FEASIBLE if feasible else self.INFEASIBLE), solution, objective

    def _abort(self, node: SearchNode):
        self.pruned += 1
        self.delete(node)
        return self.ABORTED, None, None

    def apply_beam(self, depth: int) -> bool:
        """Keep the ``beam_width`` best visited nodes at ``depth``.

        Returns False (and changes nothing) when no reachable visited node
        exists there yet.
        """
        if depth != self.beam_depth + 1:
            raise ValueError(f"beam must advance one level at a time (at {self.beam_depth})")
        parents = [p for p in self.frontier if self._reachable(p)]
        candidates = [c for p in parents for c in p.children.values()
                      if c.status is Status.ACTIVE and c.visits >= 1]
        if not candidates:
            return False
        # candidates are in creation order per parent; stable sort keeps it on ties
        if self.sense is ObjectiveSense.MINIMIZE:
            candidates.sort(key=lambda c: c.average)
        else:
            candidates.sort(key=lambda c: -c.average)
        survivors = candidates[: self.params.beam_width]
        for c in candidates[self.params.beam_width:]:
            c.status = Status.BEAM_DROPPED
            self.beam_dropped += 1
        # unmaterialized children of the survivors' parents are dropped too
        self.beam_dropped += sum(1 for p in parents for v in p.domain or () if v not in p.children)
        self.beam_depth = depth
        self.frontier = survivors
        return True

    def _reachable(self, node: SearchNode) -> bool:
        while node is not None:
            if node.status is not Status.ACTIVE:
                return False
            node = node.parent
        return True

    def _advance_beam(self, stage: int) -> None:
        while self.beam_depth < stage:
            if not self.apply_beam(self.beam_depth + 1):
                break

    def solve(self) -> SolveReport:
        params = self.params
        d = self.adapter.depth
        if d < 1:
            raise ValueError("adapter depth must be at least 1")
        per_stage_cap = None
        if params.max_iterations is not None:
            per_stage_cap = -(-params.max_iterations // d)
        start = time.perf_counter()
        stage_elapsed = []
        for stage in range(1, d + 1):
            stage_start = time.perf_counter()
            stage_end = start + params.time_budget * stage / d
            count = 0
            while not self.exhausted:
                if per_stage_cap is not None:
                    if count >= per_stage_cap or self.iterations >= params.max_iterations:
                        break
                elif time.perf_counter() >= stage_end:
                    break
                self.run_iteration()
                count += 1
            stage_elapsed.append(time.perf_counter() - stage_start)
            if self.exhausted:
                break
            if per_stage_cap is not None and self.iterations >= params.max_iterations:
                break
            self._advance_beam(stage)
        return SolveReport(
            best_solution=self.best_solution,
            best_objective=self.best_objective,
            root_bound=self.root.bound,
            iterations=self.iterations,
            iterations_completed=self.completed,
            iterations_pruned=self.pruned,
            infeasible_completions=self.infeasible,
            exhausted=self.exhausted,
            beam_dropped=self.beam_dropped,
            per_stage_elapsed=stage_elapsed,
            seconds=time.perf_counter() - start,
        )


def solve(adapter: ProblemAdapter, params: SearchParams) -> SolveReport:
    return MCTS(adapter, params).solve()
