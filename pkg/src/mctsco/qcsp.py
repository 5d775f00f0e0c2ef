"""Quay crane scheduling with non-crossing constraints.

Cranes ``0..m-1`` and bays ``0..n-1`` sit left to right. A solution of the
relaxation assigns a crane to every bay (``sigma``); the makespan follows
from letting every crane sweep its bays left to right, moving on as soon as
the crane to its right has cleared the way. Relaxation solutions are kept
only when their schedule also respects the spacing rules of the full model.

All times are integers.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .engine import ObjectiveSense


class InstanceError(ValueError):
    pass


@dataclass(frozen=True)
class QcspInstance:
    n: int
    m: int
    p: tuple

    def __post_init__(self):
        if not 1 <= self.m <= self.n:
            raise InstanceError(f"need 1 <= m <= n, got n={self.n} m={self.m}")
        if len(self.p) != self.n:
            raise InstanceError(f"expected {self.n} processing times, got {len(self.p)}")
        for x in self.p:
            if not isinstance(x, int) or x < 1:
                raise InstanceError(f"processing times must be positive integers, got {x!r}")

    @property
    def total(self) -> int:
        return sum(self.p)


def parse_instance(text: str) -> QcspInstance:
    lines = [(i, ln.split()) for i, ln in enumerate(text.splitlines(), 1) if ln.strip()]
    if len(lines) != 2:
        raise InstanceError(f"expected 2 non-empty lines, got {len(lines)}")
    (l1, head), (l2, body) = lines
    if len(head) != 2:
        raise InstanceError(f"line {l1}: expected 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise InstanceError(f"line {l1}: non-integer token") from None
    if not 1 <= m <= n:
        raise InstanceError(f"line {l1}: need 1 <= m <= n, got n={n} m={m}")
    if len(body) != n:
        raise InstanceError(f"line {l2}: expected {n} processing times, got {len(body)}")
    try:
        p = tuple(int(x) for x in body)
    except ValueError:
        raise InstanceError(f"line {l2}: non-integer token") from None
    if any(x < 1 for x in p):
        raise InstanceError(f"line {l2}: processing times must be positive")
    return QcspInstance(n, m, p)


def serialize_instance(inst: QcspInstance) -> str:
    return f"{inst.n} {inst.m}\n{' '.join(map(str, inst.p))}\n"


def generate_instance(n: int, m: int, seed: int, low: int = 30, high: int = 100) -> QcspInstance:
    """Processing times i.i.d. uniform integers in ``[low, high]``."""
    if not 1 <= m <= n:
        raise InstanceError(f"need 1 <= m <= n, got n={n} m={m}")
    rng = random.Random(seed)
    return QcspInstance(n, m, tuple(rng.randint(low, high) for _ in range(n)))


def _check_sigma(inst: QcspInstance, sigma: Sequence[int]) -> None:
    if len(sigma) != inst.n:
        raise InstanceError(f"sigma has length {len(sigma)}, expected {inst.n}")
    for k in sigma:
        if not 0 <= k < inst.m:
            raise InstanceError(f"crane index {k} out of range [0, {inst.m})")


def earliest_time_full(inst: QcspInstance, sigma: Sequence[int]):
    """Return ``(earliest, makespan)``; ``earliest[k][b]`` is when crane k can move past bay b."""
    _check_sigma(inst, sigma)
    n, m, p = inst.n, inst.m, inst.p
    et = [[0] * n for _ in range(m)]
    for b in range(n):
        for k in range(m - 1, -1, -1):
            et[k][b] = et[k][b - 1] if b >= 1 else 0
            if sigma[b] == k:
                et[k][b] += p[b]
            if k + 1 < m and et[k + 1][b] > et[k][b]:
                et[k][b] = et[k + 1][b]
    return et, et[0][n - 1]


def makespan(inst: QcspInstance, sigma: Sequence[int]) -> int:
    return earliest_time_full(inst, sigma)[1]


def schedule(inst: QcspInstance, sigma: Sequence[int]):
    """Per-bay ``(start, completion)`` of the move-as-soon-as-possible schedule."""
    et, _ = earliest_time_full(inst, sigma)
    out = []
    for b, k in enumerate(sigma):
        start = et[k][b - 1] if b >= 1 else 0
        out.append((start, start + inst.p[b]))
    return out


def feasibility_violation(inst: QcspInstance, sigma: Sequence[int]):
    """First pair of simultaneously worked bays that breaks the full model.

    Returns None when feasible, else ``(kind, b, b2)`` with kind ``"crossing"``
    (cranes out of order) or ``"spacing"`` (no room for the cranes between
    them). A crane too close to a ship end to leave room for its neighbours
    is checked last: it is a crossing when a bay on the far side belongs to
    a crane that should be on the near side, else ``("push", b, None)``.
    """
    n, m = inst.n, inst.m
    times = schedule(inst, sigma)
    for b in range(n):
        s1, c1 = times[b]
        for b2 in range(b + 1, n):
            s2, c2 = times[b2]
            if s1 < c2 and s2 < c1:
                if sigma[b] >= sigma[b2]:
                    return "crossing", b, b2
                if sigma[b2] - sigma[b] > b2 - b:
                    return "spacing", b, b2
    for b, k in enumerate(sigma):
        if k > b:
            # not enough bays on the left for cranes 0..k-1; a lower crane
            # serving a later bay would have to pass crane k
            for b2 in range(b + 1, n):
                if sigma[b2] < k:
                    return "crossing", b, b2
            return "push", b, None
        if n - b < m - k:
            for b2 in range(b - 1, -1, -1):
                if sigma[b2] > k:
                    return "crossing", b2, b
            return "push", b, None
    return None


def is_original_feasible(inst: QcspInstance, sigma: Sequence[int]) -> bool:
    return feasibility_violation(inst, sigma) is None


@dataclass(frozen=True)
class QcspState:
    b: int
    column: tuple  # earliest[k][b-1] for every crane, non-increasing in k
    slack: int  # sum over k >= 1 of column[0] - column[k]
    prefix: tuple | None  # cons list (rest, last value)


def _unwind(prefix) -> list:
    out = []
    while prefix is not None:
        prefix, v = prefix
        out.append(v)
    out.reverse()
    return out


class QcspAdapter:
    """Search-tree view of the relaxation: one crane choice per bay, left to right."""

    sense = ObjectiveSense.MINIMIZE

    def __init__(self, inst: QcspInstance):
        self.inst = inst
        self.depth = inst.n
        n, p = inst.n, inst.p
        self.suffix_max = [0] * (n + 1)
        self.suffix_sum = [0] * (n + 1)
        for b in range(n - 1, -1, -1):
            self.suffix_max[b] = max(p[b], self.suffix_max[b + 1])
            self.suffix_sum[b] = p[b] + self.suffix_sum[b + 1]

    def root_state(self) -> QcspState:
        return QcspState(0, (0,) * self.inst.m, 0, None)

    def apply_value(self, state: QcspState, crane: int) -> QcspState:
        m = self.inst.m
        pb = self.inst.p[state.b]
        col = list(state.column)
        for k in range(m - 1, -1, -1):
            if k == crane:
                col[k] += pb
            if k + 1 < m and col[k + 1] > col[k]:
                col[k] = col[k + 1]
        slack = (m - 1) * col[0] - sum(col[1:])
        return QcspState(state.b + 1, tuple(col), slack, (state.prefix, crane))

    def lower_bound(self, state: QcspState) -> int:
        b, col = state.b, state.column
        n, m = self.inst.n, self.inst.m
        if b == n:
            return col[0]
        lb1 = col[m - 1] + self.suffix_max[b]
        spread = self.suffix_sum[b] - state.slack
        lb2 = col[0] + max(0, -(-spread // min(m, n - b)))
        return max(lb1, lb2)

    bound = lower_bound

    def reduced_domain(self, state: QcspState) -> list:
        b, col = state.b, state.column
        n, m = self.inst.n, self.inst.m
        lo = max(0, m - (n - b))
        hi = min(m - 1, b)
        # crane k+1 is dominated by crane k when both can move past bay b-1 at
        # the same instant; only usable when k itself is allowed here
        return [k for k in range(lo, hi + 1) if k == lo or col[k - 1] != col[k]]

    def heuristic_complete(self, state: QcspState) -> tuple:
        n = self.inst.n
        while state.b < n:
            best, best_lb = None, None
            for k in self.reduced_domain(state):
                nxt = self.apply_value(state, k)
                lb = self.lower_bound(nxt)
                if best_lb is None or lb < best_lb:
                    best, best_lb = nxt, lb
            state = best
        return tuple(_unwind(state.prefix))

    def objective(self, sigma) -> int:
        return makespan(self.inst, sigma)

    def is_feasible(self, sigma) -> bool:
        return is_original_feasible(self.inst, sigma)

    def prefix(self, state: QcspState) -> list:
        return _unwind(state.prefix)


def parse_solution(text: str):
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if len(lines) != 2 or len(lines[0]) != 1:
        raise InstanceError("solution must be 'makespan' then the crane indices")
    try:
        return int(lines[0][0]), tuple(int(x) for x in lines[1])
    except ValueError:
        raise InstanceError("non-integer token in solution") from None


def serialize_solution(makespan_value: int, sigma: Sequence[int]) -> str:
    return f"{makespan_value}\n{' '.join(map(str, sigma))}\n"
