"""Exact reference solvers for tests. Slow on purpose; none of them use the
adapters' bounds or domain reductions."""
from __future__ import annotations

import bisect
import itertools
import math

import numpy as np

from .knapsack import KnapsackInstance
from .qcsp import QcspInstance, earliest_time_full, is_original_feasible


class GuardError(RuntimeError):
    """The oracle refuses an instance that is too large for it."""


def qcsp_brute_force(inst: QcspInstance, limit: int = 10**8):
    """Enumerate all ``m**n`` crane assignments.

    Returns ``(relax_opt, original_opt, relax_argmin, original_argmin)``;
    ``original_opt`` is None if no assignment is feasible for the full model.
    """
    if inst.m ** inst.n > limit:
        raise GuardError(f"{inst.m}**{inst.n} assignments exceed the limit {limit}")
    relax = orig = None
    relax_arg = orig_arg = None
    for sigma in itertools.product(range(inst.m), repeat=inst.n):
        _, span = earliest_time_full(inst, sigma)
        if relax is None or span < relax:
            relax, relax_arg = span, sigma
        if (orig is None or span < orig) and is_original_feasible(inst, sigma):
            orig, orig_arg = span, sigma
    return relax, orig, relax_arg, orig_arg


def simulate_ticks(inst: QcspInstance, sigma, limit: int = 10**6):
    """Play the move-as-soon-as-possible schedule one time unit at a time.

    A crane walks right through bays it does not own, but never past a bay
    the crane to its right has not yet moved past; it starts its next own
    bay the instant it stands in front of it. Returns ``(makespan, ok)``
    where ``ok`` says that at every tick the working cranes stood in
    increasing bay order, with a free bay for every idle crane between
    two working ones and room for the cranes beyond the ship's ends.
    """
    n, m, p = inst.n, inst.m, inst.p
    if sum(p) > limit:
        raise GuardError(f"total processing time {sum(p)} exceeds {limit} ticks")
    own = [[b for b in range(n) if sigma[b] == k] for k in range(m)]
    nxt = [0] * m  # index into own[k]
    passed = [-1] * m  # last bay crane k has moved past
    busy = [None] * m  # (bay, finish tick)
    ok = True
    t = 0
    while True:
        for k in range(m):
            if busy[k] is not None and busy[k][1] == t:
                busy[k] = None
                nxt[k] += 1
        # right to left so a crane sees its neighbour's moves at this instant
        for k in range(m - 1, -1, -1):
            if busy[k] is not None:
                continue
            limit_bay = n - 1 if k == m - 1 else passed[k + 1]
            target = own[k][nxt[k]] if nxt[k] < len(own[k]) else n
            passed[k] = max(passed[k], min(target - 1, limit_bay))
            if target < n and passed[k] == target - 1:
                busy[k] = (target, t + p[target])
        if all(b is None for b in busy) and passed[0] == n - 1:
            return t, ok
        working = [(k, busy[k][0]) for k in range(m) if busy[k] is not None]
        for k, bay in working:
            if bay < k or (n - 1 - bay) < (m - 1 - k):
                ok = False
        for (k1, b1), (k2, b2) in itertools.combinations(working, 2):
            if not (b1 < b2 and k2 - k1 <= b2 - b1):
                ok = False
        t += 1


def tick_feasible(inst: QcspInstance, sigma) -> bool:
    return simulate_ticks(inst, sigma)[1]


def knapsack_dp(inst: KnapsackInstance, limit: int = 10**9):
    """Capacity-indexed DP. Returns ``(optimum, x)`` with x in sorted item order."""
    n, c = inst.n, inst.c
    if n * c > limit:
        raise GuardError(f"n*c = {n * c} exceeds the limit {limit}")
    best = np.zeros(c + 1, dtype=np.int64)
    rows = []  # bit-packed "item i taken at capacity j" table
    row = np.zeros(c + 1, dtype=bool)
    for p, w in zip(inst.profits, inst.weights):
        cand = best[: c + 1 - w] + p
        better = cand > best[w:]
        row[:w] = False
        row[w:] = better
        rows.append(np.packbits(row))
        best[w:] = np.where(better, cand, best[w:])
    x = [0] * n
    cap = c
    for i in range(n - 1, -1, -1):
        if (rows[i][cap >> 3] >> (7 - (cap & 7))) & 1:
            x[i] = 1
            cap -= inst.weights[i]
    return int(best[c]), tuple(x)


def knapsack_ratio_groups(inst: KnapsackInstance, max_groups: int = 2, limit: int = 10**6):
    """Exact optimum for instances whose items are multiples of at most two base items.

    Every item ``(p, w)`` is reduced to its primitive pair ``(p/g, w/g)``,
    ``g = gcd(p, w)``. Items sharing a primitive pair are interchangeable up
    to their multiplier, so each group only contributes a subset sum of
    multipliers. Works at capacities far beyond the reach of the DP.
    """
    groups = {}
    for p, w in zip(inst.profits, inst.weights):
        g = math.gcd(p, w)
        groups.setdefault((p // g, w // g), []).append(g)
    if len(groups) > max_groups:
        raise GuardError(f"{len(groups)} ratio groups exceed the limit {max_groups}")
    sums = []
    for mults in groups.values():
        unit = math.gcd(*mults)
        reach = {0}
        for a in mults:
            reach |= {s + a // unit for s in reach}
            if len(reach) > limit:
                raise GuardError("too many distinct multiplier sums")
        sums.append(sorted(s * unit for s in reach))
    bases = list(groups)
    if len(bases) == 1:
        (p1, w1), = bases
        return max(a * p1 for a in sums[0] if a * w1 <= inst.c)
    (p1, w1), (p2, w2) = bases
    best = 0
    for a in sums[0]:
        rest = inst.c - a * w1
        if rest < 0:
            break
        b = sums[1][bisect.bisect_right(sums[1], rest // w2) - 1]
        best = max(best, a * p1 + b * p2)
    return best
