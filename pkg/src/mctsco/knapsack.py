"""0-1 knapsack: instances, generators and the search-tree adapter.

Items are kept sorted by profit/weight ratio (best first); the tree decides
item by item in that order. Ratios are compared by cross-multiplication and
the LP bound is an exact Fraction, so nothing here touches floating point.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Sequence

from .engine import ObjectiveSense


class InstanceError(ValueError):
    pass


@dataclass(frozen=True)
class KnapsackInstance:
    c: int
    profits: tuple  # sorted order
    weights: tuple  # sorted order
    original_index: tuple  # sorted position -> input position

    @property
    def n(self) -> int:
        return len(self.profits)

    def input_items(self) -> list:
        items = [None] * self.n
        for pos, orig in enumerate(self.original_index):
            items[orig] = (self.profits[pos], self.weights[pos])
        return items

    def to_input_order(self, x: Sequence) -> list:
        out = [0] * self.n
        for pos, orig in enumerate(self.original_index):
            out[orig] = int(x[pos])
        return out

    def from_input_order(self, bits: Sequence) -> list:
        return [int(bits[orig]) for orig in self.original_index]


def _ratio_cmp(a, b):
    (pa, wa), (pb, wb) = a[1], b[1]
    lhs, rhs = pa * wb, pb * wa
    return -1 if lhs > rhs else (1 if lhs < rhs else 0)


def sort_items(items: Sequence, c: int) -> KnapsackInstance:
    """Validate and sort ``(profit, weight)`` pairs by ratio, best first (stable)."""
    if c < 1:
        raise InstanceError("capacity must be a positive integer")
    if not items:
        raise InstanceError("instance has no items")
    for i, (p, w) in enumerate(items):
        if p < 1 or w < 1:
            raise InstanceError(f"item {i}: profit and weight must be positive, got ({p}, {w})")
        if w > c:
            raise InstanceError(f"item {i}: weight {w} exceeds capacity {c}")
    if sum(w for _, w in items) <= c:
        raise InstanceError("all items fit together; instance is trivial")
    order = sorted(enumerate(items), key=cmp_to_key(_ratio_cmp))
    return KnapsackInstance(
        c=c,
        profits=tuple(p for _, (p, _) in order),
        weights=tuple(w for _, (_, w) in order),
        original_index=tuple(i for i, _ in order),
    )


def parse_instance(text: str) -> KnapsackInstance:
    lines = [(i, ln.split()) for i, ln in enumerate(text.splitlines(), 1) if ln.strip()]
    if not lines:
        raise InstanceError("empty instance")
    l1, head = lines[0]
    if len(head) != 2:
        raise InstanceError(f"line {l1}: expected 'n c'")
    try:
        n, c = int(head[0]), int(head[1])
    except ValueError:
        raise InstanceError(f"line {l1}: non-integer token") from None
    if n < 1:
        raise InstanceError(f"line {l1}: item count must be positive")
    if len(lines) - 1 != n:
        raise InstanceError(f"expected {n} item lines, got {len(lines) - 1}")
    items = []
    for ln, tok in lines[1:]:
        if len(tok) != 2:
            raise InstanceError(f"line {ln}: expected 'p w'")
        try:
            items.append((int(tok[0]), int(tok[1])))
        except ValueError:
            raise InstanceError(f"line {ln}: non-integer token") from None
    return sort_items(items, c)


def serialize_instance(inst: KnapsackInstance) -> str:
    rows = [f"{inst.n} {inst.c}"] + [f"{p} {w}" for p, w in inst.input_items()]
    return "\n".join(rows) + "\n"


def gen_spanner(n: int, f: float, seed: int, spanner_size: int = 2,
                max_weight: int = 10**8, profit_offset: int = 10**7,
                max_multiplier: int = 10) -> KnapsackInstance:
    """Strongly correlated spanner instance.

    Spanner items get weights uniform in ``[1, max_weight]`` and profit
    ``weight + profit_offset``; the other items are random integer multiples
    of a random spanner item. Capacity is ``floor(f * total weight)``.
    """
    if n < spanner_size + 1:
        raise InstanceError(f"need n >= {spanner_size + 1}")
    frac = Fraction(str(f))
    if not 0 < frac < 1:
        raise InstanceError("f must lie strictly between 0 and 1")
    rng = random.Random(seed)
    spanner = []
    for _ in range(spanner_size):
        w = rng.randint(1, max_weight)
        spanner.append((w + profit_offset, w))
    items = list(spanner)
    for _ in range(n - spanner_size):
        p, w = spanner[rng.randrange(spanner_size)]
        k = rng.randint(1, max_multiplier)
        items.append((k * p, k * w))
    c = int(frac * sum(w for _, w in items))
    return sort_items(items, c)


EXP_GROUPS = 9


def exp_group_base(i: int, c: int = 10**10) -> int:
    """``(2**-i + 1e-4) * c`` in exact integer arithmetic."""
    base = Fraction(1, 2**i) * c + Fraction(c, 10**4)
    if base.denominator != 1:
        raise InstanceError(f"capacity {c} gives a non-integer base for group {i}")
    return int(base)


def gen_exp(n: int, seed: int, c: int = 10**10, noise: int = 300) -> KnapsackInstance:
    """Nine groups of near-unit-ratio items with exponentially shrinking size, plus small filler items."""
    if n < 3 * EXP_GROUPS + 3:
        raise InstanceError(f"need n >= {3 * EXP_GROUPS + 3} so every group is non-empty")
    rng = random.Random(seed)
    grouped = 2 * n // 3
    sizes = [grouped // EXP_GROUPS + (1 if g < grouped % EXP_GROUPS else 0) for g in range(EXP_GROUPS)]
    items = []
    for g, size in enumerate(sizes, 1):
        base = exp_group_base(g, c)
        for _ in range(size):
            items.append((base + rng.randint(1, noise), base + rng.randint(1, noise)))
    for _ in range(n - grouped):
        items.append((rng.randint(1, noise), rng.randint(1, noise)))
    return sort_items(items, c)


@dataclass(frozen=True)
class KnapsackState:
    level: int
    residual: int
    profit: int
    cursor: int  # items level..cursor-1 all fit wholly into residual
    taken_profit: int
    taken_weight: int
    prefix: tuple | None  # cons list (rest, last bit)


def _unwind(prefix) -> list:
    out = []
    while prefix is not None:
        prefix, v = prefix
        out.append(v)
    out.reverse()
    return out


class KnapsackAdapter:
    sense = ObjectiveSense.MAXIMIZE

    def __init__(self, inst: KnapsackInstance):
        self.inst = inst
        self.depth = inst.n

    def root_state(self) -> KnapsackState:
        return self._advance(KnapsackState(0, self.inst.c, 0, 0, 0, 0, None))

    def _advance(self, s: KnapsackState) -> KnapsackState:
        w = self.inst.weights
        n = self.inst.n
        cur, tp, tw = s.cursor, s.taken_profit, s.taken_weight
        if cur < s.level:
            cur, tp, tw = s.level, 0, 0
        while cur < n and tw + w[cur] <= s.residual:
            tp += self.inst.profits[cur]
            tw += w[cur]
            cur += 1
        if cur == s.cursor and tp == s.taken_profit:
            return s
        return KnapsackState(s.level, s.residual, s.profit, cur, tp, tw, s.prefix)

    def apply_value(self, s: KnapsackState, x: int) -> KnapsackState:
        k = s.level
        pk, wk = self.inst.profits[k], self.inst.weights[k]
        tp, tw, cur = s.taken_profit, s.taken_weight, s.cursor
        if cur > k:
            tp, tw = tp - pk, tw - wk
        else:
            cur = k + 1
        if x:
            if wk > s.residual:
                raise ValueError(f"item {k} does not fit")
            nxt = KnapsackState(k + 1, s.residual - wk, s.profit + pk, cur, tp, tw, (s.prefix, 1))
            return nxt  # the remaining taken items still fit: nothing to advance
        return self._advance(KnapsackState(k + 1, s.residual, s.profit, cur, tp, tw, (s.prefix, 0)))

    def break_item(self, s: KnapsackState) -> int:
        """Index of the first remaining item that does not fit wholly, or n."""
        return s.cursor

    def dantzig_bound(self, s: KnapsackState):
        full = s.profit + s.taken_profit
        b = s.cursor
        if b >= self.inst.n:
            return full
        rest = s.residual - s.taken_weight
        if rest == 0:
            return full
        return full + Fraction(self.inst.profits[b] * rest, self.inst.weights[b])

    bound = dantzig_bound

    def reduced_domain(self, s: KnapsackState) -> list:
        return [0, 1] if self.inst.weights[s.level] <= s.residual else [0]

    def heuristic_complete(self, s: KnapsackState) -> tuple:
        x = _unwind(s.prefix)
        residual = s.residual
        for w in self.inst.weights[s.level:]:
            if w <= residual:
                x.append(1)
                residual -= w
            else:
                x.append(0)
        return tuple(x)

    def objective(self, x) -> int:
        return sum(p for p, xi in zip(self.inst.profits, x) if xi)

    def weight(self, x) -> int:
        return sum(w for w, xi in zip(self.inst.weights, x) if xi)

    def is_feasible(self, x) -> bool:
        return len(x) == self.inst.n and self.weight(x) <= self.inst.c

    def prefix(self, s: KnapsackState) -> list:
        return _unwind(s.prefix)


def greedy_complete(inst: KnapsackInstance) -> tuple:
    adapter = KnapsackAdapter(inst)
    return adapter.heuristic_complete(adapter.root_state())


def parse_solution(text: str):
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if len(lines) != 2 or len(lines[0]) != 1:
        raise InstanceError("solution must be 'profit' then the item bits")
    bits = lines[1] if len(lines[1]) > 1 else list(lines[1][0])
    if any(b not in ("0", "1") for b in bits):
        raise InstanceError("item bits must be 0 or 1")
    try:
        profit = int(lines[0][0])
    except ValueError:
        raise InstanceError("non-integer profit") from None
    return profit, tuple(int(b) for b in bits)


def serialize_solution(profit: int, bits_input_order: Sequence[int]) -> str:
    return f"{profit}\n{' '.join(map(str, bits_input_order))}\n"
