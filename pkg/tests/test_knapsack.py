import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mctsco.knapsack import (EXP_GROUPS, InstanceError, KnapsackAdapter, exp_group_base, gen_exp,
                             gen_spanner, greedy_complete, parse_instance, parse_solution,
                             serialize_instance, serialize_solution, sort_items)
from mctsco.oracles import knapsack_dp

TWO = sort_items([(6, 5), (5, 5)], 8)


def random_instance(rng, n_max=20, c_max=500):
    while True:
        n = rng.randint(2, n_max)
        c = rng.randint(5, c_max)
        items = [(rng.randint(1, 100), rng.randint(1, c)) for _ in range(n)]
        if sum(w for _, w in items) > c:
            return sort_items(items, c)


def test_sort_order():
    assert TWO.profits == (6, 5) and TWO.original_index == (0, 1)
    swapped = sort_items([(5, 5), (6, 5)], 8)
    assert swapped.profits == (6, 5) and swapped.original_index == (1, 0)
    tie = sort_items([(2, 1), (4, 2)], 2)
    assert tie.original_index == (0, 1)


def test_sort_rejects_standing_assumption_violations():
    with pytest.raises(InstanceError):
        sort_items([(5, 20)], 10)
    with pytest.raises(InstanceError):
        sort_items([(1, 2), (1, 3)], 10)
    with pytest.raises(InstanceError):
        sort_items([(0, 2), (1, 3)], 3)


def test_dantzig_examples():
    a = KnapsackAdapter(TWO)
    root = a.root_state()
    assert a.break_item(root) == 1
    assert a.dantzig_bound(root) == 9
    taken = a.apply_value(root, 1)
    # residual 3, item 1 does not fit: bound is just the fraction of it
    assert a.dantzig_bound(taken) == 6 + Fraction(5 * 3, 5)
    full = sort_items([(4, 4), (3, 4)], 4)
    fa = KnapsackAdapter(full)
    s = fa.apply_value(fa.root_state(), 1)
    assert s.residual == 0 and fa.dantzig_bound(s) == 4
    rest_fit = sort_items([(3, 1), (2, 1), (1, 8)], 9)
    ra = KnapsackAdapter(rest_fit)
    s = ra.apply_value(ra.root_state(), 0)
    assert ra.dantzig_bound(s) == 3
    assert ra.objective(ra.heuristic_complete(s)) == 3


def test_domain_examples():
    inst = sort_items([(6, 5), (5, 5)], 9)
    a = KnapsackAdapter(inst)
    s = a.apply_value(a.root_state(), 1)  # residual 4
    assert s.residual == 4 and a.reduced_domain(s) == [0]
    exact = sort_items([(5, 5), (4, 5)], 5)
    e = KnapsackAdapter(exact)
    assert e.reduced_domain(e.root_state()) == [0, 1]
    s = e.apply_value(e.root_state(), 1)
    assert e.reduced_domain(s) == [0]
    with pytest.raises(ValueError):
        e.apply_value(s, 1)


def test_greedy_examples():
    a = KnapsackAdapter(TWO)
    x = greedy_complete(TWO)
    assert x == (1, 0) and a.objective(x) == 6
    assert knapsack_dp(TWO)[0] == 6


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_bound_dominates_dp_and_greedy(seed):
    rng = random.Random(seed)
    inst = random_instance(rng)
    a = KnapsackAdapter(inst)
    opt, x = knapsack_dp(inst)
    root = a.root_state()
    bound = a.dantzig_bound(root)
    greedy = a.objective(greedy_complete(inst))
    assert greedy <= opt <= bound
    assert a.objective(x) == opt and a.is_feasible(x)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_incremental_state_matches_from_scratch(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, n_max=12, c_max=100)
    a = KnapsackAdapter(inst)
    s = a.root_state()
    last_cursor = s.cursor
    while s.level < inst.n:
        v = rng.choice(a.reduced_domain(s))
        prev_cursor = s.cursor
        s = a.apply_value(s, v)
        if v == 0:
            assert s.cursor >= prev_cursor
        # from-scratch LP value over the remaining items
        rest, val = s.residual, Fraction(s.profit)
        for p, w in zip(inst.profits[s.level:], inst.weights[s.level:]):
            if w <= rest:
                rest -= w
                val += p
            else:
                val += Fraction(p * rest, w)
                break
        assert a.dantzig_bound(s) == val
        last_cursor = s.cursor
    assert last_cursor <= inst.n


def test_bound_valid_over_all_subtrees():
    rng = random.Random(7)
    for _ in range(30):
        inst = random_instance(rng, n_max=8, c_max=60)
        a = KnapsackAdapter(inst)
        stack = [a.root_state()]
        while stack:
            s = stack.pop()
            prefix = a.prefix(s)
            best = max(a.objective(prefix + list(r))
                       for r in itertools.product([0, 1], repeat=inst.n - s.level)
                       if a.is_feasible(prefix + list(r)))
            assert a.dantzig_bound(s) >= best
            if s.level < inst.n:
                stack.extend(a.apply_value(s, v) for v in a.reduced_domain(s))


def test_spanner_generator():
    for seed in range(5):
        inst = gen_spanner(50, 0.25, seed)
        items = inst.input_items()
        spanners = items[:2]
        assert all(p == w + 10**7 for p, w in spanners)
        for p, w in items:
            assert any(p % sp == 0 and w % sw == 0 and p // sp == w // sw and 1 <= p // sp <= 10
                       for sp, sw in spanners)
        assert inst.c == sum(w for _, w in items) // 4
    assert gen_spanner(200, 0.5, 3) == gen_spanner(200, 0.5, 3)
    with pytest.raises(InstanceError):
        gen_spanner(2, 0.5, 0)
    with pytest.raises(InstanceError):
        gen_spanner(10, 1.0, 0)


def test_exp_generator():
    c = 10**10
    assert exp_group_base(1, c) == 5_001_000_000
    inst = gen_exp(100, 3)
    assert inst.c == c and inst.n == 100
    items = inst.input_items()
    group1 = items[:8]  # 66 grouped items over 9 groups: the first three get 8
    assert all(5_001_000_001 <= w <= 5_001_000_300 for _, w in group1)
    start = 0
    for g in range(1, EXP_GROUPS + 1):
        size = 66 // 9 + (1 if g - 1 < 66 % 9 else 0)
        base = exp_group_base(g, c)
        if g <= 3:
            assert Fraction(300, base) < Fraction(3, 10**7)
        for p, w in items[start:start + size]:
            assert base < p <= base + 300 and base < w <= base + 300
            assert abs(Fraction(p, w) - 1) < Fraction(300, base)
        # 2**g full copies would overflow the knapsack
        assert 2**g * (base + 1) > c
        start += size
    assert all(p <= 300 and w <= 300 for p, w in items[66:])
    assert gen_exp(100, 3) == inst
    with pytest.raises(InstanceError):
        gen_exp(20, 0)


def test_parse_and_serialize():
    assert parse_instance("2 8\n6 5\n5 5\n") == TWO
    inst = gen_spanner(30, 0.5, 2)
    text = serialize_instance(inst)
    assert serialize_instance(parse_instance(text)) == text
    for bad in ["1 10\n5 20\n", "2 8\n6 5\n", "2 8\n6 5\n5 x\n", "2 8\n6 0\n5 5\n", "", "2\n1 1\n1 1\n"]:
        with pytest.raises(InstanceError):
            parse_instance(bad)


def test_solution_format():
    text = serialize_solution(6, [1, 0])
    assert text == "6\n1 0\n"
    assert parse_solution(text) == (6, (1, 0))
    assert parse_solution("6\n10\n") == (6, (1, 0))
    with pytest.raises(InstanceError):
        parse_solution("6\n1 2\n")


def test_input_order_mapping():
    inst = sort_items([(1, 5), (9, 3), (4, 4)], 8)
    x_sorted = (1, 0, 1)
    bits = inst.to_input_order(x_sorted)
    assert inst.from_input_order(bits) == list(x_sorted)
