"""Glue between files on disk and the two problem adapters."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import knapsack, qcsp
from .engine import SearchParams, SolveReport, solve

PROBLEMS = ("qcsp", "knapsack")
SUFFIXES = {".qcsp": "qcsp", ".kp": "knapsack", ".knap": "knapsack", ".knapsack": "knapsack"}


def infer_problem(path, problem: str | None = None) -> str:
    if problem:
        if problem not in PROBLEMS:
            raise ValueError(f"unknown problem {problem!r}")
        return problem
    suffix = Path(path).suffix.lower()
    if suffix not in SUFFIXES:
        raise ValueError(f"cannot tell the problem from {path!r}; pass --problem")
    return SUFFIXES[suffix]


def parse(problem: str, text: str):
    return qcsp.parse_instance(text) if problem == "qcsp" else knapsack.parse_instance(text)


def load(path, problem: str | None = None):
    problem = infer_problem(path, problem)
    return problem, parse(problem, Path(path).read_text())


def make_adapter(problem: str, inst):
    return qcsp.QcspAdapter(inst) if problem == "qcsp" else knapsack.KnapsackAdapter(inst)


def gap_percent(objective, root_bound) -> float:
    """Relative distance between an objective and the root bound, in percent."""
    if root_bound == 0:
        return 0.0
    return float(100 * abs(Fraction(objective) - Fraction(root_bound)) / abs(Fraction(root_bound)))


def run(problem: str, inst, params: SearchParams) -> SolveReport:
    return solve(make_adapter(problem, inst), params)


def solution_text(problem: str, inst, report: SolveReport) -> str:
    if problem == "qcsp":
        return qcsp.serialize_solution(report.best_objective, report.best_solution)
    return knapsack.serialize_solution(report.best_objective, inst.to_input_order(report.best_solution))


@dataclass
class Validation:
    ok: bool
    messages: list


def validate(problem: str, inst, text: str) -> Validation:
    """Recompute objective and feasibility of a solution file."""
    msgs = []
    if problem == "qcsp":
        claimed, sigma = qcsp.parse_solution(text)
        if len(sigma) != inst.n or any(not 0 <= k < inst.m for k in sigma):
            return Validation(False, [f"malformed: expected {inst.n} crane indices in [0, {inst.m})"])
        actual = qcsp.makespan(inst, sigma)
        if actual != claimed:
            msgs.append(f"objective mismatch: claimed {claimed}, recomputed {actual}")
        bad = qcsp.feasibility_violation(inst, sigma)
        if bad is not None:
            kind, b, b2 = bad
            if b2 is None:
                msgs.append(f"infeasible: {kind} at bay {b}")
            else:
                msgs.append(f"infeasible: {kind} at pair ({b},{b2})")
    else:
        claimed, bits = knapsack.parse_solution(text)
        if len(bits) != inst.n:
            return Validation(False, [f"malformed: expected {inst.n} bits, got {len(bits)}"])
        x = inst.from_input_order(bits)
        adapter = knapsack.KnapsackAdapter(inst)
        actual = adapter.objective(x)
        weight = adapter.weight(x)
        if actual != claimed:
            msgs.append(f"objective mismatch: claimed {claimed}, recomputed {actual}")
        if weight > inst.c:
            msgs.append(f"infeasible: weight {weight} exceeds capacity {inst.c}")
    return Validation(not msgs, msgs)
