"""Seeded multi-run experiments over a (beam width, time budget) grid.

Config is a flat ``key = value`` file::

    problem = qcsp              # optional, inferred from suffixes otherwise
    instances = a.qcsp b.qcsp   # relative to the config file
    beams = 1 10 100
    times = 10 100
    runs = 25
    seed_base = 0
    max_iterations = 2000       # optional; deterministic mode

Run ``r`` of a cell uses seed ``seed_base + r``.
"""
from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean

from . import problems
from .engine import SearchParams

COLUMNS = [
    "row", "instance", "beam", "time", "runs", "failures",
    "mean_objective", "best_objective", "worst_objective",
    "mean_gap_percent", "mean_seconds",
]


class ConfigError(ValueError):
    pass


@dataclass
class BenchConfig:
    instances: list
    beams: list = field(default_factory=lambda: [1, 10, 100])
    times: list = field(default_factory=lambda: [10.0, 100.0])
    runs: int = 25
    seed_base: int = 0
    problem: str | None = None
    max_iterations: int | None = None


def parse_config(text: str, base_dir=".") -> BenchConfig:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        raw[key] = value
    unknown = set(raw) - {"problem", "instances", "beams", "times", "runs", "seed_base", "max_iterations"}
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(sorted(unknown))}")
    if not raw.get("instances"):
        raise ConfigError("'instances' is required")
    try:
        cfg = BenchConfig(instances=[str(Path(base_dir) / p) for p in raw["instances"].split()])
        if "beams" in raw:
            cfg.beams = [int(x) for x in raw["beams"].split()]
        if "times" in raw:
            cfg.times = [float(x) for x in raw["times"].split()]
        if "runs" in raw:
            cfg.runs = int(raw["runs"])
        if "seed_base" in raw:
            cfg.seed_base = int(raw["seed_base"])
        if raw.get("max_iterations"):
            cfg.max_iterations = int(raw["max_iterations"])
    except ValueError as e:
        raise ConfigError(str(e)) from None
    cfg.problem = raw.get("problem") or None
    if cfg.runs < 1 or not cfg.beams or not cfg.times:
        raise ConfigError("need runs >= 1 and non-empty beams/times")
    return cfg


def _one_run(task):
    path, problem, beam, budget, seed, max_iterations = task
    try:
        problem, inst = problems.load(path, problem)
        params = SearchParams(time_budget=budget, beam_width=beam, seed=seed, max_iterations=max_iterations)
        t0 = time.perf_counter()
        rep = problems.run(problem, inst, params)
        seconds = time.perf_counter() - t0
    except Exception as e:  # recorded in-row, the harness keeps going
        return {"error": f"{type(e).__name__}: {e}"}
    if not rep.found:
        return {"error": "no feasible solution"}
    return {
        "objective": rep.best_objective,
        "gap": problems.gap_percent(rep.best_objective, rep.root_bound),
        "seconds": seconds,
        "minimize": problem == "qcsp",
    }


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return f"{x:.6f}"


def run_bench(cfg: BenchConfig, jobs: int = 1) -> list:
    """Run every cell and return CSV rows (dicts) in config order."""
    cells = [(path, beam, budget) for path in cfg.instances for beam in cfg.beams for budget in cfg.times]
    tasks = [(path, cfg.problem, beam, budget, cfg.seed_base + r, cfg.max_iterations)
             for path, beam, budget in cells for r in range(cfg.runs)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_one_run, tasks))
    else:
        results = [_one_run(t) for t in tasks]
    timing = cfg.max_iterations is None
    rows = []
    per_cell = {}
    for i, (path, beam, budget) in enumerate(cells):
        chunk = results[i * cfg.runs:(i + 1) * cfg.runs]
        good = [r for r in chunk if "error" not in r]
        row = {"row": "instance", "instance": path, "beam": beam, "time": budget,
               "runs": cfg.runs, "failures": cfg.runs - len(good)}
        if good:
            objs = [r["objective"] for r in good]
            lo, hi = min(objs), max(objs)
            best, worst = (lo, hi) if good[0]["minimize"] else (hi, lo)
            row.update(mean_objective=fmean(objs), best_objective=best, worst_objective=worst,
                       mean_gap_percent=fmean(r["gap"] for r in good),
                       mean_seconds=fmean(r["seconds"] for r in good) if timing else None)
            per_cell.setdefault((beam, budget), []).append(row)
        rows.append(row)
    for beam in cfg.beams:
        for budget in cfg.times:
            group = per_cell.get((beam, budget), [])
            row = {"row": "average", "instance": "*", "beam": beam, "time": budget,
                   "runs": cfg.runs, "failures": sum(r["failures"] for r in rows
                                                     if r["row"] == "instance" and r["beam"] == beam
                                                     and r["time"] == budget)}
            if group:
                row.update(
                    mean_objective=fmean(r["mean_objective"] for r in group),
                    best_objective=fmean(r["best_objective"] for r in group),
                    worst_objective=fmean(r["worst_objective"] for r in group),
                    mean_gap_percent=fmean(r["mean_gap_percent"] for r in group),
                    mean_seconds=fmean(r["mean_seconds"] for r in group) if timing else None,
                )
            rows.append(row)
    return rows


def to_csv(rows: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        out = []
        for col in COLUMNS:
            v = row.get(col)
            if col == "time":
                out.append(f"{v:g}")
            elif isinstance(v, str):
                out.append(v)
            else:
                out.append(_fmt(v))
        writer.writerow(out)
    return buf.getvalue()
