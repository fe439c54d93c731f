"""Artificial one-shot benchmark with a known prior on the optimum.

Each replica draws an objective (optimum location and which coordinates
matter), then every method spends its whole budget in one batch; the best
value found is the simple regret. Win tables count, per (dimension, budget)
cell, how often each method beats each other one.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from . import reshaping as rs
from .methods import generate, parse_method_spec
from .seeding import as_generator, stream

FUNCTIONS = ("Sphere", "Rastrigin", "Cigar")
CIGAR_CONDITION = 1e6


@dataclass(frozen=True)
class Prior:
    """Distribution of the optimum: ``NormalStd``, ``NormalScaled(s)`` or ``CauchyScaled(s)``."""

    kind: str = "NormalStd"
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("NormalStd", "NormalScaled", "CauchyScaled"):
            raise ValueError(f"unknown prior {self.kind!r}")
        if not self.scale > 0:
            raise ValueError("prior scale must be positive")
        if self.kind == "NormalStd" and self.scale != 1.0:
            raise ValueError("NormalStd has unit scale; use NormalScaled(s)")

    @classmethod
    def parse(cls, text) -> "Prior":
        if isinstance(text, Prior):
            return text
        m = re.fullmatch(r"\s*(\w+)\s*(?:\(\s*([^)]*)\s*\))?\s*", str(text))
        if m is None:
            raise ValueError(f"cannot parse prior {text!r}")
        kind, arg = m.groups()
        if kind == "NormalStd":
            if arg:
                raise ValueError("NormalStd takes no scale")
            return cls()
        if not arg:
            raise ValueError(f"prior {kind} needs a scale, e.g. {kind}(5)")
        return cls(kind, float(arg))

    def __str__(self):
        return self.kind if self.kind == "NormalStd" else f"{self.kind}({self.scale:g})"

    def draw(self, size, rng):
        if self.kind == "CauchyScaled":
            return self.scale * rng.standard_cauchy(size)
        return self.scale * rng.standard_normal(size)


@dataclass(frozen=True, eq=False)
class ObjectiveInstance:
    function: str
    d: int
    critical: tuple
    optimum: np.ndarray
    prior: Prior = Prior()

    @property
    def d_prime(self) -> int:
        return len(self.critical)


def draw_instance(function: str, d: int, d_prime: int, prior="NormalStd", seed=None) -> ObjectiveInstance:
    """Draw the critical coordinates (uniformly, without replacement) and the optimum."""
    if function not in FUNCTIONS:
        raise ValueError(f"unknown function {function!r}; expected one of {FUNCTIONS}")
    if not 1 <= d_prime <= d:
        raise ValueError(f"need 1 <= d_prime <= d, got d_prime={d_prime}, d={d}")
    prior = Prior.parse(prior)
    rng = as_generator(seed)
    critical = tuple(int(i) for i in np.sort(rng.choice(d, size=d_prime, replace=False)))
    optimum = prior.draw(d_prime, rng)
    optimum.setflags(write=False)
    return ObjectiveInstance(function, d, critical, optimum, prior)


def evaluate(instance: ObjectiveInstance, x):
    """Objective value at ``x`` (one point or an ``(n, d)`` batch); 0 at the optimum.

    Only the critical coordinates are read.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != instance.d:
        raise ValueError(f"point dimension {x.shape[-1]} != instance dimension {instance.d}")
    z = x[..., list(instance.critical)] - instance.optimum
    if instance.function == "Sphere":
        return np.sum(z * z, axis=-1)
    if instance.function == "Cigar":
        return z[..., 0] ** 2 + CIGAR_CONDITION * np.sum(z[..., 1:] ** 2, axis=-1)
    # Rastrigin, shifted so the optimum is exactly 0
    return np.sum(z * z - 10.0 * np.cos(2.0 * math.pi * z) + 10.0, axis=-1)


@dataclass(frozen=True)
class ReplicaResult:
    function: str
    d: int
    d_prime: int
    budget: int
    method: str
    replica: int
    regret: float
    min_distance: float
    seed: int

    def as_row(self):
        return [
            self.function, self.d, self.d_prime, self.budget, self.method, self.replica,
            repr(float(self.regret)), repr(float(self.min_distance)), self.seed,
        ]


RESULT_COLUMNS = [f.name for f in fields(ReplicaResult)]


def run_replica(method, instance: ObjectiveInstance, budget: int, seed=None,
                replica: int = 0, master_seed: int = 0) -> ReplicaResult:
    """Spend ``budget`` points of ``method`` on ``instance`` in one batch."""
    spec = parse_method_spec(method) if isinstance(method, str) else method
    spec = spec.with_target(rs.UNBOUNDED)
    x = generate(spec, budget, instance.d, seed)
    values = evaluate(instance, x)
    diff = x[:, list(instance.critical)] - instance.optimum
    dist = np.sqrt(np.min(np.sum(diff * diff, axis=1)))
    regret = float(np.min(values))
    if not math.isfinite(regret):
        raise FloatingPointError(f"non-finite regret for {spec.name}")
    return ReplicaResult(instance.function, instance.d, instance.d_prime, budget, spec.name,
                         replica, regret, float(dist), master_seed)


# ---------------------------------------------------------------------------
# grid runs


def _instance_stream(seed, function, d, d_prime, replica):
    return stream(seed, "instance", function, d, d_prime, replica)


def _sample_stream(seed, function, d, d_prime, replica, method_index):
    # budget is left out so nested deterministic designs share a prefix
    return stream(seed, "sample", function, d, d_prime, replica, method_index)


def _replica_task(args):
    methods, function, d, d_prime, budgets, replica, prior, seed = args
    specs = [parse_method_spec(m) for m in methods]
    instance = draw_instance(function, d, d_prime, prior,
                             _instance_stream(seed, function, d, d_prime, replica))
    out = []
    for budget in budgets:
        for idx, spec in enumerate(specs):
            rng = _sample_stream(seed, function, d, d_prime, replica, idx)
            res = run_replica(spec, instance, budget, rng, replica, seed)
            out.append(res)
    return out


def run_grid(methods, cells, budgets, functions=("Sphere",), replicas=30, seed=0,
             prior="NormalStd", jobs=1) -> list[ReplicaResult]:
    """All replica results for ``cells`` (``(d, d_prime)`` pairs) x ``budgets`` x ``functions``.

    Within a replica every method faces the same instance. Results come back
    in a fixed order regardless of ``jobs``.
    """
    names = [parse_method_spec(m).name if isinstance(m, str) else m.name for m in methods]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate methods in {names}")
    prior = str(Prior.parse(prior))
    tasks = [
        (tuple(names), f, int(d), int(dp), tuple(int(b) for b in budgets), r, prior, int(seed))
        for f in functions
        for d, dp in cells
        for r in range(replicas)
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_replica_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        chunks = [_replica_task(t) for t in tasks]
    order = {name: i for i, name in enumerate(names)}
    results = list(itertools.chain.from_iterable(chunks))
    results.sort(key=lambda r: (r.function, r.d, r.d_prime, r.budget, r.replica, order[r.method]))
    return results


def write_results(results, path_or_buffer):
    own = isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__")
    fh = open(path_or_buffer, "w", newline="") if own else path_or_buffer
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for r in results:
            w.writerow(r.as_row())
    finally:
        if own:
            fh.close()


def read_results(path) -> list[ReplicaResult]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for row in rows:
        out.append(ReplicaResult(
            row["function"], int(row["d"]), int(row["d_prime"]), int(row["budget"]),
            row["method"], int(row["replica"]), float(row["regret"]),
            float(row["min_distance"]), int(row["seed"]),
        ))
    return out


# ---------------------------------------------------------------------------
# win tables


@dataclass
class WinCell:
    methods: list
    wins: np.ndarray  # wins[a, b]: times a beat b, ties count 1/2
    comparisons: int

    def frequency(self) -> np.ndarray:
        if self.comparisons == 0:
            return np.full(self.wins.shape, 0.5)
        return self.wins / self.comparisons

    def mean_win_frequency(self) -> np.ndarray:
        freq = self.frequency()
        m = len(self.methods)
        if m < 2:
            return np.full(m, 0.5)
        return (freq.sum(axis=1) - np.diag(freq)) / (m - 1)

    @property
    def best(self) -> str:
        scores = self.mean_win_frequency()
        top = scores.max()
        return min(name for name, s in zip(self.methods, scores) if s == top)


@dataclass
class WinTable:
    """Best method per ``(d, d_prime)`` row and budget column."""

    rows: list
    budgets: list
    methods: list
    cells: dict
    replicas: int

    def best(self, row, budget) -> str:
        return self.cells[(tuple(row), budget)].best

    def frequency(self, row, budget, a, b) -> float:
        cell = self.cells[(tuple(row), budget)]
        return float(cell.frequency()[cell.methods.index(a), cell.methods.index(b)])

    def to_text(self) -> str:
        """Tab-separated grid: one row per dimension, one column per budget."""
        buf = io.StringIO()
        w = csv.writer(buf, delimiter="\t", lineterminator="\n")
        w.writerow(["dim", "critical"] + [str(b) for b in self.budgets])
        for row in self.rows:
            w.writerow([row[0], row[1]] + [self.best(row, b) for b in self.budgets])
        return buf.getvalue()

    def frequency_rows(self):
        for row in self.rows:
            for b in self.budgets:
                cell = self.cells[(tuple(row), b)]
                scores = cell.mean_win_frequency()
                best = cell.best
                for name, s in zip(cell.methods, scores):
                    yield [row[0], row[1], b, name, repr(float(s)), int(name == best), cell.comparisons]


FREQUENCY_COLUMNS = ["d", "d_prime", "budget", "method", "mean_win_frequency", "best", "comparisons"]


def tabulate_wins(results, methods=None) -> WinTable:
    """Pairwise win counts per cell from replica results.

    Within a cell, results sharing ``(function, replica)`` are compared by
    strict regret; equal regrets count half a win each way.
    """
    results = list(results)
    if methods is None:
        methods = list(dict.fromkeys(r.method for r in results))
    groups = {}
    for r in results:
        key = ((r.d, r.d_prime), r.budget)
        groups.setdefault(key, {}).setdefault((r.function, r.replica), {})[r.method] = r.regret
    cells = {}
    replicas = 0
    for key, per_replica in groups.items():
        wins = np.zeros((len(methods), len(methods)))
        count = 0
        for regrets in per_replica.values():
            if len(regrets) != len(methods):
                raise ValueError(f"incomplete replica in cell {key}")
            v = np.array([regrets[m] for m in methods])
            wins += (v[:, None] < v[None, :]) + 0.5 * (v[:, None] == v[None, :])
            count += 1
        cells[key] = WinCell(list(methods), wins, count)
        replicas = max(replicas, len({rep for _, rep in per_replica}))
    rows = sorted({k[0] for k in cells})
    budgets = sorted({k[1] for k in cells})
    return WinTable(rows, budgets, list(methods), cells, replicas)


def win_table(methods, cells, budgets, functions=("Sphere",), replicas=30, seed=0,
              prior="NormalStd", jobs=1) -> WinTable:
    if len(methods) < 2:
        raise ValueError("a win table needs at least two methods")
    if replicas < 30:
        raise ValueError("a win table needs at least 30 replicas per cell")
    results = run_grid(methods, cells, budgets, functions, replicas, seed, prior, jobs)
    names = [parse_method_spec(m).name if isinstance(m, str) else m.name for m in methods]
    return tabulate_wins(results, names)


def win_frequency(results, a: str, b: str) -> float:
    """Fraction of paired replicas (over all cells) where ``a`` beats ``b``; ties count half."""
    by_key = {}
    for r in results:
        by_key.setdefault((r.function, r.d, r.d_prime, r.budget, r.replica), {})[r.method] = r.regret
    total = 0.0
    count = 0
    for regrets in by_key.values():
        if a in regrets and b in regrets:
            ra, rb = regrets[a], regrets[b]
            total += 1.0 if ra < rb else 0.5 if ra == rb else 0.0
            count += 1
    if count == 0:
        raise ValueError(f"no paired results for {a} and {b}")
    return total / count


def full_grid():
    """Paper-scale grid: 3, 25 or 100 critical variables, each alone or with 5 useless ones per critical."""
    return dict(critical=[3, 25, 100], useless_factors=[0, 5],
                budgets=[30, 100, 300, 1000, 3000, 10000, 30000, 100000, 300000],
                functions=list(FUNCTIONS), replicas=7400)


def cells_from(critical, useless_factors):
    """``(d, d_prime)`` pairs with ``d = d_prime * (1 + factor)``, sorted by ``d``."""
    return sorted({(c * (1 + f), c) for c in critical for f in useless_factors})


__all__ = [
    "FUNCTIONS", "Prior", "ObjectiveInstance", "ReplicaResult", "WinTable", "draw_instance",
    "evaluate", "run_replica", "run_grid", "win_table", "tabulate_wins", "win_frequency",
    "write_results", "read_results", "cells_from", "full_grid",
]
