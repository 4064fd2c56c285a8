"""Two-round distributed greedy, simulated in-process with one logical worker per machine.

The first round runs greedy on every machine's shard; the second round runs
a combining algorithm on the union of the first-round solutions; the
answer is the best of the second-round solution and every first-round
solution.  Shards may be processed by a thread pool (``RGREEDI_THREADS``);
results do not depend on the schedule.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

from .core import STREAM_PARTITION, CountingOracle, SetFunction, rng
from .constraints import Constraint
from .greedy import greedy, nonmonotone_compose_detail, repeated_greedy

LastAlg = Union[str, Callable[[frozenset, SetFunction, Constraint, int], frozenset]]


@dataclass(frozen=True)
class Partition:
    machine_of: tuple[int, ...]
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("need at least one machine")
        for e, i in enumerate(self.machine_of):
            if not 0 <= i < self.m:
                raise ValueError(f"element {e} assigned to machine {i} outside [0, {self.m})")

    @property
    def n(self) -> int:
        return len(self.machine_of)

    def shards(self) -> list[frozenset]:
        out: list[set] = [set() for _ in range(self.m)]
        for e, i in enumerate(self.machine_of):
            out[i].add(e)
        return [frozenset(s) for s in out]

    def loads(self) -> list[int]:
        counts = [0] * self.m
        for i in self.machine_of:
            counts[i] += 1
        return counts


def partition_random(n: int, m: int, seed: int) -> Partition:
    """Each element goes to an independent uniformly random machine."""
    if m < 1:
        raise ValueError("need at least one machine")
    draws = rng(seed, STREAM_PARTITION).integers(0, m, size=n)
    return Partition(tuple(int(i) for i in draws), m)


def partition_fixed(n: int, m: int, strategy: str = "block", assignment: Sequence[int] | None = None) -> Partition:
    """Deterministic assignment: consecutive blocks, round robin, or an explicit list."""
    if m < 1:
        raise ValueError("need at least one machine")
    if strategy == "block":
        return Partition(tuple(e * m // n for e in range(n)), m)
    if strategy in ("round_robin", "rr"):
        return Partition(tuple(e % m for e in range(n)), m)
    if strategy == "explicit":
        if assignment is None or len(assignment) != n:
            raise ValueError(f"explicit assignment must list a machine for each of {n} elements")
        return Partition(tuple(int(i) for i in assignment), m)
    raise ValueError(f"unknown partition strategy {strategy!r}")


@dataclass(frozen=True)
class RunReport:
    """Outcome of one two-round run.

    ``round1_solutions`` lists every first-round candidate (two per machine
    for the non-monotone variant); ``round1_machines`` gives the machine of
    each.  ``communicated`` is the number of distinct elements shipped to
    the final machine.
    """

    final_set: frozenset
    final_value: float
    round1_solutions: tuple[frozenset, ...]
    round1_machines: tuple[int, ...]
    round1_values: tuple[float, ...]
    round2_solution: frozenset
    round2_value: float
    best_source: str
    oracle_calls: int
    communicated: int
    seed: int
    wall_time: float
    partition: Partition = field(repr=False)


def max_workers() -> int:
    try:
        return max(1, int(os.environ.get("RGREEDI_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _pick_best(round2_set, round2_value, cands, values, machines):
    best_set, best_value, source = round2_set, round2_value, "round2"
    for S, v, i in zip(cands, values, machines):
        if v > best_value:
            best_set, best_value, source = S, v, f"round1_machine_{i}"
    return best_set, best_value, source


def _run_last(last_alg: LastAlg, pool, f, c, seed, greedy_kw):
    if last_alg == "greedy":
        t = greedy(pool, f, c, **greedy_kw)
        return t.final_set, t.value, t.oracle_calls
    if callable(last_alg):
        cf = CountingOracle(f)
        S = frozenset(last_alg(pool, cf, c, seed))
        if not c.is_feasible(S) or not S <= pool:
            raise ValueError("last-machine algorithm returned an infeasible set")
        v = cf(S)
        return S, v, cf.calls
    raise ValueError(f"unknown last-machine algorithm {last_alg!r}")


def _two_round(inst, partition: Partition, last_alg: LastAlg, seed: int, workers, greedy_kw) -> RunReport:
    if partition.n != inst.n:
        raise ValueError(f"partition covers {partition.n} elements, instance has {inst.n}")
    t0 = time.perf_counter()
    f, c = inst.f, inst.c
    workers = max_workers() if workers is None else workers
    traces = _map(lambda shard: greedy(shard, f, c, **greedy_kw), partition.shards(), workers)
    cands = tuple(t.final_set for t in traces)
    values = tuple(t.value for t in traces)
    machines = tuple(range(partition.m))
    calls = sum(t.oracle_calls for t in traces)
    union = frozenset().union(*cands)
    T, vT, c2 = _run_last(last_alg, union, f, c, seed, greedy_kw)
    best, value, source = _pick_best(T, vT, cands, values, machines)
    return RunReport(best, value, cands, machines, values, T, vT, source, calls + c2,
                     len(union), seed, time.perf_counter() - t0, partition)


def rand_greedi(inst, m: int, last_alg: LastAlg = "greedy", seed: int = 0, *, workers: int | None = None,
                **greedy_kw) -> RunReport:
    """Random partition, greedy per machine, ``last_alg`` on the union, best of all."""
    partition = partition_random(inst.n, m, seed)
    return _two_round(inst, partition, last_alg, seed, workers, greedy_kw)


def det_greedi(inst, partition: Partition, last_alg: LastAlg = "greedy", *, workers: int | None = None,
               **greedy_kw) -> RunReport:
    """Same two rounds over a caller-supplied partition; fully deterministic."""
    return _two_round(inst, partition, last_alg, 0, workers, greedy_kw)


def nm_rand_greedi(inst, m: int, seed: int = 0, *, partition: Partition | None = None,
                   workers: int | None = None, **greedy_kw) -> RunReport:
    """Non-monotone variant: two disjoint greedy passes per machine.

    The final machine takes the best of greedy, greedy on the leftovers and
    double greedy inside the first greedy solution.
    """
    if partition is None:
        partition = partition_random(inst.n, m, seed)
    if partition.n != inst.n:
        raise ValueError(f"partition covers {partition.n} elements, instance has {inst.n}")
    t0 = time.perf_counter()
    f, c = inst.f, inst.c
    workers = max_workers() if workers is None else workers
    pairs = _map(lambda shard: repeated_greedy(shard, f, c, **greedy_kw), partition.shards(), workers)
    cands, values, machines = [], [], []
    calls = 0
    for i, (t1, t2) in enumerate(pairs):
        for t in (t1, t2):
            cands.append(t.final_set)
            values.append(t.value)
            machines.append(i)
            calls += t.oracle_calls
    union = frozenset().union(*cands)
    cf = CountingOracle(f)
    res = nonmonotone_compose_detail(union, cf, c, seed, **greedy_kw)
    calls += cf.calls
    best, value, source = _pick_best(res.best, res.value, cands, values, machines)
    return RunReport(best, value, tuple(cands), tuple(machines), tuple(values), res.best, res.value,
                     source, calls, len(union), seed, time.perf_counter() - t0, partition)
