"""Ground-truth oracles and statistical checks for the approximation guarantees."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np

from .constraints import Cardinality, Constraint
from .core import STREAM_ALGORITHM, SetFunction, derive_seed, rng
from .distributed import Partition, det_greedi
from .greedy import greedy

MAX_ENUMERATION = 24


@dataclass(frozen=True)
class OptResult:
    opt_set: frozenset
    opt_value: float
    enumerated: int


@dataclass(frozen=True)
class EstimateReport:
    mean: float
    std_error: float
    trials: int
    seed: int

    def lower(self, z: float = 3.0) -> float:
        return self.mean - z * self.std_error


def _guard(pool) -> list[int]:
    items = sorted(pool)
    if len(items) > MAX_ENUMERATION:
        raise ValueError(f"refusing to enumerate a pool of {len(items)} > {MAX_ENUMERATION} elements")
    return items


def feasible_subsets(pool: Iterable[int], c: Constraint, prune: bool = True) -> Iterator[tuple[int, ...]]:
    """Every feasible subset of ``pool`` as an ascending tuple.

    Depth-first over ascending ids.  With ``prune`` an infeasible set cuts
    off all of its extensions, which is sound for hereditary families.
    """
    items = _guard(pool)
    if not prune:
        for mask in range(1 << len(items)):
            S = tuple(items[i] for i in range(len(items)) if mask >> i & 1)
            if c.is_feasible(frozenset(S)):
                yield S
        return

    def rec(start: int, cur: tuple[int, ...]):
        yield cur
        for i in range(start, len(items)):
            nxt = cur + (items[i],)
            if c.is_feasible(frozenset(nxt)):
                yield from rec(i + 1, nxt)

    if c.is_feasible(frozenset()):
        yield from rec(0, ())


def brute_force_opt(pool: Iterable[int], f: SetFunction, c: Constraint, prune: bool = True) -> OptResult:
    """Exhaustive maximiser of f over feasible subsets; ties go to the lexicographically smallest set."""
    best: tuple[int, ...] | None = None
    best_v = -math.inf
    count = 0
    for S in feasible_subsets(pool, c, prune=prune):
        count += 1
        v = f(frozenset(S))
        if v > best_v or (v == best_v and best is not None and S < best):
            best, best_v = S, v
    assert best is not None
    return OptResult(frozenset(best), best_v, count)


def estimate_expected_value(run: Callable[[int], float], trials: int, master_seed: int = 0,
                            bound_mode: bool = True) -> EstimateReport:
    """Mean and standard error of ``run(seed)`` over derived seeds.

    ``run`` returns the final value for one seed (a RunReport is accepted
    too).  In bound mode at least 30 trials are required.
    """
    if trials < 2 or (bound_mode and trials < 30):
        raise ValueError(f"too few trials ({trials}) for an expectation estimate")
    vals = np.empty(trials)
    for t in range(trials):
        r = run(derive_seed(master_seed, t))
        vals[t] = getattr(r, "final_value", r)
    se = float(vals.std(ddof=1) / math.sqrt(trials))
    return EstimateReport(float(vals.mean()), se, trials, master_seed)


def check_theorem_bound(report: EstimateReport, opt: OptResult | float, ratio: float) -> bool:
    """Whether mean >= ratio * OPT - 3 SE."""
    if not 0.0 < ratio <= 1.0:
        raise ValueError("ratio must lie in (0, 1]")
    ov = opt.opt_value if isinstance(opt, OptResult) else float(opt)
    return report.mean >= ratio * ov - 3.0 * report.std_error


def check_gp(f: SetFunction, c: Constraint, pool: Iterable[int], alpha: float, tol: float = 1e-9) -> tuple[bool, float]:
    """Test f(G) >= alpha * f(G + S) for every feasible S, G the greedy solution on ``pool``.

    Returns the verdict and the smallest observed f(G) / f(G + S) (1.0 when
    every union has value 0).
    """
    pool = frozenset(pool)
    G = greedy(pool, f, c)
    ok = True
    worst = 1.0
    for S in feasible_subsets(pool, c):
        u = f(G.final_set | frozenset(S))
        if G.value < alpha * u - tol:
            ok = False
        if u > 0:
            worst = min(worst, G.value / u)
    return ok, worst


def appendix_a_bound(k: int) -> float:
    return (1.0 - 1.0 / math.e) / (2.0 * math.sqrt(k))


def check_appendix_a(inst, partition: Partition, k: int | None = None, opt: float | None = None) -> tuple[float, float]:
    """Ratio achieved by deterministic GreeDi on ``partition`` and the (1-1/e)/(2 sqrt k) floor."""
    if not isinstance(inst.c, Cardinality):
        raise ValueError("the sqrt(k) bound is stated for cardinality constraints only")
    k = inst.c.k if k is None else k
    if opt is None:
        opt = inst.known_opt if inst.known_opt is not None else brute_force_opt(range(inst.n), inst.f, inst.c).opt_value
    rep = det_greedi(inst, partition)
    ratio = rep.final_value / opt if opt > 0 else 1.0
    return ratio, appendix_a_bound(k)


def in_greedy_with(e: int, A: frozenset, f: SetFunction, c: Constraint, twice: bool = False) -> bool:
    """Whether e is picked by greedy on A + e (or by the second pass, with ``twice``)."""
    pool = A | {e}
    g1 = greedy(pool, f, c).final_set
    if e in g1:
        return True
    if twice:
        return e in greedy(pool - g1, f, c).final_set
    return False


def estimate_p(inst, opt_set: frozenset, m: int, draws: int, seed: int, twice: bool = False) -> np.ndarray:
    """Monte Carlo estimate of p_e = Pr_{A ~ V(1/m)}[e selected on A + e] for e in OPT, 0 elsewhere.

    ``twice`` uses the non-monotone definition (selected by either greedy pass).
    """
    g = rng(seed, STREAM_ALGORITHM, 0x9E)
    n = inst.n
    hits = np.zeros(n)
    for _ in range(draws):
        mask = g.random(n) < 1.0 / m
        A = frozenset(np.flatnonzero(mask).tolist())
        for e in opt_set:
            if in_greedy_with(e, A - {e}, inst.f, inst.c, twice):
                hits[e] += 1
    return hits / draws
