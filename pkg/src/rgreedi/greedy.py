"""Sequential greedy building blocks used on every simulated machine."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable

from .constraints import Constraint, Intersection, Knapsack
from .core import STREAM_ALGORITHM, CountingOracle, SetFunction, rng


@dataclass(frozen=True)
class GreedyTrace:
    """Picks in selection order with the marginal gain seen at pick time."""

    picks: tuple[tuple[int, float], ...]
    final_set: frozenset
    value: float
    oracle_calls: int

    @property
    def order(self) -> tuple[int, ...]:
        return tuple(e for e, _ in self.picks)

    @property
    def gains(self) -> tuple[float, ...]:
        return tuple(g for _, g in self.picks)


def _knapsack_of(c: Constraint) -> Knapsack | None:
    if isinstance(c, Knapsack):
        return c
    if isinstance(c, Intersection):
        return c.find(Knapsack)
    return None


def _naive(pool, f, c, S0, weight=None):
    S = frozenset(S0)
    fS = f(S)
    remaining = sorted(e for e in pool if e not in S)
    picks = []
    while True:
        best = None
        best_key = None
        best_val = 0.0
        keep = []
        for e in remaining:
            T = S | {e}
            # infeasible now means infeasible for every superset of S
            if not c.is_feasible(T):
                continue
            keep.append(e)
            v = f(T)
            g = v - fS
            key = g / weight[e] if weight is not None else g
            if best_key is None or key > best_key:
                best, best_key, best_val = e, key, v
        if best is None or best_key < 0:
            break
        picks.append((best, best_val - fS))
        S = S | {best}
        fS = best_val
        keep.remove(best)
        remaining = keep
    return picks, S, fS


def _lazy(pool, f, c, S0):
    S = frozenset(S0)
    fS = f(S)
    heap = []
    value = {}
    for e in sorted(pool):
        if e in S or not c.is_feasible(S | {e}):
            continue
        value[e] = f(S | {e})
        heap.append((-(value[e] - fS), e, 0))
    heapq.heapify(heap)
    picks = []
    while heap:
        neg, e, stamp = heapq.heappop(heap)
        T = S | {e}
        if not c.is_feasible(T):
            continue
        if stamp == len(picks):
            if -neg < 0:
                break
            picks.append((e, -neg))
            S, fS = T, value[e]
            continue
        value[e] = f(T)
        heapq.heappush(heap, (-(value[e] - fS), e, len(picks)))
    return picks, S, fS


def greedy(
    pool: Iterable[int],
    f: SetFunction,
    c: Constraint,
    *,
    variant: str = "standard",
    lazy: bool = False,
) -> GreedyTrace:
    """Standard greedy: repeatedly add the feasible element of largest marginal gain.

    Stops when nothing feasible remains or the best gain is negative;
    zero-gain elements are still added.  Ties go to the smallest id.

    ``variant='density'`` ranks by gain per unit knapsack weight and returns
    the better of that solution and the best feasible singleton.  ``lazy``
    uses stale upper bounds in a heap; on submodular f it yields the same
    picks as the plain scan.
    """
    pool = frozenset(pool)
    cf = CountingOracle(f)
    if not c.is_feasible(frozenset()):
        raise ValueError("empty set must be feasible")
    if variant == "standard":
        if lazy:
            picks, S, v = _lazy(pool, cf, c, ())
        else:
            picks, S, v = _naive(pool, cf, c, ())
    elif variant == "density":
        knap = _knapsack_of(c)
        if knap is None:
            raise ValueError("density greedy needs a knapsack constraint")
        picks, S, v = _naive(pool, cf, c, (), weight=knap.weight)
        f0 = cf(frozenset())
        for e in sorted(pool):
            if c.is_feasible(frozenset((e,))):
                ve = cf(frozenset((e,)))
                if ve > v:
                    picks, S, v = [(e, ve - f0)], frozenset((e,)), ve
    else:
        raise ValueError(f"unknown greedy variant {variant!r}")
    return GreedyTrace(tuple(picks), S, v, cf.calls)


def repeated_greedy(pool: Iterable[int], f: SetFunction, c: Constraint, **kw) -> tuple[GreedyTrace, GreedyTrace]:
    """Greedy on the pool, then greedy again on what the first pass left."""
    pool = frozenset(pool)
    first = greedy(pool, f, c, **kw)
    second = greedy(pool - first.final_set, f, c, **kw)
    return first, second


def double_greedy_unconstrained(pool: Iterable[int], f: SetFunction, rng_seed: int) -> frozenset:
    """Randomized double greedy for unconstrained non-negative submodular f.

    Elements are scanned in ascending id; element e is kept with probability
    a+ / (a+ + b+) where a is its gain on X and b the gain from removing it
    from Y.  Coins are indexed by element id so a run is a pure function of
    (pool, f, seed).
    """
    order = sorted(pool)
    if not order:
        return frozenset()
    coins = rng(rng_seed, STREAM_ALGORITHM, 0xD6).random(order[-1] + 1)
    X: frozenset = frozenset()
    Y = frozenset(order)
    fX, fY = f(X), f(Y)
    for e in order:
        X1 = X | {e}
        Y1 = Y - {e}
        fX1, fY1 = f(X1), f(Y1)
        a = max(fX1 - fX, 0.0)
        b = max(fY1 - fY, 0.0)
        p = 1.0 if a + b == 0.0 else a / (a + b)
        if coins[e] < p:
            X, fX = X1, fX1
        else:
            Y, fY = Y1, fY1
    return X


@dataclass(frozen=True)
class ComposeResult:
    t1: GreedyTrace
    t2: GreedyTrace
    t3: frozenset
    best: frozenset
    value: float
    source: str


def nonmonotone_compose_detail(pool, f: SetFunction, c: Constraint, rng_seed: int, **kw) -> ComposeResult:
    t1, t2 = repeated_greedy(pool, f, c, **kw)
    t3 = double_greedy_unconstrained(t1.final_set, f, rng_seed)
    cands = [("T1", t1.final_set, t1.value), ("T2", t2.final_set, t2.value), ("T3", t3, f(t3))]
    src, best, val = cands[0]
    for name, S, v in cands[1:]:
        if v > val:
            src, best, val = name, S, v
    return ComposeResult(t1, t2, t3, best, val, src)


def nonmonotone_compose(pool: Iterable[int], f: SetFunction, c: Constraint, rng_seed: int, **kw) -> frozenset:
    """Best of greedy, greedy on the leftovers, and double greedy inside the first greedy set."""
    return nonmonotone_compose_detail(pool, f, c, rng_seed, **kw).best
