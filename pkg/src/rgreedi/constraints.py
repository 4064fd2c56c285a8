"""Hereditary constraint families exposed as membership oracles."""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence


class Constraint:
    """Membership oracle for a hereditary family of feasible sets."""

    kind = "abstract"
    is_matroid = False

    def is_feasible(self, S: frozenset) -> bool:
        raise NotImplementedError

    def __contains__(self, S) -> bool:
        return self.is_feasible(frozenset(S))


class Unconstrained(Constraint):
    kind = "none"
    is_matroid = True

    def is_feasible(self, S):
        return True


class Cardinality(Constraint):
    kind = "cardinality"
    is_matroid = True

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("cardinality bound must be positive")
        self.k = int(k)

    def is_feasible(self, S):
        return len(S) <= self.k

    def __repr__(self):
        return f"Cardinality(k={self.k})"


class PartitionMatroid(Constraint):
    """At most ``capacity[b]`` elements from each block ``b``.

    Elements missing from ``part_of`` are never feasible.
    """

    kind = "partition_matroid"
    is_matroid = True

    def __init__(self, part_of: Sequence[int] | Mapping[int, int], capacity: Sequence[int] | Mapping[int, int] | int):
        if isinstance(part_of, Mapping):
            self.part_of = dict(part_of)
        else:
            self.part_of = dict(enumerate(part_of))
        blocks = set(self.part_of.values())
        if isinstance(capacity, int):
            capacity = {b: capacity for b in blocks}
        elif not isinstance(capacity, Mapping):
            capacity = dict(enumerate(capacity))
        if any(c < 0 for c in capacity.values()):
            raise ValueError("block capacities must be non-negative")
        missing = blocks - set(capacity)
        if missing:
            raise ValueError(f"no capacity for blocks {sorted(missing)}")
        self.capacity = dict(capacity)

    def is_feasible(self, S):
        counts: dict[int, int] = {}
        for e in S:
            b = self.part_of.get(e)
            if b is None:
                return False
            c = counts.get(b, 0) + 1
            if c > self.capacity[b]:
                return False
            counts[b] = c
        return True

    def __repr__(self):
        return f"PartitionMatroid(blocks={len(self.capacity)})"


class Knapsack(Constraint):
    """sum of weights <= budget; the comparison is inclusive with no tolerance."""

    kind = "knapsack"

    def __init__(self, weight: Sequence[float], budget: float):
        if budget <= 0:
            raise ValueError("budget must be positive")
        if any(w <= 0 for w in weight):
            raise ValueError("knapsack weights must be positive")
        self.weight = [float(w) for w in weight]
        self.budget = float(budget)

    def is_feasible(self, S):
        return sum(self.weight[e] for e in S) <= self.budget

    def __repr__(self):
        return f"Knapsack(budget={self.budget})"


class Intersection(Constraint):
    """Sets feasible in every member constraint.

    An intersection of p matroids is a p-system; ``p`` counts the members.
    """

    kind = "p_system"

    def __init__(self, members: Iterable[Constraint]):
        self.members = list(members)
        if not self.members:
            raise ValueError("intersection needs at least one constraint")
        self.p = len(self.members)

    @property
    def is_matroid(self):
        return self.p == 1 and self.members[0].is_matroid

    def is_feasible(self, S):
        return all(c.is_feasible(S) for c in self.members)

    def find(self, cls):
        for c in self.members:
            if isinstance(c, cls):
                return c
        return None

    def __repr__(self):
        return f"Intersection({self.members!r})"


PSystem = Intersection


def is_feasible(c: Constraint, S: Iterable[int]) -> bool:
    return c.is_feasible(frozenset(S))


def extendable_candidates(c: Constraint, S: Iterable[int], pool: Iterable[int]) -> frozenset:
    """Pool elements outside S whose addition keeps S feasible."""
    S = frozenset(S)
    if not c.is_feasible(S):
        raise ValueError("base set is infeasible")
    return frozenset(e for e in pool if e not in S and c.is_feasible(S | {e}))


def greedy_alpha(c: Constraint) -> float:
    """Approximation factor of standard greedy for a monotone objective under ``c``.

    Knapsack is reported at the certified density-greedy level (see
    ``greedy.greedy(..., variant='density')``).
    """
    if isinstance(c, Cardinality):
        return 1.0 - 1.0 / math.e
    if isinstance(c, Unconstrained):
        return 1.0
    if isinstance(c, PartitionMatroid):
        return 0.5
    if isinstance(c, Knapsack):
        return 0.5 * (1.0 - 1.0 / math.e)
    if isinstance(c, Intersection):
        if c.p == 1:
            return greedy_alpha(c.members[0])
        return 1.0 / (c.p + 1)
    raise ValueError(f"no greedy factor known for {c!r}")
