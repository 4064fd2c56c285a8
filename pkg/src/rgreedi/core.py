"""Element sets, value oracles and the exact Lovász extension."""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np

ElementSet = frozenset
"""Sets of ground elements are frozensets of dense non-negative ints."""

EMPTY: frozenset = frozenset()

# Disjoint RNG streams derived from one master seed.
STREAM_PARTITION = 1
STREAM_ALGORITHM = 2
STREAM_TRIALS = 3
STREAM_GENERATOR = 4


def element_set(items: Iterable[int], n: int | None = None) -> frozenset:
    """Build a validated element set; duplicates collapse, order is irrelevant."""
    out = frozenset(int(e) for e in items)
    for e in out:
        if e < 0 or (n is not None and e >= n):
            raise ValueError(f"element id {e} outside ground set of size {n}")
    return out


def canonical(S: Iterable[int]) -> tuple[int, ...]:
    """Ascending-id tuple form of a set, used wherever order must be reproducible."""
    return tuple(sorted(set(S)))


def rng(seed: int, stream: int, *extra: int) -> np.random.Generator:
    """Counter-based generator keyed on (seed, stream, extra...).

    Philox draws depend only on the key, so results do not depend on the
    order in which independent runs are scheduled.
    """
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, stream, *extra])
    return np.random.Generator(np.random.Philox(key=ss.generate_state(2, dtype=np.uint64)))


def derive_seed(master_seed: int, index: int) -> int:
    ss = np.random.SeedSequence([int(master_seed) & 0xFFFFFFFFFFFFFFFF, STREAM_TRIALS, index])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


class SetFunction:
    """Value oracle for a non-negative set function on ``range(n)``.

    Subclasses implement ``evaluate``; instances hold no mutable state after
    construction so they can be shared between workers.
    """

    n: int
    monotone: bool = False

    def evaluate(self, S: frozenset) -> float:
        raise NotImplementedError

    def __call__(self, S: Iterable[int]) -> float:
        if not isinstance(S, frozenset):
            S = frozenset(S)
        return self.evaluate(S)

    def check_ids(self, S: Iterable[int]) -> None:
        for e in S:
            if not 0 <= e < self.n:
                raise ValueError(f"element id {e} outside ground set of size {self.n}")


class FunctionOracle(SetFunction):
    """Wrap a plain callable on frozensets."""

    def __init__(self, fn: Callable[[frozenset], float], n: int, monotone: bool = False):
        self.fn = fn
        self.n = n
        self.monotone = monotone

    def evaluate(self, S):
        return float(self.fn(S))


class CountingOracle(SetFunction):
    """Per-run wrapper that counts evaluations of the wrapped oracle."""

    def __init__(self, f: SetFunction):
        self.f = f
        self.n = f.n
        self.monotone = f.monotone
        self.calls = 0

    def evaluate(self, S):
        self.calls += 1
        return self.f.evaluate(S)


def marginal_gain(f: SetFunction, e: int, S: Iterable[int]) -> float:
    """f(S + e) - f(S); negative values are allowed for non-monotone f."""
    S = frozenset(S)
    if e in S:
        raise ValueError(f"element {e} already in the set")
    return f(S | {e}) - f(S)


def _check_weights(x: Sequence[float], n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"weight vector must have length {n}, got shape {x.shape}")
    if np.any(x < 0.0) or np.any(x > 1.0) or np.any(np.isnan(x)):
        raise ValueError("weight vector coordinates must lie in [0, 1]")
    return x


def lovasz_extension(f: SetFunction, x: Sequence[float]) -> float:
    """Exact value of E_theta[f({i : x_i >= theta})] for theta ~ U(0, 1).

    Coordinates are visited in descending order (ties by ascending id); the
    level set after the j-th coordinate is active for theta in
    (x_(j+1), x_(j)], so the integral is a finite sum of at most n+1
    evaluations.
    """
    x = _check_weights(x, f.n)
    order = sorted(range(f.n), key=lambda i: (-x[i], i))
    levels = [1.0] + [float(x[i]) for i in order] + [0.0]
    total = 0.0
    prefix: list[int] = []
    for j in range(f.n + 1):
        if j > 0:
            prefix.append(order[j - 1])
        width = levels[j] - levels[j + 1]
        if width > 0.0:
            total += width * f(frozenset(prefix))
    return total


def check_lovasz_scaling(f: SetFunction, x: Sequence[float], c: float, tol: float = 1e-9) -> bool:
    """Whether f^-(c x) >= c f^-(x) - tol."""
    if not 0.0 <= c <= 1.0:
        raise ValueError("c must lie in [0, 1]")
    x = _check_weights(x, f.n)
    return lovasz_extension(f, c * x) >= c * lovasz_extension(f, x) - tol


def indicator(S: Iterable[int], n: int) -> np.ndarray:
    x = np.zeros(n)
    for e in S:
        x[e] = 1.0
    return x
