"""Submodular objective families: coverage, exemplar clustering, diversity, modular."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .core import STREAM_GENERATOR, SetFunction, rng


class ModularFunction(SetFunction):
    """f(S) = sum of non-negative weights."""

    monotone = True

    def __init__(self, weights: Sequence[float]):
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0):
            raise ValueError("modular weights must be non-negative")
        self.weights = w
        self.n = len(w)

    def evaluate(self, S):
        return float(sum(self.weights[e] for e in S))


class CoverageFunction(SetFunction):
    """Number of distinct universe items covered by the chosen sets.

    Each ground element i is the i-th set; sets are stored as integer
    bitmasks over the universe so unions are a single OR.
    """

    monotone = True

    def __init__(self, sets: Sequence[Iterable[int]], universe_size: int):
        self.universe_size = int(universe_size)
        self.sets = [frozenset(int(u) for u in s) for s in sets]
        masks = []
        for i, s in enumerate(self.sets):
            m = 0
            for u in s:
                if not 0 <= u < self.universe_size:
                    raise ValueError(f"set {i} references item {u} outside universe {universe_size}")
                m |= 1 << u
            masks.append(m)
        self.masks = masks
        self.n = len(masks)

    def evaluate(self, S):
        m = 0
        masks = self.masks
        n = self.n
        for e in S:
            if not 0 <= e < n:
                raise ValueError(f"element id {e} outside ground set of size {n}")
            m |= masks[e]
        return float(m.bit_count())

    def covered(self, S) -> frozenset:
        return frozenset().union(*(self.sets[e] for e in S)) if S else frozenset()


class ExemplarFunction(SetFunction):
    """Exemplar-clustering objective f(S) = L({v0}) - L(S + v0).

    L(A) averages, over the reference points, the squared distance to the
    nearest member of A; v0 is the zero vector.

    ``eval_points`` restricts the average to a subset of reference points
    (the per-machine restricted objective).  ``sample_size`` evaluates on a
    fixed seeded sample of reference points and rescales, which trades
    exactness for speed on large inputs.
    """

    monotone = True

    def __init__(self, points, eval_points=None, sample_size: int | None = None, seed: int = 0):
        X = np.asarray(points, dtype=float)
        if X.ndim != 2:
            raise ValueError("points must be an n x d array")
        self.points = X
        self.n = X.shape[0]
        ref = np.arange(self.n) if eval_points is None else np.asarray(sorted(eval_points), dtype=int)
        if sample_size is not None and sample_size < len(ref):
            ref = np.sort(rng(seed, STREAM_GENERATOR, 0x5A).choice(ref, size=sample_size, replace=False))
        self.ref = ref
        R = X[ref]
        # dist[a, v] = ||x_a - x_v||^2 for candidate a and reference point v
        sq = np.sum(X * X, axis=1)
        self.dist = np.maximum(sq[:, None] + np.sum(R * R, axis=1)[None, :] - 2.0 * X @ R.T, 0.0)
        self.base = np.sum(R * R, axis=1)  # distance to v0
        self._l0 = float(self.base.mean()) if len(ref) else 0.0

    def restricted(self, eval_points) -> "ExemplarFunction":
        return ExemplarFunction(self.points, eval_points=eval_points)

    def evaluate(self, S):
        if not S or not len(self.ref):
            return 0.0
        idx = sorted(S)
        if idx[0] < 0 or idx[-1] >= self.n:
            raise ValueError(f"element ids {idx} outside ground set of size {self.n}")
        best = np.minimum(self.dist[idx].min(axis=0), self.base)
        return max(self._l0 - float(best.mean()), 0.0)


class DiversityFunction(SetFunction):
    """f(A) = sum_{i in V} sum_{j in A} s_ij - lam * sum_{i, j in A} s_ij.

    The penalty runs over ordered pairs of A, including i == j; generated
    similarity matrices have a zero diagonal.  Values can be negative on
    large sets when ``lam`` is large.
    """

    monotone = False

    def __init__(self, similarity, lam: float):
        s = np.asarray(similarity, dtype=float)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise ValueError("similarity must be a square matrix")
        if np.any(s < 0):
            raise ValueError("similarities must be non-negative")
        self.s = s
        self.lam = float(lam)
        self.n = s.shape[0]
        self.relevance = s.sum(axis=0)
        self._rows = s.tolist()
        self._rel = self.relevance.tolist()

    def evaluate(self, S):
        idx = sorted(S)
        n = self.n
        for e in idx:
            if not 0 <= e < n:
                raise ValueError(f"element id {e} outside ground set of size {n}")
        rows = self._rows
        rel = sum(self._rel[j] for j in idx)
        pen = 0.0
        for i in idx:
            r = rows[i]
            for j in idx:
                pen += r[j]
        return rel - self.lam * pen
