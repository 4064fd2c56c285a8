"""Instance generators, the GreeDi tight family, and FIMI/JSON ingestion."""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .constraints import Cardinality, Constraint, Intersection, Knapsack, PartitionMatroid, Unconstrained
from .core import STREAM_GENERATOR, SetFunction, rng
from .distributed import Partition
from .objectives import CoverageFunction, DiversityFunction, ExemplarFunction, ModularFunction


@dataclass(frozen=True)
class Instance:
    name: str
    f: SetFunction
    c: Constraint
    known_opt: float | None = None
    adversarial_partition: Partition | None = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return self.f.n

    def with_constraint(self, c: Constraint, name: str | None = None) -> "Instance":
        return replace(self, c=c, name=name or self.name, known_opt=None)


class FimiFormatError(ValueError):
    pass


def gen_tight_instance(l: int) -> Instance:
    """Max-k-coverage family on which GreeDi with a bad partition is ~1/sqrt(k).

    Universe items are 0-based: block j of the "optimal" part is
    O_j = {j*l, ..., j*l + l - 1} for j < l, and machine i (1..l^2) owns
    O'_i = {l^2 + (i-1)*l + t : t < l} together with l fooling sets
    O_j + {l^2 + (i-1)*l + j}.  Every machine is padded with k empty sets,
    placed before O'_i in id order so zero-gain ties go to the padding.
    """
    if l < 2:
        raise ValueError("tight instance needs l >= 2")
    k = l + l * l
    universe = l * l + l ** 3
    sets: list[list[int]] = []
    machine: list[int] = []
    roles: list[str] = []

    def add(s, i, role):
        sets.append(list(s))
        machine.append(i)
        roles.append(role)

    blocks = [list(range(j * l, (j + 1) * l)) for j in range(l)]
    for j in range(l):
        add(blocks[j], 0, f"O{j + 1}")
    for _ in range(k):
        add([], 0, "pad")
    for i in range(1, l * l + 1):
        base = l * l + (i - 1) * l
        for j in range(l):
            add(blocks[j] + [base + j], i, f"A{j + 1}@{i}")
        for _ in range(k):
            add([], i, "pad")
        add(range(base, base + l), i, f"O'{i}")
    f = CoverageFunction(sets, universe)
    part = Partition(tuple(machine), l * l + 1)
    opt = frozenset(e for e, r in enumerate(roles) if r.startswith("O"))
    return Instance(f"tight_l{l}", f, Cardinality(k), known_opt=float(universe),
                    adversarial_partition=part,
                    meta={"l": l, "k": k, "roles": roles, "opt_set": opt})


def _negative_sets_up_to(f: SetFunction, k: int) -> int:
    return sum(1 for r in range(1, k + 1) for S in itertools.combinations(range(f.n), r) if f(frozenset(S)) < 0)


def gen_diverse_relevant(n: int, k: int, seed: int, lam: float | None = None, *,
                         require_nonnegative: bool = False, max_attempts: int = 1000) -> Instance:
    """Symmetric U(0, 100) similarities with zero diagonal, lam = n/k, at most k picks.

    When every set of size <= k can be enumerated cheaply, the number of
    feasible sets with negative value is counted and stored in
    ``meta["negative_sets"]`` (None otherwise).  With
    ``require_nonnegative`` the matrix is redrawn from the same stream until
    that count is zero.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    lam = n / k if lam is None else float(lam)
    enumerable = sum(math.comb(n, r) for r in range(k + 1)) <= 20000
    if require_nonnegative and not enumerable:
        raise ValueError("non-negativity can only be enforced on enumerable instances")
    g = rng(seed, STREAM_GENERATOR, 0xD1)
    for attempt in range(max_attempts if require_nonnegative else 1):
        u = g.uniform(0.0, 100.0, size=(n, n))
        s = np.triu(u, 1)
        s = s + s.T
        f = DiversityFunction(s, lam)
        negative = _negative_sets_up_to(f, k) if enumerable else None
        if not require_nonnegative or negative == 0:
            return Instance(f"diversity_n{n}_k{k}_s{seed}", f, Cardinality(k),
                            meta={"lambda": lam, "attempts": attempt + 1, "negative_sets": negative})
    raise RuntimeError(f"no non-negative diversity instance after {max_attempts} draws")


def _in_ellipse(px, py, cx, cy, a, b, rho):
    dx, dy = px - cx, py - cy
    cr, sr = math.cos(rho), math.sin(rho)
    u = dx * cr + dy * sr
    v = -dx * sr + dy * cr
    return (u / a) ** 2 + (v / b) ** 2 <= 1.0


def gen_matroid_coverage(n_facilities: int, r: int, demand_grid: int, seed: int, k: int | None = None) -> Instance:
    """Facilities with r elliptical coverage modes each; at most one mode per facility.

    Demand points sit on a demand_grid x demand_grid lattice in the unit
    square and facilities on the centres of a ceil(sqrt(n)) lattice.  Mode
    ellipses have axes 0.1*s and 0.1/s (full lengths) with s ~ N(3, 1/3)
    and a uniform rotation.  With ``k`` the constraint also caps the number
    of chosen modes.
    """
    if min(n_facilities, r, demand_grid) < 1:
        raise ValueError("all parameters must be >= 1")
    g = rng(seed, STREAM_GENERATOR, 0xE1)
    side = math.ceil(math.sqrt(n_facilities))
    coords = (np.arange(demand_grid) + 0.5) / demand_grid
    px, py = np.meshgrid(coords, coords, indexing="ij")
    px, py = px.ravel(), py.ravel()
    sets, part_of, params = [], [], []
    for fac in range(n_facilities):
        cx = (fac % side + 0.5) / side
        cy = (fac // side + 0.5) / side
        for _ in range(r):
            s = max(float(g.normal(3.0, math.sqrt(1.0 / 3.0))), 0.1)
            rho = float(g.uniform(0.0, 2.0 * math.pi))
            a, b = 0.05 * s, 0.05 / s
            inside = _in_ellipse(px, py, cx, cy, a, b, rho)
            sets.append(np.flatnonzero(inside).tolist())
            part_of.append(fac)
            params.append((cx, cy, a, b, rho))
    f = CoverageFunction(sets, demand_grid * demand_grid)
    matroid = PartitionMatroid(part_of, 1)
    c: Constraint = matroid if k is None else Intersection([Cardinality(k), matroid])
    return Instance(f"ellipse_n{n_facilities}_r{r}_s{seed}", f, c,
                    meta={"part_of": part_of, "ellipses": params, "matroid": matroid})


def coverage_from_transactions(lines, k: int, name: str) -> Instance:
    remap: dict[int, int] = {}
    sets = []
    for lineno, line in enumerate(lines, start=1):
        toks = line.split()
        if not toks:
            continue
        row = []
        for t in toks:
            if not t.isdigit():
                raise FimiFormatError(f"{name}: line {lineno}: bad item token {t!r}")
            row.append(remap.setdefault(int(t), len(remap)))
        sets.append(row)
    if not sets:
        raise FimiFormatError(f"{name}: no transactions")
    f = CoverageFunction(sets, len(remap))
    return Instance(name, f, Cardinality(k), meta={"item_ids": list(remap)})


def load_fimi(path, k: int) -> Instance:
    """One transaction per line, space-separated non-negative integer items.

    Transaction i becomes ground element i; items are re-indexed densely in
    first-occurrence order (original ids kept in ``meta['item_ids']``).
    """
    path = Path(path)
    with path.open() as fh:
        return coverage_from_transactions(fh, k, path.name)


def write_fimi(inst: Instance, path) -> None:
    f = inst.f
    if not isinstance(f, CoverageFunction):
        raise ValueError("only coverage instances can be written as FIMI")
    if any(not s for s in f.sets):
        raise ValueError("FIMI cannot represent empty sets; use JSON")
    ids = inst.meta.get("item_ids") or list(range(1, f.universe_size + 1))
    with Path(path).open("w") as fh:
        for s in f.sets:
            fh.write(" ".join(str(i) for i in sorted(ids[u] for u in s)) + "\n")


def gen_random_coverage(n_sets: int, universe: int, density: float, seed: int, k: int | None = None) -> Instance:
    """Each (set, item) membership is an independent coin with bias ``density``."""
    if not 0.0 < density <= 1.0:
        raise ValueError("density must lie in (0, 1]")
    g = rng(seed, STREAM_GENERATOR, 0xC0)
    member = g.random((n_sets, universe)) < density
    sets = [np.flatnonzero(row).tolist() for row in member]
    c: Constraint = Unconstrained() if k is None else Cardinality(k)
    return Instance(f"coverage_n{n_sets}_u{universe}_s{seed}", CoverageFunction(sets, universe), c)


def gen_exemplar(n: int, d: int, seed: int, k: int | None = None, clusters: int | None = None,
                 spread: float = 0.35) -> Instance:
    """Clustered Gaussian vectors, each with its own mean value subtracted, then scaled to unit norm.

    Points are drawn around ``clusters`` random centres (default about
    sqrt(n)) with noise ``spread``.  Isotropic vectors in many dimensions
    are nearly equidistant, which makes the objective proportional to |S|;
    the clusters give it structure worth summarizing.
    """
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    clusters = max(1, round(math.sqrt(n))) if clusters is None else clusters
    if clusters < 1 or spread < 0:
        raise ValueError("need clusters >= 1 and spread >= 0")
    g = rng(seed, STREAM_GENERATOR, 0xE5)
    centres = g.normal(size=(clusters, d))
    X = centres[g.integers(0, clusters, size=n)] + spread * g.normal(size=(n, d))
    X = X - X.mean(axis=1, keepdims=True)
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    X = np.where(norms > 0, X / np.where(norms > 0, norms, 1.0), X)
    c: Constraint = Unconstrained() if k is None else Cardinality(k)
    return Instance(f"exemplar_n{n}_d{d}_s{seed}", ExemplarFunction(X), c)


def gen_modular(weights, k: int | None = None) -> Instance:
    c: Constraint = Unconstrained() if k is None else Cardinality(k)
    return Instance("modular", ModularFunction(weights), c)


def instance_digest(inst: Instance) -> str:
    """Stable hash of the objective data, for golden-value tests."""
    h = hashlib.sha256()
    f = inst.f
    h.update(type(f).__name__.encode())
    if isinstance(f, CoverageFunction):
        h.update(str(f.universe_size).encode())
        for s in f.sets:
            h.update((",".join(map(str, sorted(s))) + ";").encode())
    elif isinstance(f, DiversityFunction):
        h.update(np.round(f.s, 12).tobytes())
        h.update(repr(f.lam).encode())
    elif isinstance(f, ExemplarFunction):
        h.update(np.round(f.points, 12).tobytes())
    elif isinstance(f, ModularFunction):
        h.update(f.weights.tobytes())
    return h.hexdigest()


# JSON interchange used by the ``gen`` subcommand.

def _constraint_to_json(c: Constraint) -> dict:
    if isinstance(c, Cardinality):
        return {"kind": "cardinality", "k": c.k}
    if isinstance(c, PartitionMatroid):
        n = max(c.part_of) + 1 if c.part_of else 0
        return {"kind": "partition_matroid", "part_of": [c.part_of[e] for e in range(n)],
                "capacity": {str(b): v for b, v in c.capacity.items()}}
    if isinstance(c, Intersection):
        return {"kind": "p_system", "members": [_constraint_to_json(m) for m in c.members]}
    if isinstance(c, Knapsack):
        return {"kind": "knapsack", "weight": [float(w) for w in c.weight], "budget": c.budget}
    if isinstance(c, Unconstrained):
        return {"kind": "none"}
    raise ValueError(f"cannot serialise {c!r}")


def _constraint_from_json(d: dict) -> Constraint:
    kind = d["kind"]
    if kind == "cardinality":
        return Cardinality(d["k"])
    if kind == "partition_matroid":
        return PartitionMatroid(d["part_of"], {int(b): v for b, v in d["capacity"].items()})
    if kind == "p_system":
        return Intersection([_constraint_from_json(m) for m in d["members"]])
    if kind == "knapsack":
        return Knapsack(d["weight"], d["budget"])
    if kind == "none":
        return Unconstrained()
    raise ValueError(f"unknown constraint kind {kind!r}")


def instance_to_json(inst: Instance) -> dict:
    f = inst.f
    out: dict = {"name": inst.name, "constraint": _constraint_to_json(inst.c)}
    if isinstance(f, CoverageFunction):
        out["objective"] = {"kind": "coverage", "universe_size": f.universe_size,
                            "sets": [sorted(s) for s in f.sets]}
    elif isinstance(f, DiversityFunction):
        out["objective"] = {"kind": "diversity", "lambda": f.lam, "similarity": f.s.tolist()}
    elif isinstance(f, ExemplarFunction):
        out["objective"] = {"kind": "exemplar", "points": f.points.tolist()}
    elif isinstance(f, ModularFunction):
        out["objective"] = {"kind": "modular", "weights": f.weights.tolist()}
    else:
        raise ValueError(f"cannot serialise objective {type(f).__name__}")
    if inst.known_opt is not None:
        out["known_opt"] = inst.known_opt
    if inst.adversarial_partition is not None:
        out["adversarial_partition"] = {"m": inst.adversarial_partition.m,
                                        "machine_of": list(inst.adversarial_partition.machine_of)}
    return out


def instance_from_json(d: dict) -> Instance:
    o = d["objective"]
    kind = o["kind"]
    if kind == "coverage":
        f: SetFunction = CoverageFunction(o["sets"], o["universe_size"])
    elif kind == "diversity":
        f = DiversityFunction(o["similarity"], o["lambda"])
    elif kind == "exemplar":
        f = ExemplarFunction(o["points"])
    elif kind == "modular":
        f = ModularFunction(o["weights"])
    else:
        raise ValueError(f"unknown objective kind {kind!r}")
    part = None
    if "adversarial_partition" in d:
        ap = d["adversarial_partition"]
        part = Partition(tuple(ap["machine_of"]), ap["m"])
    return Instance(d.get("name", "instance"), f, _constraint_from_json(d["constraint"]),
                    known_opt=d.get("known_opt"), adversarial_partition=part)


def save_instance(inst: Instance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_json(inst)) + "\n")


def load_instance(path) -> Instance:
    return instance_from_json(json.loads(Path(path).read_text()))
