"""Bound suites: each function checks one guarantee end to end and reports a verdict.

``scale='full'`` runs at the sizes used by the acceptance tests;
``scale='quick'`` shrinks instance and trial counts for a fast smoke run
(``rgreedi verify --quick``).
"""

from __future__ import annotations

import math
import tempfile
import time
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .constraints import Cardinality, Intersection, PartitionMatroid, Unconstrained, greedy_alpha
from .core import derive_seed, indicator, lovasz_extension, rng
from .distributed import det_greedi, nm_rand_greedi, partition_fixed, partition_random, rand_greedi
from .greedy import double_greedy_unconstrained, greedy
from .instances import (Instance, gen_diverse_relevant, gen_exemplar, gen_random_coverage, gen_tight_instance)
from .objectives import DiversityFunction, ModularFunction
from .verify import (appendix_a_bound, brute_force_opt, check_gp, check_theorem_bound, estimate_expected_value)

E_FACTOR = 1.0 - 1.0 / math.e
SUITE_STREAM = 0x5017


@dataclass
class CriterionResult:
    name: str
    passed: bool
    detail: str
    worst: float | None = None
    seconds: float = 0.0
    failures: list = field(default_factory=list)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(fn):
    def wrapper(*args, **kw):
        t0 = time.perf_counter()
        res = fn(*args, **kw)
        res.seconds = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# Instance families shared between criteria ---------------------------------------------

def coverage_family(count: int, seed: int, n_range=(8, 15), k_range=(1, 5)) -> list[Instance]:
    """Random coverage instances with cardinality constraints; parameters drawn per instance."""
    out = []
    for i in range(count):
        g = rng(seed, SUITE_STREAM, 1, i)
        n = int(g.integers(*n_range))
        universe = int(g.integers(10, 31))
        density = float(g.uniform(0.1, 0.4))
        k = int(g.integers(*k_range))
        out.append(gen_random_coverage(n, universe, density, seed=derive_seed(seed, 10_000 + i), k=k))
    return out


def matroid_family(count: int, seed: int, kind: str, n_range=(10, 13)) -> list[Instance]:
    """Coverage under a random partition matroid, or that matroid intersected with a cardinality bound."""
    out = []
    for i in range(count):
        g = rng(seed, SUITE_STREAM, 2 if kind == "matroid" else 3, i)
        n = int(g.integers(*n_range))
        base = gen_random_coverage(n, int(g.integers(10, 31)), float(g.uniform(0.1, 0.4)),
                                   seed=derive_seed(seed, 20_000 + i))
        blocks = int(g.integers(3, 6))
        part_of = [int(b) for b in g.integers(0, blocks, size=n)]
        if kind == "matroid":
            cap = [int(c) for c in g.integers(1, 3, size=blocks)]
            c = PartitionMatroid(part_of, cap)
        else:
            c = Intersection([Cardinality(int(g.integers(2, 4))), PartitionMatroid(part_of, 1)])
        out.append(base.with_constraint(c, name=f"{base.name}_{kind}"))
    return out


@lru_cache(maxsize=None)
def _opt(inst: Instance) -> float:
    return brute_force_opt(range(inst.n), inst.f, inst.c).opt_value


# Criteria ---------------------------------------------------------------------------------

@_timed
def centralized_greedy(scale="full", seed=0) -> CriterionResult:
    """Greedy >= (1 - 1/e) OPT on random coverage instances."""
    count = 200 if scale == "full" else 40
    insts = coverage_family(count, seed)
    bad, worst = [], 1.0
    for inst in insts:
        opt = _opt(inst)
        v = greedy(range(inst.n), inst.f, inst.c).value
        if opt > 0:
            worst = min(worst, v / opt)
        if v < E_FACTOR * opt - 1e-9:
            bad.append(inst.name)
    return CriterionResult("centralized greedy >= (1-1/e) OPT", not bad,
                           f"{count} instances, worst ratio {worst:.4f}, violations {len(bad)}", worst, failures=bad)


def rand_greedi_instances(seed: int, per_class: int) -> list[tuple[Instance, int, float]]:
    """(instance, m, alpha) triples for the randomized monotone bound."""
    cases = []
    for j, inst in enumerate(coverage_family(per_class, seed + 1, n_range=(12, 17), k_range=(2, 5))):
        cases.append((inst, 2 if j % 2 == 0 else 4, E_FACTOR))
    for j, inst in enumerate(matroid_family(per_class, seed + 1, "matroid", n_range=(12, 17))):
        cases.append((inst, 2 if j % 2 == 0 else 4, 0.5))
    for j, inst in enumerate(matroid_family(per_class, seed + 1, "psystem", n_range=(12, 17))):
        cases.append((inst, 2 if j % 2 == 0 else 4, 1.0 / 3.0))
    return cases


@_timed
def rand_greedi_bound(scale="full", seed=0) -> CriterionResult:
    """RandGreeDi with greedy on the last machine: mean >= (alpha/2) OPT - 3 SE."""
    per_class, trials = (10, 500) if scale == "full" else (3, 60)
    bad, worst = [], math.inf
    for inst, m, alpha in rand_greedi_instances(seed, per_class):
        opt = _opt(inst)
        rep = estimate_expected_value(lambda s: rand_greedi(inst, m, seed=s), trials, master_seed=seed)
        if opt > 0:
            worst = min(worst, rep.mean / opt / (alpha / 2))
        if not check_theorem_bound(rep, opt, alpha / 2):
            bad.append((inst.name, rep.mean, opt))
    return CriterionResult("RandGreeDi mean >= (alpha/2) OPT - 3SE", not bad,
                           f"{3 * per_class} instances x {trials} seeds, worst mean/(alpha/2 OPT) {worst:.3f}",
                           worst, failures=bad)


def diversity_family(count: int, seed: int) -> list[Instance]:
    out = []
    for i in range(count):
        g = rng(seed, SUITE_STREAM, 4, i)
        n = int(g.integers(8, 13))
        k = int(g.integers(2, 4))
        out.append(gen_diverse_relevant(n, k, seed=derive_seed(seed, 30_000 + i)))
    return out


@_timed
def nm_rand_greedi_bound(scale="full", seed=0) -> CriterionResult:
    """NMRandGreeDi on diversity instances: mean >= 0.12 OPT - 3 SE with m = 2."""
    count, trials = (20, 500) if scale == "full" else (5, 60)
    bad, worst = [], math.inf
    for inst in diversity_family(count, seed):
        opt = _opt(inst)
        rep = estimate_expected_value(lambda s: nm_rand_greedi(inst, 2, s), trials, master_seed=seed)
        if opt > 0:
            worst = min(worst, rep.mean / opt)
        if not check_theorem_bound(rep, opt, 0.12):
            bad.append((inst.name, rep.mean, opt))
    return CriterionResult("NMRandGreeDi mean >= 0.12 OPT - 3SE", not bad,
                           f"{count} instances x {trials} seeds, worst mean/OPT {worst:.3f}", worst, failures=bad)


@_timed
def greedy_property(scale="full", seed=0) -> CriterionResult:
    """f(G) >= alpha f(G + S) for every feasible S, per constraint class."""
    count = 50 if scale == "full" else 10
    families = [
        ("cardinality", coverage_family(count, seed + 2, n_range=(8, 13)), E_FACTOR),
        ("matroid", matroid_family(count, seed + 2, "matroid"), 0.5),
        ("p=2 system", matroid_family(count, seed + 2, "psystem"), 1.0 / 3.0),
    ]
    parts, failed, overall = [], [], math.inf
    for label, insts, alpha in families:
        worst = 1.0
        for inst in insts:
            ok, w = check_gp(inst.f, inst.c, range(inst.n), alpha)
            worst = min(worst, w)
            if not ok:
                failed.append((label, inst.name, w))
        overall = min(overall, worst / alpha)
        parts.append(f"{label} worst {worst:.4f} (alpha {alpha:.4f})")
    return CriterionResult("greedy property (GP)", not failed, "; ".join(parts), overall, failures=failed)


def lemma2_case(inst: Instance, A: frozenset):
    """B = elements e outside A with greedy(A + e) == greedy(A); returns (B, greedy(A), greedy(A + B))."""
    gA = greedy(A, inst.f, inst.c).final_set
    B = frozenset(e for e in range(inst.n) if e not in A and greedy(A | {e}, inst.f, inst.c).final_set == gA)
    gAB = greedy(A | B, inst.f, inst.c).final_set
    return B, gA, gAB


@_timed
def rejected_elements(scale="full", seed=0) -> CriterionResult:
    """greedy(A + B) == greedy(A) when each e in B alone leaves greedy(A) unchanged."""
    target = 500 if scale == "full" else 60
    g = rng(seed, SUITE_STREAM, 5)
    done, bad, i = 0, [], 0
    while done < target:
        kind = i % 3
        s = derive_seed(seed, 40_000 + i)
        n = int(g.integers(8, 15))
        if kind == 0:
            inst = gen_random_coverage(n, int(g.integers(8, 25)), float(g.uniform(0.1, 0.4)), s,
                                       k=int(g.integers(1, 5)))
        elif kind == 1:
            base = gen_random_coverage(n, int(g.integers(8, 25)), float(g.uniform(0.1, 0.4)), s)
            blocks = int(g.integers(2, 5))
            inst = base.with_constraint(PartitionMatroid([int(b) for b in g.integers(0, blocks, size=n)], 1))
        else:
            inst = gen_diverse_relevant(n, int(g.integers(2, 4)), s)
        i += 1
        A = frozenset(np.flatnonzero(g.random(n) < 0.5).tolist())
        B, gA, gAB = lemma2_case(inst, A)
        if not B:
            continue
        done += 1
        if gA != gAB:
            bad.append((inst.name, sorted(A), sorted(B)))
    return CriterionResult("greedy(A u B) == greedy(A)", not bad, f"{done} cases with non-empty B, {len(bad)} mismatches",
                           failures=bad)


def tight_runs(l: int, trials: int, seed: int):
    inst = gen_tight_instance(l)
    det = det_greedi(inst, inst.adversarial_partition, lazy=True)
    m = inst.adversarial_partition.m
    est = estimate_expected_value(lambda s: rand_greedi(inst, m, seed=s, lazy=True), trials, master_seed=seed)
    return inst, det, est


@_timed
def tight_instance(scale="full", seed=0) -> CriterionResult:
    """Deterministic GreeDi on the adversarial partition vs RandGreeDi on the tight family.

    Asserted: OPT covers l^2 + l^3 items; det coverage <= 2 l^2; RandGreeDi
    mean ratio strictly above the deterministic ratio for l >= 3.
    """
    ls, trials = ((2, 3, 4, 5), 200) if scale == "full" else ((2, 3), 30)
    parts, failed = [], []
    for l in ls:
        inst, det, est = tight_runs(l, trials, seed)
        universe = l * l + l ** 3
        opt_cov = inst.f(inst.meta["opt_set"])
        if opt_cov != universe or inst.known_opt != universe:
            failed.append((l, "opt", opt_cov))
        if det.final_value > 2 * l * l:
            failed.append((l, "det<=2l^2", det.final_value))
        det_ratio = det.final_value / universe
        rand_ratio = est.mean / universe
        if l >= 3 and not rand_ratio > det_ratio:
            failed.append((l, "rand>det", rand_ratio, det_ratio))
        parts.append(f"l={l}: OPT={opt_cov:g} det={det.final_value:g} (cap 2l^2={2 * l * l}) "
                     f"det ratio {det_ratio:.3f} rand ratio {rand_ratio:.3f}")
    return CriterionResult("tight family for deterministic GreeDi", not failed, "; ".join(parts), failures=failed)


def appendix_a_pairs(scale="full", seed=0):
    """(instance, partition, opt) triples under cardinality constraints drawn from the other suites."""
    c1 = 200 if scale == "full" else 40
    per_class = 10 if scale == "full" else 3
    rand_seeds = 20 if scale == "full" else 5
    pairs = []
    for inst in coverage_family(c1, seed):
        for m in (2, 4):
            for strat in ("block", "round_robin"):
                pairs.append((inst, partition_fixed(inst.n, m, strat)))
            pairs.append((inst, partition_random(inst.n, m, derive_seed(seed, m))))
    for inst, m, _ in rand_greedi_instances(seed, per_class):
        if not isinstance(inst.c, Cardinality):
            continue
        for t in range(rand_seeds):
            pairs.append((inst, partition_random(inst.n, m, derive_seed(seed, t))))
        for strat in ("block", "round_robin"):
            pairs.append((inst, partition_fixed(inst.n, m, strat)))
    for l in ((2, 3, 4, 5) if scale == "full" else (2, 3)):
        inst = gen_tight_instance(l)
        m = inst.adversarial_partition.m
        pairs.append((inst, inst.adversarial_partition))
        for t in range(3):
            pairs.append((inst, partition_random(inst.n, m, derive_seed(seed, t))))
    return pairs


@_timed
def appendix_a(scale="full", seed=0) -> CriterionResult:
    """Deterministic GreeDi ratio >= (1-1/e)/(2 sqrt k) for every partition."""
    bad, worst, count = [], math.inf, 0
    for inst, part in appendix_a_pairs(scale, seed):
        opt = inst.known_opt if inst.known_opt is not None else _opt(inst)
        rep = det_greedi(inst, part, lazy=True)
        ratio = rep.final_value / opt if opt > 0 else 1.0
        bound = appendix_a_bound(inst.c.k)
        worst = min(worst, ratio / bound)
        count += 1
        if ratio < bound - 1e-12:
            bad.append((inst.name, part.m, ratio, bound))
    return CriterionResult("deterministic GreeDi >= (1-1/e)/(2 sqrt k)", not bad,
                           f"{count} instance/partition pairs, worst ratio/bound {worst:.3f}", worst, failures=bad)


def lovasz_family(count: int, seed: int) -> list:
    fs = []
    for i in range(count):
        g = rng(seed, SUITE_STREAM, 6, i)
        n = int(g.integers(6, 13))
        kind = i % 4
        s = derive_seed(seed, 50_000 + i)
        if kind == 0:
            fs.append(gen_random_coverage(n, int(g.integers(8, 25)), float(g.uniform(0.1, 0.5)), s).f)
        elif kind == 1:
            fs.append(gen_diverse_relevant(n, n, s, lam=float(g.uniform(0.5, 1.0))).f)
        elif kind == 2:
            fs.append(gen_exemplar(n, int(g.integers(8, 33)), s).f)
        else:
            fs.append(ModularFunction(g.uniform(0.0, 10.0, size=n)))
    return fs


@_timed
def lovasz(scale="full", seed=0) -> CriterionResult:
    """Extension agrees with f on indicators, satisfies f(cx) >= c f(x), and the random-set bound."""
    count = 20 if scale == "full" else 5
    pairs = 10_000 if scale == "full" else 1_000
    draws = 10_000 if scale == "full" else 2_000
    fs = lovasz_family(count, seed)
    failed = []
    max_err = 0.0
    for idx, f in enumerate(fs):
        for mask in range(1 << f.n):
            S = frozenset(i for i in range(f.n) if mask >> i & 1)
            err = abs(lovasz_extension(f, indicator(S, f.n)) - f(S))
            max_err = max(max_err, err)
            if err > 1e-12:
                failed.append(("indicator", idx, sorted(S), err))
    g = rng(seed, SUITE_STREAM, 7)
    scale_viol = 0
    for j in range(pairs):
        f = fs[j % len(fs)]
        x = g.random(f.n)
        c = float(g.random())
        if lovasz_extension(f, c * x) < c * lovasz_extension(f, x) - 1e-9:
            scale_viol += 1
    if scale_viol:
        failed.append(("scaling", scale_viol))
    mc_fail = 0
    for idx, f in enumerate(fs):
        p = g.random(f.n)
        c = float(g.uniform(0.2, 1.0))
        vals = np.empty(draws)
        incl = g.random((draws, f.n)) < c * p
        for t in range(draws):
            vals[t] = f(frozenset(np.flatnonzero(incl[t]).tolist()))
        se = vals.std(ddof=1) / math.sqrt(draws)
        if vals.mean() < c * lovasz_extension(f, p) - 3 * se:
            mc_fail += 1
            failed.append(("random set", idx))
    return CriterionResult("Lovasz extension properties", not failed,
                           f"{count} objectives, max indicator error {max_err:.1e}, "
                           f"scaling violations {scale_viol}/{pairs}, random-set failures {mc_fail}/{len(fs)}",
                           failures=failed)


def nonneg_nonmonotone_family(count: int, seed: int) -> list[Instance]:
    """Diversity objectives with lam in [0.5, 1]: non-negative on every set, generally non-monotone."""
    out = []
    for i in range(count):
        g = rng(seed, SUITE_STREAM, 8, i)
        n = int(g.integers(6, 13))
        lam = 1.0 if i % 2 == 0 else float(g.uniform(0.5, 1.0))
        out.append(gen_diverse_relevant(n, n, derive_seed(seed, 60_000 + i), lam=lam).with_constraint(Unconstrained()))
    return out


@_timed
def double_greedy(scale="full", seed=0) -> CriterionResult:
    """Randomized double greedy mean >= max/2 - 3 SE, unconstrained."""
    count, trials = (20, 2000) if scale == "full" else (5, 200)
    bad, worst = [], math.inf
    for inst in nonneg_nonmonotone_family(count, seed):
        opt = _opt(inst)
        f = inst.f
        rep = estimate_expected_value(lambda s: f(double_greedy_unconstrained(range(f.n), f, s)), trials,
                                      master_seed=seed)
        if opt > 0:
            worst = min(worst, rep.mean / opt)
        if not check_theorem_bound(rep, opt, 0.5):
            bad.append((inst.name, rep.mean, opt))
    return CriterionResult("double greedy mean >= OPT/2 - 3SE", not bad,
                           f"{count} instances x {trials} runs, worst mean/OPT {worst:.3f}", worst, failures=bad)


@_timed
def determinism(scale="full", seed=0) -> CriterionResult:
    """m = 1 RandGreeDi equals centralized greedy; repeated runs give byte-identical CSV."""
    from .experiments import ExperimentConfig, run_and_write

    count = 50 if scale == "full" else 10
    insts = coverage_family(count // 2, seed + 3) + matroid_family(count - count // 2, seed + 3, "matroid")
    bad = []
    for inst in insts:
        central = greedy(range(inst.n), inst.f, inst.c)
        rep = rand_greedi(inst, 1, seed=derive_seed(seed, 7))
        if rep.final_set != central.final_set or rep.final_value != central.value:
            bad.append(inst.name)
    blobs = []
    with tempfile.TemporaryDirectory() as tmp:
        for run in range(2):
            cfg = ExperimentConfig(experiment="coverage_ratio", k_range=[1, 2, 3], m=3, trials=5, seed=seed,
                                   n=12, universe=20, density=0.25, output_dir=str(Path(tmp) / f"r{run}"))
            _, path = run_and_write(cfg)
            blobs.append(path.read_bytes())
    same_csv = blobs[0] == blobs[1]
    if not same_csv:
        bad.append("csv differs")
    return CriterionResult("determinism and m=1 collapse", not bad,
                           f"{len(insts)} collapse checks, mismatches {len(bad) - (0 if same_csv else 1)}, "
                           f"CSV identical: {same_csv}", failures=bad)


SUITES = {
    "greedy": centralized_greedy,
    "randgreedi": rand_greedi_bound,
    "nmrandgreedi": nm_rand_greedi_bound,
    "gp": greedy_property,
    "lemma2": rejected_elements,
    "tight": tight_instance,
    "appendix_a": appendix_a,
    "lovasz": lovasz,
    "double_greedy": double_greedy,
    "determinism": determinism,
}


def run_suites(names=None, scale="full", seed=0) -> list[CriterionResult]:
    names = list(SUITES) if names is None else names
    return [SUITES[name](scale=scale, seed=seed) for name in names]
