import math

import numpy as np
import pytest

from rgreedi import (Cardinality, CoverageFunction, FunctionOracle, Intersection, Knapsack, ModularFunction,
                     PartitionMatroid, Unconstrained, brute_force_opt, double_greedy_unconstrained, greedy,
                     nonmonotone_compose, repeated_greedy)
from rgreedi.core import derive_seed, rng
from rgreedi.greedy import nonmonotone_compose_detail
from rgreedi.instances import gen_diverse_relevant, gen_exemplar, gen_random_coverage

E = 1 - 1 / math.e


def test_top_k_on_modular():
    t = greedy(range(3), ModularFunction([5, 3, 1]), Cardinality(2))
    assert t.final_set == {0, 1}
    assert t.value == 8


def test_coverage_hand_trace():
    # sets {a,b,c}, {a,b}, {c,d}: gains 3, then 0 vs 1
    f = CoverageFunction([{0, 1, 2}, {0, 1}, {2, 3}], 4)
    t = greedy(range(3), f, Cardinality(2))
    assert t.order == (0, 2)
    assert t.gains == (3, 1)
    assert t.value == 4


def test_ties_go_to_smallest_id():
    t = greedy(range(4), ModularFunction([1, 2, 2, 2]), Cardinality(2))
    assert t.order == (1, 2)


def test_zero_gain_elements_are_added():
    t = greedy(range(3), ModularFunction([1, 0, 0]), Cardinality(3))
    assert t.final_set == {0, 1, 2}


def test_stops_on_negative_gain():
    f = FunctionOracle(lambda S: len(S) - 0.6 * len(S) ** 2 + 0.6 * (0 in S), n=3)
    t = greedy(range(3), f, Unconstrained())
    assert all(g >= 0 for g in t.gains)
    assert t.value == f(t.final_set)


def test_empty_pool():
    t = greedy([], ModularFunction([1, 2]), Cardinality(1))
    assert t.final_set == frozenset() and t.value == 0


def test_trace_is_consistent():
    inst = gen_random_coverage(12, 20, 0.25, seed=3, k=4)
    t = greedy(range(12), inst.f, inst.c)
    assert frozenset(t.order) == t.final_set
    assert sum(t.gains) == pytest.approx(t.value)
    assert inst.c.is_feasible(t.final_set)
    assert t.oracle_calls > 0


def test_greedy_is_deterministic():
    inst = gen_random_coverage(14, 25, 0.2, seed=8, k=5)
    assert greedy(range(14), inst.f, inst.c) == greedy(range(14), inst.f, inst.c)


def test_gains_non_increasing_on_monotone_cardinality():
    for seed in range(20):
        inst = gen_random_coverage(12, 20, 0.25, seed=seed, k=6)
        gains = greedy(range(12), inst.f, inst.c).gains
        assert all(a >= b for a, b in zip(gains, gains[1:]))


@pytest.mark.parametrize("seed", range(25))
def test_lazy_matches_naive(seed):
    g = rng(seed, 9)
    n = int(g.integers(5, 25))
    kind = seed % 3
    if kind == 0:
        inst = gen_random_coverage(n, 30, 0.2, seed=seed, k=int(g.integers(1, 8)))
        c = inst.c
    elif kind == 1:
        inst = gen_exemplar(n, 6, seed=seed)
        c = PartitionMatroid([int(b) for b in g.integers(0, 4, size=n)], 2)
    else:
        inst = gen_random_coverage(n, 30, 0.2, seed=seed)
        c = Intersection([Cardinality(4), PartitionMatroid([e % 3 for e in range(n)], 2)])
    naive = greedy(range(n), inst.f, c)
    lazy = greedy(range(n), inst.f, c, lazy=True)
    assert lazy.picks == naive.picks
    assert lazy.value == naive.value
    assert lazy.oracle_calls <= naive.oracle_calls


def test_lazy_with_ties_uses_smallest_id():
    f = CoverageFunction([{0}, {1}, {0, 1}, {2}, {3}, {2, 3}], 4)
    assert greedy(range(6), f, Cardinality(3), lazy=True).picks == greedy(range(6), f, Cardinality(3)).picks


def test_density_variant_on_knapsack():
    bound = 0.5 * E
    for seed in range(30):
        g = rng(seed, 10)
        inst = gen_random_coverage(10, 20, 0.25, seed=seed)
        c = Knapsack(g.uniform(0.5, 3.0, size=10), 4.0)
        t = greedy(range(10), inst.f, c, variant="density")
        opt = brute_force_opt(range(10), inst.f, c).opt_value
        assert c.is_feasible(t.final_set)
        assert t.value >= bound * opt - 1e-9


def test_density_variant_best_singleton():
    # one heavy valuable element beats the dense cheap one
    f = ModularFunction([1.0, 10.0])
    c = Knapsack([0.1, 5.0], 5.0)
    assert greedy(range(2), f, c, variant="density").final_set == {1}


def test_density_needs_knapsack():
    with pytest.raises(ValueError):
        greedy(range(2), ModularFunction([1, 2]), Cardinality(1), variant="density")
    with pytest.raises(ValueError):
        greedy(range(2), ModularFunction([1, 2]), Cardinality(1), variant="bogus")


def test_repeated_greedy_modular():
    t1, t2 = repeated_greedy(range(3), ModularFunction([5, 3, 1]), Cardinality(1))
    assert t1.final_set == {0} and t2.final_set == {1}


def test_repeated_greedy_small_pool():
    t1, t2 = repeated_greedy(range(2), ModularFunction([5, 3]), Cardinality(3))
    assert t1.final_set == {0, 1} and t2.final_set == frozenset()


def test_repeated_greedy_diversity_disjoint():
    inst = gen_diverse_relevant(6, 2, seed=1)
    t1, t2 = repeated_greedy(range(6), inst.f, inst.c)
    assert not t1.final_set & t2.final_set
    assert inst.c.is_feasible(t1.final_set) and inst.c.is_feasible(t2.final_set)


def test_double_greedy_modular_takes_everything():
    assert double_greedy_unconstrained(range(5), ModularFunction([1, 2, 0.5, 3, 1]), 7) == set(range(5))


def test_double_greedy_zero_function():
    f = FunctionOracle(lambda S: 0.0, n=4)
    assert f(double_greedy_unconstrained(range(4), f, 3)) == 0.0


def test_double_greedy_reproducible():
    f = gen_diverse_relevant(10, 10, seed=2, lam=0.9).f
    runs = {double_greedy_unconstrained(range(10), f, s) for s in (5, 5, 5)}
    assert len(runs) == 1
    assert double_greedy_unconstrained([], f, 5) == frozenset()


def test_double_greedy_stays_inside_pool():
    f = gen_diverse_relevant(8, 8, seed=4, lam=0.7).f
    for s in range(20):
        assert double_greedy_unconstrained({1, 4, 6}, f, s) <= {1, 4, 6}


def test_compose_on_monotone_never_prefers_t3():
    """T3 lies inside T1 so it cannot win; T2 occasionally beats T1 because greedy is not exact."""
    sources = []
    for seed in range(10):
        inst = gen_random_coverage(12, 20, 0.25, seed=seed, k=3)
        res = nonmonotone_compose_detail(range(12), inst.f, inst.c, seed)
        assert inst.f(res.t3) <= res.t1.value
        assert res.value == max(res.t1.value, res.t2.value)
        sources.append(res.source)
    assert "T3" not in sources and sources.count("T1") > len(sources) // 2


def test_compose_empty_pool():
    f = ModularFunction([1, 2])
    assert nonmonotone_compose([], f, Cardinality(1), 0) == frozenset()


def test_compose_feasible_and_bounded():
    """Mean over double-greedy seeds meets alpha / (2 (1 + alpha)) of OPT."""
    ratio = E / (2 * (1 + E))
    for seed in range(10):
        inst = gen_diverse_relevant(10, 3, seed=seed)
        opt = brute_force_opt(range(10), inst.f, inst.c).opt_value
        vals = []
        for t in range(40):
            S = nonmonotone_compose(range(10), inst.f, inst.c, derive_seed(seed, t))
            assert inst.c.is_feasible(S)
            vals.append(inst.f(S))
        assert np.mean(vals) >= ratio * opt - 1e-9


def test_empty_set_must_be_feasible():
    class Weird(Cardinality):
        def is_feasible(self, S):
            return len(S) == 1

    with pytest.raises(ValueError):
        greedy(range(2), ModularFunction([1, 1]), Weird(1))
