import numpy as np
import pytest

from rgreedi import CountingOracle, FunctionOracle, ModularFunction, canonical, element_set, marginal_gain
from rgreedi.core import check_lovasz_scaling, derive_seed, indicator, lovasz_extension, rng
from rgreedi.instances import gen_exemplar, gen_random_coverage

from conftest import all_subsets


def test_canonical_form_ignores_order_and_duplicates():
    assert canonical([3, 1, 3, 2, 1]) == (1, 2, 3)
    assert element_set([2, 0, 2]) == element_set([0, 2])


def test_element_set_rejects_out_of_range():
    with pytest.raises(ValueError):
        element_set([0, 5], n=5)
    with pytest.raises(ValueError):
        element_set([-1])


def test_marginal_gain_modular():
    assert marginal_gain(ModularFunction([1, 2, 3]), 2, ()) == 3


def test_marginal_gain_coverage(two_sets):
    # only item c is new
    assert marginal_gain(two_sets, 1, {0}) == 1


def test_marginal_gain_rejects_member(two_sets):
    with pytest.raises(ValueError):
        marginal_gain(two_sets, 0, {0})


def test_oracle_rejects_bad_ids(two_sets):
    with pytest.raises(ValueError):
        two_sets({2})


def test_counting_oracle_counts_calls(two_sets):
    cf = CountingOracle(two_sets)
    cf({0})
    cf({0, 1})
    assert cf.calls == 2
    assert cf({0, 1}) == 3


def test_function_oracle_wraps_callable():
    f = FunctionOracle(lambda S: float(len(S)), n=4, monotone=True)
    assert f({0, 3}) == 2.0
    assert f.monotone


def test_lovasz_indicator_equals_value(two_sets):
    for S in all_subsets(2):
        assert lovasz_extension(two_sets, indicator(S, 2)) == two_sets(S)


def test_lovasz_modular_is_linear():
    w = np.array([1.5, 2.0, 0.25, 4.0])
    x = np.array([0.1, 0.9, 0.5, 0.3])
    assert lovasz_extension(ModularFunction(w), x) == pytest.approx(w @ x, abs=1e-12)


def test_lovasz_hand_value(two_sets):
    # 0.5 * f({s0, s1}) + 0.5 * f({})
    assert lovasz_extension(two_sets, [0.5, 0.5]) == pytest.approx(1.5)


def test_lovasz_uses_at_most_n_plus_one_calls():
    inst = gen_random_coverage(9, 15, 0.3, seed=1)
    cf = CountingOracle(inst.f)
    lovasz_extension(cf, rng(0, 9).random(9))
    assert cf.calls <= 10


def test_lovasz_rejects_bad_weights(two_sets):
    with pytest.raises(ValueError):
        lovasz_extension(two_sets, [0.5, 1.5])
    with pytest.raises(ValueError):
        lovasz_extension(two_sets, [0.5])


def test_lovasz_ties_do_not_matter(two_sets):
    assert lovasz_extension(two_sets, [0.3, 0.3]) == pytest.approx(0.3 * 3)


def test_lovasz_convex_on_random_pairs():
    g = rng(3, 9)
    for f in (gen_random_coverage(8, 14, 0.3, seed=2).f, gen_exemplar(8, 8, seed=2).f):
        for _ in range(1000):
            x, y = g.random(f.n), g.random(f.n)
            mid = lovasz_extension(f, (x + y) / 2)
            assert mid <= (lovasz_extension(f, x) + lovasz_extension(f, y)) / 2 + 1e-9


def test_scaling_edge_cases(two_sets):
    x = [0.7, 0.2]
    assert check_lovasz_scaling(two_sets, x, 1.0)
    assert check_lovasz_scaling(two_sets, x, 0.0)
    assert check_lovasz_scaling(gen_random_coverage(10, 20, 0.25, seed=4).f, rng(1, 9).random(10), 0.5)


def test_scaling_rejects_bad_c(two_sets):
    with pytest.raises(ValueError):
        check_lovasz_scaling(two_sets, [0.1, 0.2], 1.5)


def test_rng_streams_are_reproducible_and_disjoint():
    a = rng(42, 1).random(5)
    assert np.array_equal(a, rng(42, 1).random(5))
    assert not np.array_equal(a, rng(42, 2).random(5))
    assert derive_seed(0, 1) == derive_seed(0, 1) != derive_seed(0, 2)
