import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from rgreedi import CoverageFunction, DiversityFunction, ModularFunction

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def all_subsets(n):
    for r in range(n + 1):
        for S in itertools.combinations(range(n), r):
            yield frozenset(S)


@st.composite
def coverage_functions(draw, max_n=8, max_universe=12):
    n = draw(st.integers(1, max_n))
    u = draw(st.integers(1, max_universe))
    sets = [draw(st.sets(st.integers(0, u - 1), max_size=u)) for _ in range(n)]
    return CoverageFunction(sets, u)


@st.composite
def modular_functions(draw, max_n=8):
    w = draw(st.lists(st.floats(0, 10, allow_nan=False), min_size=1, max_size=max_n))
    return ModularFunction(w)


@st.composite
def diversity_functions(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**31))
    lam = draw(st.floats(0.0, 2.0))
    u = np.random.default_rng(seed).uniform(0, 100, size=(n, n))
    s = np.triu(u, 1)
    return DiversityFunction(s + s.T, lam)


@st.composite
def subsets_of(draw, n):
    return frozenset(draw(st.sets(st.integers(0, n - 1), max_size=n))) if n else frozenset()


@pytest.fixture
def two_sets():
    """Sets {a,b} and {b,c} over items a=0, b=1, c=2."""
    return CoverageFunction([{0, 1}, {1, 2}], 3)
