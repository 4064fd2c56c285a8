"""Randomized two-round distributed greedy for constrained submodular maximization."""

from .constraints import (Cardinality, Constraint, Intersection, Knapsack, PartitionMatroid, PSystem,
                          Unconstrained, extendable_candidates, greedy_alpha, is_feasible)
from .core import (CountingOracle, FunctionOracle, SetFunction, canonical, check_lovasz_scaling,
                   element_set, lovasz_extension, marginal_gain)
from .distributed import (Partition, RunReport, det_greedi, nm_rand_greedi, partition_fixed,
                          partition_random, rand_greedi)
from .greedy import GreedyTrace, double_greedy_unconstrained, greedy, nonmonotone_compose, repeated_greedy
from .instances import (Instance, gen_diverse_relevant, gen_exemplar, gen_matroid_coverage,
                        gen_random_coverage, gen_tight_instance, load_fimi)
from .objectives import CoverageFunction, DiversityFunction, ExemplarFunction, ModularFunction
from .verify import (EstimateReport, OptResult, brute_force_opt, check_appendix_a, check_gp,
                     check_theorem_bound, estimate_expected_value)

__version__ = "0.1.0"
