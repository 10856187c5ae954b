"""Solution-space geometry of random k-XOR-SAT: cores, stripping depth, flippable cycles, clusters."""

from .gf2 import (CapExceeded, Gf2System, LengthMismatch, enumerate_solutions, is_solution,
                  random_solution, rank, rank_and_kernel)
from .hypergraph import (Hypergraph, gen_configuration, gen_hnm, gen_hnp, make_rng,
                         max_component_size, parse_instance, read_instance, write_instance)
from .peeling import (StripDigraph, StrippingTrace, build_digraph, depth_upper, exact_depth,
                      r_core, reach_stats, round_degree_histograms)
from .flip import (FlippableCycle, GammaStructure, build_gamma, cycle_mass_statistic,
                   find_core_flippable_cycles, is_flippable_set, is_linked_set,
                   minimal_flippable_sets)
from .clusters import (ClusterStructure, build_cluster_structure, cluster_count, cluster_walk,
                       extend_core_solution, frozen_variables, is_d_connected, same_cluster)
from .theory import (ThresholdProfile, critical_density, molloy_reed_sum, mu_of,
                     sat_threshold_estimate, strip_recursion, threshold_profile)

__version__ = "0.1.0"
