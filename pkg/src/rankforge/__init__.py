"""Weighted distances between rankings and rank aggregation under them."""

__version__ = "0.1.0"

from .errors import CapabilityError, DimensionError, NonConvergenceError, ParseError, RankforgeError
from .perm import (
    Permutation,
    Transform,
    Transposition,
    all_permutations,
    compose,
    cycle_decomposition,
    inverse,
    inversion_set,
    kendall_tau,
)
from .weights import (
    AdjacentWeights,
    DefiningTree,
    TranspositionWeights,
    from_extended_tree,
    from_metric_tree,
    is_metric,
    min_weight_path,
)
from .wkendall import (
    d_phi_surrogate,
    exact_dijkstra,
    exact_dp,
    find_tau_monotone,
    monotonic_distance,
    two_level_distance,
    walk_lower_bound,
    weighted_kendall,
)
from .wtrans import (
    SimilarityMode,
    d_phi_general,
    exact_cayley,
    sandwich_bounds,
    similarity_distance,
    transposition_distance,
    weighted_transposition,
)
from .aggregation import (
    AggregationOutcome,
    VoteProfile,
    aggregate_bmls,
    aggregate_closest_vote,
    aggregate_exhaustive,
    aggregate_matching,
    cumulative_distance,
    kendall_distance,
)
from .markov import mc_aggregate, mc_ranking, stationary, transition_matrix
from .analysis import compare_methods, expected_weighted_kendall, monte_carlo_expected
