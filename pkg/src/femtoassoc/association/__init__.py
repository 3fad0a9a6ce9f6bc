"""Cell-association algorithms, the exhaustive oracle and lower bounds."""
from .assignment import Assignment, InfeasibleAssignmentError
from .greedy import greedy
from .matching import hopcroft_karp
from .oracle import InstanceTooLargeError, brute_force_optimal, lower_bounds
from .randomized import ExpectedLoadState, randomized, randomized_assign, randomized_reduce
from .restrict import restrict_by_ratio, restrict_by_ratio_with_mbs, restrict_by_time
from .rounding import (
    MatchingConstructionError,
    RoundingGraph,
    build_rounding_graph,
    max_bipartite_matching,
    rounding_approximation,
)
from .selfish import selfish
from .sequential import InfeasibleProblemError, sequential_fixing

__all__ = [
    "Assignment",
    "ExpectedLoadState",
    "InfeasibleAssignmentError",
    "InfeasibleProblemError",
    "InstanceTooLargeError",
    "MatchingConstructionError",
    "RoundingGraph",
    "brute_force_optimal",
    "build_rounding_graph",
    "greedy",
    "hopcroft_karp",
    "lower_bounds",
    "max_bipartite_matching",
    "randomized",
    "randomized_assign",
    "randomized_reduce",
    "restrict_by_ratio",
    "restrict_by_ratio_with_mbs",
    "restrict_by_time",
    "rounding_approximation",
    "selfish",
    "sequential_fixing",
]
