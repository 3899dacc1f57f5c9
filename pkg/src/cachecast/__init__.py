"""Source-rate bounds and delivery allocations for cache-aided broadcast.

Scenario: K users behind a B-level broadcast channel, each holding a cache
of mu files' worth of prefetched data.  The package computes what per-file
source rate the transmitter can sustain (exact for two users and for
dominance-chain channels, an LP lower bound in general), the matching
information-theoretic ceiling, and Monte-Carlo validation of concrete
delivery allocations.
"""

from .caching import (
    CachingStrategy,
    CachingTuple,
    caching_tuple,
    central_coverage,
    central_intersection,
    central_strategy,
    coverage_measure,
    intersection_measure,
    strategy_from_intervals,
)
from .channel import (
    ChannelStats,
    StateRealization,
    ZeroWeightWarning,
    enhance,
    is_stochastically_dominant,
    pmf_from_ccdf,
    sample_states,
    validate_stats,
)
from .degraded import (
    ZAllocation,
    chain_stats,
    degraded_optimal_rate,
    degraded_order,
    z_to_y,
)
from .lp import (
    LpProblem,
    LpSolution,
    enumerate_vertices,
    lp_problem,
    solve_lp,
)
from .lp_scheme import (
    DeliveryAllocation,
    DeliveryLp,
    FeasibilityReport,
    achievable_rate_lp,
    build_delivery_lp,
    check_allocation,
    message_subsets,
)
from .simulator import (
    MessageOutcome,
    SimulationReport,
    empirical_ccdf,
    simulate_delivery,
)
from .errors import (
    BadT,
    CachecastError,
    EmptySubset,
    InfeasibleAllocation,
    InfeasibleZ,
    LengthMismatch,
    MuOutOfRange,
    NonIntegerT,
    NotDegraded,
    NotMonotone,
    NotTwoUser,
    NumericalFailure,
    OutOfRange,
    SolverError,
    TooLarge,
    TooManyUsers,
    UnexpectedLpStatus,
    ValidationError,
    WeightsUnsorted,
    ZeroDenominator,
)
from .two_user import (
    TwoUserAllocation,
    achievable_allocation_two_user,
    optimal_rate_two_user,
    rate_regions,
)
from .upper_bound import (
    UpperBoundReport,
    build_permutation_lp,
    objective_at,
    upper_bound_rate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
