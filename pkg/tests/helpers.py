"""Shared reference data, generators, and invariant checkers for the tests.

Frozen constants were derived by hand (the short derivations sit next to
them) so the suite never trusts the code under test for its own oracle.
"""

from __future__ import annotations

import math
import warnings
from fractions import Fraction

import numpy as np

from cachecast.channel import ChannelStats, ZeroWeightWarning, enhance, is_stochastically_dominant
from cachecast.lp import FEAS_TOL, OPTIMAL, LpProblem, enumerate_vertices, lp_problem, solve_lp
from cachecast.lp_scheme import DeliveryAllocation, message_subsets
from cachecast.two_user import achievable_allocation_two_user, optimal_rate_two_user

# --- three-user reference scenarios -------------------------------------

# A dominance chain: every row is levelwise below the next.
CHAIN3_ROWS = [
    [0.5, 0.4, 0.3],
    [0.7, 0.5, 0.4],
    [0.9, 0.6, 0.5],
]

# No chain: user 1 is stronger on level 1 but weaker on levels 2-3.
MIXED3_ROWS = [
    [0.9, 0.3, 0.3],
    [0.7, 0.4, 0.4],
    [0.5, 0.5, 0.5],
]

THIRD = Fraction(1, 3)

# Optimal chain shares for CHAIN3 at mu = 1/3, derived by hand: levels 2-3
# go wholly to user 1, level 1 splits a : 1-a between users 1 and 2, and
# equalizing the two binding constraints
#     (2/3) f = 0.5 a + 0.4 + 0.3      (user 1, gap 2/3)
#     (1/3) f = 0.7 (1 - a)            (user 2, gap 1/3)
# gives 1.4 (1 - a) = 0.5 a + 0.7, so a = 7/19 and f = 2.1 * 12/19 = 126/95.
CHAIN3_RATE = 126.0 / 95.0
CHAIN3_Z = [
    [7.0 / 19.0, 12.0 / 19.0, 0.0],
    [1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
]

# A delivery allocation for MIXED3 at mu = 1/3 (subsets {1,2},{1,3},{2,3}),
# hand-checked at rate 3/2 (per-message size 1/2):
#   user 1 on {1,2}: 0.9*2/3 + 0.3*1/12          = 5/8  -> margin 1/8
#   user 2 on {1,2}: 0.7*2/3 + 0.4*1/12          = 1/2  -> margin 0
#   user 1 on {1,3}: 0.9*1/3 + 0.3*2/3           = 1/2
#   user 3 on {1,3}: 0.5*(1/3 + 2/3)             = 1/2
#   user 2 on {2,3}: 0.4*11/12 + 0.4*1/3         = 1/2
#   user 3 on {2,3}: 0.5*(11/12 + 1/3)           = 5/8
# and level sums 1, 1, 1.
MIXED3_RATE = 1.5
MIXED3_SHARES = [
    [2.0 / 3.0, 1.0 / 3.0, 0.0],
    [1.0 / 12.0, 0.0, 11.0 / 12.0],
    [0.0, 2.0 / 3.0, 1.0 / 3.0],
]

# Weighted-maximum ceiling for MIXED3 at mu = 1/3, per ordering.  Derived by
# hand for weights recovered from each ordering's program; rounded to 1e-2.
MIXED3_TABLE = {
    (1, 2, 3): 1.64,
    (1, 3, 2): 1.73,
    (2, 1, 3): 1.62,
    (2, 3, 1): 1.61,
    (3, 1, 2): 1.76,
    (3, 2, 1): 1.66,
}
MIXED3_BEST_PI = (2, 3, 1)
MIXED3_OMEGA = (0.0, 1.25, 1.0)
# Value at those weights: numerator max(0, 1.25*F2, F3) summed = 1.875 and
# denominator 1.25*(2/3) + 1*(1/3) = 7/6, so 1.875 * 6/7 = 45/28.
MIXED3_BOUND = 45.0 / 28.0


def delivery_allocation(shares, rate: float, num_users: int, t: int) -> DeliveryAllocation:
    """Wrap a raw share grid in a DeliveryAllocation."""
    shares = np.asarray(shares, dtype=float)
    return DeliveryAllocation(
        num_users=num_users,
        num_levels=shares.shape[0],
        t=t,
        subsets=message_subsets(num_users, t),
        shares=shares,
        rate=rate,
    )


# --- random-instance generators ------------------------------------------


def random_stats(rng: np.random.Generator, num_users: int, num_levels: int) -> ChannelStats:
    """Random valid CCDF grid: per-user sorted uniforms."""
    grid = np.sort(rng.random((num_users, num_levels)), axis=1)[:, ::-1].copy()
    return ChannelStats(num_users=num_users, num_levels=num_levels, ccdf=grid)


def random_two_user(rng: np.random.Generator, max_levels: int = 6) -> ChannelStats:
    """Random 2-user stats with occasional exact zeros, ones, and equal rows."""
    num_levels = int(rng.integers(1, max_levels + 1))
    grid = np.sort(rng.random((2, num_levels)), axis=1)[:, ::-1].copy()
    if rng.random() < 0.15:
        grid[int(rng.integers(0, 2)), num_levels - 1] = 0.0
    if rng.random() < 0.1:
        grid[int(rng.integers(0, 2)), 0] = 1.0
    if rng.random() < 0.08 and num_levels >= 2:
        grid[1, :] = grid[0, :]
    return ChannelStats(num_users=2, num_levels=num_levels, ccdf=grid)


def random_chain_stats(rng: np.random.Generator, num_users: int, num_levels: int) -> ChannelStats:
    """Random stats forming a dominance chain (row k+1 dominates row k)."""
    rows = [np.sort(rng.random(num_levels))[::-1]]
    for _ in range(num_users - 1):
        fresh = np.sort(rng.random(num_levels))[::-1]
        rows.append(np.maximum(rows[-1], fresh))
    grid = np.vstack(rows)
    return ChannelStats(num_users=num_users, num_levels=num_levels, ccdf=grid)


def random_sorted_weights(rng: np.random.Generator, num_users: int) -> np.ndarray:
    """Nonincreasing positive weights with occasional ties and zero tails."""
    w = np.sort(rng.uniform(0.1, 3.0, num_users))[::-1].copy()
    if rng.random() < 0.2 and num_users >= 2:
        w[1] = w[0]
    if rng.random() < 0.15:
        w[int(rng.integers(1, num_users + 1)):] = 0.0
    return w


def random_bounded_lp(rng: np.random.Generator) -> LpProblem:
    """Random feasible bounded LP: <= 4 variables, <= 8 rows.

    Feasible by construction (a strictly interior point is sampled first)
    and bounded by an all-ones cap row.
    """
    n = int(rng.integers(1, 5))
    m_ub = int(rng.integers(0, 6))
    x0 = rng.uniform(0.0, 2.0, n)
    a_ub = rng.normal(size=(m_ub, n))
    b_ub = a_ub @ x0 + rng.uniform(0.1, 2.0, m_ub)
    cap = np.ones((1, n))
    a_ub = np.vstack([a_ub, cap])
    b_ub = np.concatenate([b_ub, [x0.sum() + rng.uniform(0.5, 2.0)]])
    a_eq = b_eq = None
    if n >= 2 and rng.random() < 0.3:
        row = rng.normal(size=(1, n))
        a_eq, b_eq = row, row @ x0
    c = rng.normal(size=n)
    return lp_problem(c, a_ub=a_ub, b_ub=b_ub, a_eq=a_eq, b_eq=b_eq)


# --- invariant checkers ----------------------------------------------------


def assert_matches_oracle(problem: LpProblem, tol: float = 1e-9) -> None:
    """Simplex and vertex enumeration agree on value (and both are optimal)."""
    fast = solve_lp(problem)
    slow = enumerate_vertices(problem)
    assert fast.status == OPTIMAL, f"simplex status {fast.status}"
    assert slow.status == OPTIMAL, f"oracle status {slow.status}"
    assert abs(fast.value - slow.value) <= tol, (
        f"simplex {fast.value} vs oracle {slow.value}"
    )


def check_two_user_instance(stats: ChannelStats, mu: float, tol: float = 1e-9) -> None:
    """Construction matches the exact optimum and satisfies the split rules.

    Split rules checked: u <= v; alpha, beta in [0, 1]; all four decodability
    margins nonnegative; and the ratio-threshold conditions, read
    disjunctively at ties (with f1 = f2 only one side is guaranteed).
    """
    f_star = optimal_rate_two_user(stats, mu)
    alloc = achievable_allocation_two_user(stats, mu)
    scale = max(1.0, abs(alloc.f1), abs(alloc.f2))

    assert abs(min(alloc.f1, alloc.f2) - f_star) <= tol * max(1.0, abs(f_star))
    assert 0.0 <= alloc.alpha <= 1.0 and 0.0 <= alloc.beta <= 1.0
    assert all(m >= -tol * scale for m in alloc.margins), alloc.margins
    if not alloc.level_order:
        return
    assert alloc.u <= alloc.v

    ccdf = stats.ccdf
    g = [
        math.inf if ccdf[0, l - 1] == 0.0 else ccdf[1, l - 1] / ccdf[0, l - 1]
        for l in alloc.level_order
    ]
    g_u, g_v = g[alloc.u - 1], g[alloc.v - 1]
    if abs(alloc.f1 - alloc.f2) <= tol * scale:
        assert g_u <= 1.0 + tol or g_v >= 1.0 - tol, (g_u, g_v)
    elif alloc.f1 < alloc.f2:
        assert g_u <= 1.0 + tol, g_u
    else:
        assert g_v >= 1.0 - tol, g_v


def check_enhancement_invariants(stats: ChannelStats, weights: np.ndarray) -> None:
    """All published properties of the weighted enhancement, tolerance 1e-12.

    For the positive-weight prefix (zero-weight users are skipped and
    returned unchanged): the output forms a dominance chain; saturated
    entries propagate to stronger users; the weighted maxima per level are
    preserved; wherever the weighted sequence strictly rises the enhanced
    CCDF still equals the input; wherever it strictly drops it keeps
    dropping; and per level the sequence rises to a contiguous maximizing
    block, whose first element the *input* CCDF already attains, then falls.
    """
    tol = 1e-12
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ZeroWeightWarning)
        out = enhance(stats, weights)
    pos = int(np.count_nonzero(weights > 0.0))

    if pos < stats.num_users:
        assert np.array_equal(out.ccdf[pos:], stats.ccdf[pos:])
    for k in range(1, pos):
        assert is_stochastically_dominant(out.ccdf[k], out.ccdf[k - 1])

    w = np.asarray(weights, dtype=float)[:pos]
    before = w[:, None] * stats.ccdf[:pos]
    after = w[:, None] * out.ccdf[:pos]
    for l in range(stats.num_levels):
        m = after[:, l]
        # saturation propagates
        for k in range(pos):
            if out.ccdf[k, l] >= 1.0 - tol:
                assert np.all(out.ccdf[k:pos, l] >= 1.0 - tol)
                break
        # weighted maximum preserved
        assert abs(m.max() - before[:, l].max()) <= tol
        # strict rise pins the original value; strict drop never recovers
        for k in range(1, pos):
            if m[k] > m[k - 1] + tol:
                assert abs(after[k, l] - before[k, l]) <= tol
                assert np.all(np.diff(m[: k + 1]) >= -tol)
            if m[k] < m[k - 1] - tol:
                assert np.all(np.diff(m[k - 1:]) <= tol)
        # single contiguous maximizing block, reached monotonely
        top = m.max()
        block = np.flatnonzero(m >= top - tol)
        first, last = int(block[0]), int(block[-1])
        assert np.array_equal(block, np.arange(first, last + 1))
        assert abs(before[first, l] - top) <= tol
        assert np.all(np.diff(m[: first + 1]) >= -tol)
        assert np.all(np.diff(m[last:]) <= tol)
