"""Optimal central-placement rate when users form a dominance chain.

If some ordering of the users (weakest first) makes every CCDF dominate the
previous one levelwise, each stronger user can reuse all symbols collected
by weaker ones, and only per-user residuals need dedicated air time.  With
integer t = K*mu and gap_k = 1 - coverage of the first k caches in the
chain, the best rate solves

    maximize f
    s.t.     gap_k * f <= sum_l z[l][k] * ccdf[k][l]   for every user k
             sum_k z[l][k] <= 1                         for every level l
             z >= 0,

where z[l][k] is the fraction of level l's channel uses devoted to user k's
residual data.  z_to_y turns the per-user shares into the per-subset shares
of the general delivery scheme: subset S's message rides on the share of
its weakest member k = min(S), split evenly over the C(K-k, t) subsets
whose weakest member is k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .caching import central_coverage
from .channel import ChannelStats, is_stochastically_dominant, validate_stats
from .errors import (
    BadT,
    InfeasibleZ,
    LengthMismatch,
    MuOutOfRange,
    NonIntegerT,
    NotDegraded,
    UnexpectedLpStatus,
)
from .lp import FEAS_TOL, OPTIMAL, lp_problem, solve_lp
from .lp_scheme import DeliveryAllocation, message_subsets


@dataclass(frozen=True)
class ZAllocation:
    """Per-user level time shares achieving `rate` on a dominance chain.

    z has shape (B, K) with users in chain order (weakest first);
    user_order maps chain position to the original 1-based user id.
    """

    rate: float
    z: np.ndarray
    user_order: tuple[int, ...]
    t: int
    mu: Fraction


def degraded_order(stats: ChannelStats) -> tuple[int, ...]:
    """Original user ids sorted weakest first; NotDegraded if no chain exists."""
    ids = sorted(
        range(1, stats.num_users + 1),
        key=lambda k: (float(stats.ccdf[k - 1].sum()), k),
    )
    for prev, nxt in zip(ids, ids[1:]):
        if not is_stochastically_dominant(stats.row(nxt), stats.row(prev)):
            raise NotDegraded(
                f"users {prev} and {nxt} are not levelwise comparable"
            )
    return tuple(ids)


def chain_stats(stats: ChannelStats, order: Sequence[int]) -> ChannelStats:
    """Stats with rows permuted into the given 1-based user order."""
    return validate_stats([stats.row(k) for k in order])


def degraded_optimal_rate(stats: ChannelStats, mu) -> ZAllocation:
    """Best rate over per-user level time shares at exact cache size mu."""
    mu = Fraction(mu)
    if not 0 <= mu <= 1:
        raise MuOutOfRange("mu must lie in [0, 1]")
    K, B = stats.num_users, stats.num_levels
    t_exact = mu * K
    if t_exact.denominator != 1:
        raise NonIntegerT(f"K*mu = {t_exact} is not an integer")
    t = int(t_exact)
    if t == K:
        raise BadT("mu = 1 leaves nothing to deliver")
    order = degraded_order(stats)
    chain = chain_stats(stats, order)
    gaps = [1 - central_coverage(K, mu, k) for k in range(1, K + 1)]

    # Variables [f, z(l=1,k=1..K), z(l=2,...), ...], level-major.
    num_vars = 1 + B * K
    a_ub = np.zeros((K + B, num_vars))
    for k in range(K):
        a_ub[k, 0] = float(gaps[k])
        for l in range(B):
            a_ub[k, 1 + l * K + k] = -chain.ccdf[k, l]
    for l in range(B):
        a_ub[K + l, 1 + l * K: 1 + (l + 1) * K] = 1.0
    b_ub = np.concatenate([np.zeros(K), np.ones(B)])
    c = np.zeros(num_vars)
    c[0] = -1.0

    solution = solve_lp(lp_problem(c, a_ub=a_ub, b_ub=b_ub))
    if solution.status != OPTIMAL:
        raise UnexpectedLpStatus(f"chain LP status {solution.status}")
    z = solution.x[1:].reshape(B, K).copy()
    for k in range(K):
        if gaps[k] == 0:  # fully covered user needs no air time
            z[:, k] = 0.0
    z.setflags(write=False)
    return ZAllocation(
        rate=float(solution.x[0]),
        z=z,
        user_order=order,
        t=t,
        mu=mu,
    )


def z_to_y(
    z: Sequence[Sequence[float]],
    num_users: int,
    t: int,
    rate: float,
) -> DeliveryAllocation:
    """Refine per-user shares into the per-subset delivery allocation.

    Requires z to carry no mass on users k > K - t: no size-(t+1) subset has
    such a user as its weakest member (equivalently their coverage gap is
    zero and they need no air time).
    """
    z = np.asarray(z, dtype=float)
    K = num_users
    if z.ndim != 2 or z.shape[1] != K:
        raise LengthMismatch(f"z must have one column per user, got {z.shape}")
    if not 0 <= t <= K - 1:
        raise BadT(f"t must lie in 0..{K - 1}, got {t}")
    if np.any(z < -FEAS_TOL):
        raise InfeasibleZ("negative time share")
    if np.any(z.sum(axis=1) > 1.0 + FEAS_TOL):
        raise InfeasibleZ("level time shares exceed the budget")
    if np.any(np.abs(z[:, K - t:]) > FEAS_TOL):
        raise InfeasibleZ(
            f"users above {K - t} cannot anchor any size-{t + 1} subset"
        )

    subsets = message_subsets(K, t)
    shares = np.zeros((z.shape[0], len(subsets)))
    for j, s in enumerate(subsets):
        weakest = s[0]
        shares[:, j] = z[:, weakest - 1] / math.comb(K - weakest, t)
    shares.setflags(write=False)
    return DeliveryAllocation(
        num_users=K,
        num_levels=z.shape[0],
        t=t,
        subsets=subsets,
        shares=shares,
        rate=rate,
    )
