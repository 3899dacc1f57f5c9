"""Monte-Carlo validation of a delivery allocation against sampled states.

The channel is drawn with sample_states (one RNG substream per user).  Each
level's num_uses channel uses are split into contiguous spans, one per
message subset plus an idle tail, sized by largest-remainder apportionment
of the allocation's shares so the spans always sum to num_uses.  User k
collects the symbol of level l at use t exactly when its drawn level count
reaches l.  A message is decodable once its collected symbols cover its
size: delivered >= ceil(num_uses * rate / C(K,t)), with a tiny guard so an
exactly integer threshold is not pushed up by roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelStats, StateRealization, sample_states
from .errors import InfeasibleAllocation
from .lp_scheme import DeliveryAllocation, Subset, check_allocation

CEIL_GUARD = 1e-9


@dataclass(frozen=True)
class MessageOutcome:
    """Delivery tally for one (user, subset) pair."""

    user: int
    subset: Subset
    delivered: int
    required: int
    empirical_margin: float
    analytic_margin: float
    std_error: float
    decodable: bool


@dataclass(frozen=True)
class SimulationReport:
    num_uses: int
    seed: int
    rate: float
    t: int
    messages: tuple[MessageOutcome, ...]
    user_decodable: tuple[bool, ...]
    empirical_ccdf: np.ndarray
    ccdf_std_error: np.ndarray


def apportion(quotas: list[float], total: int) -> list[int]:
    """Integer split of `total` proportional to quotas, largest remainder."""
    floors = [max(0, math.floor(q)) for q in quotas]
    fractional = [q - f for q, f in zip(quotas, floors)]
    missing = total - sum(floors)
    counts = list(floors)
    if missing > 0:
        order = sorted(range(len(quotas)), key=lambda i: (-fractional[i], i))
        given = 0
        while given < missing:  # may need several passes when quotas undersum
            for i in order:
                if given == missing:
                    break
                counts[i] += 1
                given += 1
    elif missing < 0:
        order = sorted(range(len(quotas)), key=lambda i: (fractional[i], i))
        taken = 0
        while taken < -missing:  # may need several passes when quotas oversum
            for i in order:
                if taken == -missing:
                    break
                if counts[i] > 0:
                    counts[i] -= 1
                    taken += 1
    return counts


def empirical_ccdf(realization: StateRealization) -> tuple[np.ndarray, np.ndarray]:
    """Per-user level-frequency estimates and their binomial standard errors."""
    levels = np.arange(1, realization.num_levels + 1)
    hat = (realization.levels[:, :, None] >= levels[None, None, :]).mean(axis=1)
    se = np.sqrt(hat * (1.0 - hat) / realization.num_uses)
    return hat, se


def simulate_delivery(
    stats: ChannelStats,
    alloc: DeliveryAllocation,
    num_uses: int,
    seed: int,
) -> SimulationReport:
    """Sample states and tally symbol delivery for every (user, subset) pair."""
    report = check_allocation(stats, alloc)
    if not report.feasible:
        raise InfeasibleAllocation("allocation fails its decodability or budget checks")

    realization = sample_states(stats, num_uses, seed)
    piece_count = math.comb(alloc.num_users, alloc.t)
    per_use_size = alloc.rate / piece_count
    required = math.ceil(num_uses * per_use_size - CEIL_GUARD)

    num_subsets = len(alloc.subsets)
    delivered = {(k, s): 0 for s in alloc.subsets for k in s}
    variance = {key: 0.0 for key in delivered}
    for l in range(stats.num_levels):
        quotas = [num_uses * float(alloc.shares[l, j]) for j in range(num_subsets)]
        quotas.append(max(0.0, num_uses * (1.0 - alloc.shares[l].sum())))
        spans = apportion(quotas, num_uses)
        got = realization.levels >= (l + 1)
        start = 0
        for j, s in enumerate(alloc.subsets):
            stop = start + spans[j]
            for k in s:
                delivered[(k, s)] += int(got[k - 1, start:stop].sum())
                p = float(stats.ccdf[k - 1, l])
                variance[(k, s)] += spans[j] * p * (1.0 - p)
            start = stop

    messages = []
    user_ok = [True] * stats.num_users
    for s in alloc.subsets:
        for k in s:
            got_count = delivered[(k, s)]
            analytic = float(stats.ccdf[k - 1] @ alloc.shares[:, alloc.subsets.index(s)])
            outcome = MessageOutcome(
                user=k,
                subset=s,
                delivered=got_count,
                required=required,
                empirical_margin=got_count / num_uses - per_use_size,
                analytic_margin=analytic - per_use_size,
                std_error=math.sqrt(variance[(k, s)]) / num_uses,
                decodable=got_count >= required,
            )
            messages.append(outcome)
            if not outcome.decodable:
                user_ok[k - 1] = False

    hat, se = empirical_ccdf(realization)
    return SimulationReport(
        num_uses=num_uses,
        seed=seed,
        rate=alloc.rate,
        t=alloc.t,
        messages=tuple(messages),
        user_decodable=tuple(user_ok),
        empirical_ccdf=hat,
        ccdf_std_error=se,
    )
