"""Cache placements as exact rational subsets of the unit file interval.

A file is the interval (0, 1]; user k prefetches a subset c_k of measure mu.
Everything here is exact: endpoints are fractions.Fraction, intervals are
half-open (a, b], and set operations are endpoint sweeps with no floats.

The central placement splits the file by subset ranks: with t = floor(mu*K)
and lam = mu*K - t, every size-t subset S of users owns the slice

    J_S = ((rank(S)-1)/C(K,t), rank(S)/C(K,t)]

of the first (1-lam) of the file (rank = 1-based lexicographic position),
and every size-(t+1) subset owns the matching slice of the remaining lam.
User k caches the slices of all subsets containing it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import EmptySubset, MuOutOfRange, OutOfRange, TooManyUsers

MAX_USERS = 16

Interval = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class CachingStrategy:
    """Per-user cached subsets of (0, 1], canonical (sorted, disjoint, merged)."""

    num_users: int
    mu: Fraction
    intervals: tuple[tuple[Interval, ...], ...]

    def user(self, k: int) -> tuple[Interval, ...]:
        return self.intervals[k - 1]


@dataclass(frozen=True)
class CachingTuple:
    """Coverage measure of every nonempty user subset."""

    num_users: int
    coverage: dict[frozenset[int], Fraction]

    def of(self, users: Iterable[int]) -> Fraction:
        return self.coverage[frozenset(users)]


def _merge(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    """Canonicalize: drop empties, sort, fuse overlapping or touching pieces."""
    pieces = sorted((a, b) for a, b in intervals if a < b)
    merged: list[list[Fraction]] = []
    for a, b in pieces:
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return tuple((a, b) for a, b in merged)


def _measure(intervals: Iterable[Interval]) -> Fraction:
    return sum((b - a for a, b in intervals), Fraction(0))


def _intersect(xs: Sequence[Interval], ys: Sequence[Interval]) -> tuple[Interval, ...]:
    """Intersection of two canonical interval lists, two-pointer sweep."""
    out: list[Interval] = []
    i = j = 0
    while i < len(xs) and j < len(ys):
        a = max(xs[i][0], ys[j][0])
        b = min(xs[i][1], ys[j][1])
        if a < b:
            out.append((a, b))
        if xs[i][1] <= ys[j][1]:
            i += 1
        else:
            j += 1
    return tuple(out)


def _comb(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def _check_users(num_users: int, users: Iterable[int]) -> tuple[int, ...]:
    chosen = tuple(sorted(set(users)))
    if not chosen:
        raise EmptySubset("user subset must be nonempty")
    if chosen[0] < 1 or chosen[-1] > num_users:
        raise OutOfRange(f"user ids must lie in 1..{num_users}")
    return chosen


def strategy_from_intervals(
    intervals: Sequence[Sequence[tuple[Fraction, Fraction]]],
    mu: Fraction,
) -> CachingStrategy:
    """Validate an explicit placement: intervals within (0,1], per-user measure mu."""
    mu = Fraction(mu)
    if not 0 <= mu <= 1:
        raise MuOutOfRange("mu must lie in [0, 1]")
    if not intervals:
        raise EmptySubset("need at least one user")
    canonical: list[tuple[Interval, ...]] = []
    for k, user_iv in enumerate(intervals, start=1):
        pieces = [(Fraction(a), Fraction(b)) for a, b in user_iv]
        for a, b in pieces:
            if not (0 <= a < b <= 1):
                raise OutOfRange(f"user {k}: interval ({a}, {b}] not inside (0, 1]")
        merged = _merge(pieces)
        if _measure(merged) != mu:
            raise OutOfRange(f"user {k}: cached measure {_measure(merged)} != mu {mu}")
        canonical.append(merged)
    return CachingStrategy(num_users=len(canonical), mu=mu, intervals=tuple(canonical))


def central_strategy(num_users: int, mu: Fraction) -> CachingStrategy:
    """Rank-partition placement for K users at exact cache size mu."""
    if num_users < 1:
        raise EmptySubset("need at least one user")
    mu = Fraction(mu)
    if not 0 <= mu <= 1:
        raise MuOutOfRange("mu must lie in [0, 1]")
    t = int(mu * num_users)  # floor: mu*K is a nonnegative Fraction
    lam = mu * num_users - t
    per_user: list[list[Interval]] = [[] for _ in range(num_users)]

    if t >= 1:
        total = _comb(num_users, t)
        width = (1 - lam)
        for rank, subset in enumerate(combinations(range(1, num_users + 1), t), start=1):
            lo = width * Fraction(rank - 1, total)
            hi = width * Fraction(rank, total)
            for k in subset:
                per_user[k - 1].append((lo, hi))
    if lam > 0:
        total = _comb(num_users, t + 1)
        base = 1 - lam
        for rank, subset in enumerate(combinations(range(1, num_users + 1), t + 1), start=1):
            lo = base + lam * Fraction(rank - 1, total)
            hi = base + lam * Fraction(rank, total)
            for k in subset:
                per_user[k - 1].append((lo, hi))

    return CachingStrategy(
        num_users=num_users,
        mu=mu,
        intervals=tuple(_merge(iv) for iv in per_user),
    )


def coverage_measure(strategy: CachingStrategy, users: Iterable[int]) -> Fraction:
    """Exact measure of the union of the chosen users' caches."""
    chosen = _check_users(strategy.num_users, users)
    pooled: list[Interval] = []
    for k in chosen:
        pooled.extend(strategy.user(k))
    return _measure(_merge(pooled))


def intersection_measure(strategy: CachingStrategy, users: Iterable[int]) -> Fraction:
    """Exact measure of the intersection of the chosen users' caches."""
    chosen = _check_users(strategy.num_users, users)
    current = strategy.user(chosen[0])
    for k in chosen[1:]:
        current = _intersect(current, strategy.user(k))
        if not current:
            break
    return _measure(current)


def caching_tuple(strategy: CachingStrategy) -> CachingTuple:
    """Coverage of every nonempty subset of users (K capped at MAX_USERS)."""
    if strategy.num_users > MAX_USERS:
        raise TooManyUsers(f"caching_tuple supports at most {MAX_USERS} users")
    cover: dict[frozenset[int], Fraction] = {}
    all_users = range(1, strategy.num_users + 1)
    for size in range(1, strategy.num_users + 1):
        for subset in combinations(all_users, size):
            cover[frozenset(subset)] = coverage_measure(strategy, subset)
    return CachingTuple(num_users=strategy.num_users, coverage=cover)


def central_coverage(num_users: int, mu: Fraction, subset_size: int) -> Fraction:
    """Closed-form union measure for the central placement.

    (1-lam)*(1 - C(K-q,t)/C(K,t)) + lam*(1 - C(K-q,t+1)/C(K,t+1)) for a
    subset of q users; only the subset size enters by symmetry.
    """
    mu = Fraction(mu)
    K, q = num_users, subset_size
    if q < 1 or q > K:
        raise OutOfRange("subset size must lie in 1..K")
    t = int(mu * K)
    lam = mu * K - t
    value = (1 - lam) * (1 - Fraction(_comb(K - q, t), _comb(K, t)))
    if lam > 0:
        value += lam * (1 - Fraction(_comb(K - q, t + 1), _comb(K, t + 1)))
    return value


def central_intersection(num_users: int, mu: Fraction, subset_size: int) -> Fraction:
    """Closed-form intersection measure for the central placement.

    (1-lam)*C(K-q,t-q)/C(K,t) + lam*C(K-q,t+1-q)/C(K,t+1), with C(n,k) = 0
    whenever k < 0 or k > n.
    """
    mu = Fraction(mu)
    K, q = num_users, subset_size
    if q < 1 or q > K:
        raise OutOfRange("subset size must lie in 1..K")
    t = int(mu * K)
    lam = mu * K - t
    value = Fraction(_comb(K - q, t - q), _comb(K, t))
    value *= (1 - lam)
    if lam > 0:
        value += lam * Fraction(_comb(K - q, t + 1 - q), _comb(K, t + 1))
    return value
