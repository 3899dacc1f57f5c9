"""Per-user level statistics of a deterministic level-erasure broadcast channel.

The transmitter writes one symbol on each of B stacked signal levels per
channel use.  User k receives the top L_k[t] levels of use t, where L_k[t]
is drawn i.i.d. from a per-user distribution on {0, ..., B} described by its
complementary CDF

    ccdf[k][l-1] = P[L_k >= l],   l = 1, ..., B.

A valid CCDF row is nonincreasing with entries in [0, 1].  Boundary
conventions P[L_k >= 0] = 1 and P[L_k >= B+1] = 0 are implicit and never
stored.  All probability comparisons in this module use PROB_TOL.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import LengthMismatch, NotMonotone, OutOfRange, WeightsUnsorted

PROB_TOL = 1e-12


class ZeroWeightWarning(UserWarning):
    """Raised by enhance() when zero-weight users are left unchanged."""


@dataclass(frozen=True)
class ChannelStats:
    """Validated per-user CCDF grid for a K-user, B-level channel."""

    num_users: int
    num_levels: int
    ccdf: np.ndarray  # shape (K, B), read-only

    def row(self, user: int) -> np.ndarray:
        """CCDF of user `user` (1-based)."""
        return self.ccdf[user - 1]


@dataclass(frozen=True)
class StateRealization:
    """Sampled channel states: levels[k-1][t] = top levels user k gets at use t."""

    num_users: int
    num_levels: int
    num_uses: int
    seed: int
    levels: np.ndarray  # shape (K, n), dtype int64


def validate_stats(ccdf: Sequence[Sequence[float]]) -> ChannelStats:
    """Build ChannelStats from raw rows, checking shape, range and monotonicity."""
    rows = [np.asarray(r, dtype=float) for r in ccdf]
    if not rows:
        raise LengthMismatch("need at least one user row")
    num_levels = rows[0].size
    if num_levels == 0:
        raise LengthMismatch("need at least one signal level")
    for k, r in enumerate(rows, start=1):
        if r.ndim != 1 or r.size != num_levels:
            raise LengthMismatch(f"user {k}: expected {num_levels} entries, got shape {r.shape}")
        if np.any(r < -PROB_TOL) or np.any(r > 1.0 + PROB_TOL):
            raise OutOfRange(f"user {k}: CCDF entries must lie in [0, 1]")
        if np.any(np.diff(r) > PROB_TOL):
            raise NotMonotone(f"user {k}: CCDF must be nonincreasing in the level")
    grid = np.clip(np.vstack(rows), 0.0, 1.0)
    grid.setflags(write=False)
    return ChannelStats(num_users=len(rows), num_levels=num_levels, ccdf=grid)


def pmf_from_ccdf(ccdf_row: Sequence[float]) -> np.ndarray:
    """PMF on {0, ..., B} induced by one CCDF row.

    P(0) = 1 - ccdf[0], P(l) = ccdf[l-1] - ccdf[l] for 0 < l < B, and
    P(B) = ccdf[B-1]; the telescoping sum is 1 up to roundoff.
    """
    row = np.asarray(ccdf_row, dtype=float)
    pmf = np.empty(row.size + 1)
    pmf[0] = 1.0 - row[0]
    pmf[1:-1] = row[:-1] - row[1:]
    pmf[-1] = row[-1]
    return np.maximum(pmf, 0.0)


def is_stochastically_dominant(a: Sequence[float], b: Sequence[float]) -> bool:
    """True when CCDF `a` dominates `b` levelwise: a[l] >= b[l] - PROB_TOL for all l."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch("CCDFs must have equal length")
    return bool(np.all(a >= b - PROB_TOL))


def enhance(stats: ChannelStats, weights: Sequence[float]) -> ChannelStats:
    """Weight-driven enhancement producing a stochastically degraded chain.

    `weights` must be nonincreasing and nonnegative, one entry per user, with
    user 1 carrying the largest weight.  User 1 keeps its CCDF; for k >= 2,

        new[k](l) = min(1, max(ccdf[k](l), (w[k-1]/w[k]) * new[k-1](l))),

    so new[k] dominates new[k-1] and the weighted maxima
    max_k w[k]*new[k](l) equal max_k w[k]*ccdf[k](l) at every level.
    Zero-weight users sit at the tail, are skipped by the recursion, and are
    returned unchanged; a ZeroWeightWarning flags them.
    """
    w = np.asarray(weights, dtype=float)
    if w.size != stats.num_users:
        raise LengthMismatch("need one weight per user")
    if np.any(w < 0.0):
        raise OutOfRange("weights must be nonnegative")
    if np.any(np.diff(w) > 0.0):
        raise WeightsUnsorted("weights must be nonincreasing")

    out = np.array(stats.ccdf, dtype=float)
    positive = int(np.count_nonzero(w > 0.0))
    if positive < stats.num_users:
        skipped = list(range(positive + 1, stats.num_users + 1))
        warnings.warn(
            f"zero-weight users {skipped} excluded from enhancement",
            ZeroWeightWarning,
            stacklevel=2,
        )
    for k in range(1, positive):
        ratio = w[k - 1] / w[k]
        out[k] = np.minimum(1.0, np.maximum(out[k], ratio * out[k - 1]))
    out.setflags(write=False)
    return ChannelStats(num_users=stats.num_users, num_levels=stats.num_levels, ccdf=out)


def sample_states(stats: ChannelStats, num_uses: int, seed: int) -> StateRealization:
    """Draw i.i.d. level counts for every user over `num_uses` channel uses.

    Stream splitting: one child of SeedSequence(seed) per user, in user order,
    so realizations are reproducible and users are mutually independent.
    Sampling inverts the CCDF directly: with U uniform on (0, 1),
    #{l : U < ccdf[l]} has exactly the target distribution.
    """
    if num_uses <= 0:
        raise OutOfRange("num_uses must be positive")
    children = np.random.SeedSequence(seed).spawn(stats.num_users)
    levels = np.empty((stats.num_users, num_uses), dtype=np.int64)
    for k in range(stats.num_users):
        rng = np.random.default_rng(children[k])
        u = rng.random(num_uses)
        levels[k] = np.sum(u[:, None] < stats.ccdf[k][None, :], axis=1)
    levels.setflags(write=False)
    return StateRealization(
        num_users=stats.num_users,
        num_levels=stats.num_levels,
        num_uses=num_uses,
        seed=seed,
        levels=levels,
    )
