"""Dense linear programming: two-phase tableau simplex plus a vertex oracle.

Problems are stated as

    minimize c.x  subject to  a_ub.x <= b_ub,  a_eq.x = b_eq,  x >= 0.

solve_lp runs a two-phase primal simplex on a dense tableau with Bland's
smallest-index rule throughout, so it cannot cycle.  FEAS_TOL is the single
feasibility/optimality tolerance and PIVOT_TOL the smallest pivot magnitude
accepted; a candidate pivot column whose only positive entries are below
PIVOT_TOL raises NumericalFailure rather than risking a garbage basis.

enumerate_vertices is an independent brute-force check for tiny problems:
it visits every choice of n active constraints, keeps the feasible basic
points, and minimizes over them.  It shares none of the simplex machinery,
so the two routes can disagree only if one is wrong.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .errors import LengthMismatch, NumericalFailure, TooLarge

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-11
MAX_ITERATIONS = 100_000
MAX_ORACLE_VARS = 6

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpProblem:
    c: np.ndarray
    a_ub: np.ndarray
    b_ub: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray

    @property
    def num_vars(self) -> int:
        return self.c.size


@dataclass(frozen=True)
class LpSolution:
    """Solver outcome; x/value/duals are None unless status == "optimal".

    Dual convention: value == dual_ub.b_ub + dual_eq.b_eq with dual_ub <= 0.
    """

    status: str
    x: Optional[np.ndarray]
    value: Optional[float]
    dual_ub: Optional[np.ndarray]
    dual_eq: Optional[np.ndarray]


def lp_problem(
    c: Sequence[float],
    a_ub: Optional[Sequence[Sequence[float]]] = None,
    b_ub: Optional[Sequence[float]] = None,
    a_eq: Optional[Sequence[Sequence[float]]] = None,
    b_eq: Optional[Sequence[float]] = None,
) -> LpProblem:
    """Assemble and shape-check an LpProblem; missing blocks become empty."""
    c = np.asarray(c, dtype=float)
    n = c.size

    def matrix(block, name: str) -> np.ndarray:
        if block is None:
            return np.zeros((0, n))
        block = np.atleast_2d(np.asarray(block, dtype=float))
        if block.size == 0:
            return np.zeros((0, n))
        if block.ndim != 2 or block.shape[1] != n:
            raise LengthMismatch(f"{name} must have {n} columns, got shape {block.shape}")
        return block

    a_ub = matrix(a_ub, "a_ub")
    a_eq = matrix(a_eq, "a_eq")
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).reshape(-1)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).reshape(-1)
    if a_ub.shape[0] != b_ub.size:
        raise LengthMismatch("a_ub and b_ub row counts differ")
    if a_eq.shape[0] != b_eq.size:
        raise LengthMismatch("a_eq and b_eq row counts differ")
    return LpProblem(c=c, a_ub=a_ub, b_ub=b_ub, a_eq=a_eq, b_eq=b_eq)


def _pivot(tableau: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and tableau[r, col] != 0.0:
            tableau[r] -= tableau[r, col] * tableau[row]
    basis[row] = col


def _run_simplex(
    tableau: np.ndarray,
    basis: np.ndarray,
    costs: np.ndarray,
    allowed: np.ndarray,
) -> str:
    """Bland-rule iterations on [A | rhs]; returns "optimal" or "unbounded"."""
    num_cols = costs.size
    for _ in range(MAX_ITERATIONS):
        reduced = costs - costs[basis] @ tableau[:, :num_cols]
        entering = -1
        in_basis = set(basis.tolist())
        for j in range(num_cols):
            if allowed[j] and j not in in_basis and reduced[j] < -FEAS_TOL:
                entering = j
                break
        if entering < 0:
            return OPTIMAL
        column = tableau[:, entering]
        rhs = tableau[:, -1]
        best_ratio = np.inf
        leaving = -1
        for r in range(tableau.shape[0]):
            if column[r] <= PIVOT_TOL:
                continue
            ratio = rhs[r] / column[r]
            if ratio < best_ratio - PIVOT_TOL or (
                abs(ratio - best_ratio) <= PIVOT_TOL
                and (leaving < 0 or basis[r] < basis[leaving])
            ):
                best_ratio = ratio
                leaving = r
        if leaving < 0:
            if np.any(column > 0.0):
                raise NumericalFailure(
                    f"all candidate pivots below {PIVOT_TOL} in column {entering}"
                )
            return UNBOUNDED
        _pivot(tableau, basis, leaving, entering)
    raise NumericalFailure(f"simplex did not converge in {MAX_ITERATIONS} iterations")


def solve_lp(problem: LpProblem) -> LpSolution:
    """Two-phase simplex; statuses: optimal, infeasible, unbounded."""
    n = problem.num_vars
    m_ub, m_eq = problem.a_ub.shape[0], problem.a_eq.shape[0]
    m = m_ub + m_eq

    body = np.zeros((m, n + m_ub))
    body[:m_ub, :n] = problem.a_ub
    body[:m_ub, n:] = np.eye(m_ub)
    body[m_ub:, :n] = problem.a_eq
    rhs = np.concatenate([problem.b_ub, problem.b_eq]).astype(float)

    flip = np.ones(m)
    flip[rhs < 0.0] = -1.0
    body *= flip[:, None]
    rhs *= flip

    # Rows whose slack column survives the flip as +1 start basic on it;
    # every other row (equalities, flipped inequalities) gets an artificial.
    needs_artificial = np.array([i >= m_ub or flip[i] < 0.0 for i in range(m)])
    num_art = int(needs_artificial.sum())
    num_cols = n + m_ub + num_art
    tableau = np.zeros((m, num_cols + 1))
    tableau[:, : n + m_ub] = body
    tableau[:, -1] = rhs

    basis = np.empty(m, dtype=int)
    identity_col = np.empty(m, dtype=int)
    art_index = 0
    for i in range(m):
        if needs_artificial[i]:
            col = n + m_ub + art_index
            tableau[i, col] = 1.0
            art_index += 1
        else:
            col = n + i
        basis[i] = col
        identity_col[i] = col

    allowed = np.ones(num_cols, dtype=bool)
    row_origin = np.arange(m)
    if num_art:
        phase1 = np.zeros(num_cols)
        phase1[n + m_ub:] = 1.0
        status = _run_simplex(tableau, basis, phase1, allowed)
        if status != OPTIMAL:
            raise NumericalFailure("phase 1 reported unbounded")
        if phase1[basis] @ tableau[:, -1] > FEAS_TOL:
            return LpSolution(INFEASIBLE, None, None, None, None)
        # Drive leftover artificials out of the basis or drop their rows.
        keep = np.ones(tableau.shape[0], dtype=bool)
        for r in range(tableau.shape[0]):
            if basis[r] < n + m_ub:
                continue
            pivot_col = -1
            for j in range(n + m_ub):
                if abs(tableau[r, j]) > PIVOT_TOL:
                    pivot_col = j
                    break
            if pivot_col >= 0:
                _pivot(tableau, basis, r, pivot_col)
            else:
                keep[r] = False  # redundant constraint row
        if not np.all(keep):
            tableau = tableau[keep]
            basis = basis[keep]
            identity_col = identity_col[keep]
            row_origin = row_origin[keep]
        allowed[n + m_ub:] = False

    costs = np.zeros(num_cols)
    costs[:n] = problem.c
    status = _run_simplex(tableau, basis, costs, allowed)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, None, None, None, None)

    x = np.zeros(num_cols)
    x[basis] = tableau[:, -1]
    x = x[:n]
    value = float(problem.c @ x)

    if np.any(x < -FEAS_TOL) or (
        m_ub and np.any(problem.a_ub @ x - problem.b_ub > FEAS_TOL)
    ) or (
        m_eq and np.any(np.abs(problem.a_eq @ x - problem.b_eq) > FEAS_TOL)
    ):
        raise NumericalFailure("optimal basis fails feasibility recheck")

    # Duals of the original rows: c_B.Binv read off the columns that began
    # as the identity, then undo row flips.  Dropped rows keep dual zero.
    y_tab = costs[basis] @ tableau[:, identity_col]
    duals = np.zeros(m)
    duals[row_origin] = y_tab
    duals *= flip
    return LpSolution(
        status=OPTIMAL,
        x=x,
        value=value,
        dual_ub=duals[:m_ub],
        dual_eq=duals[m_ub:],
    )


def enumerate_vertices(problem: LpProblem) -> LpSolution:
    """Brute-force oracle: minimize over all feasible basic points.

    Only for problems with at most MAX_ORACLE_VARS variables and a bounded
    feasible region (add box rows if needed).  Every size-n active set drawn
    from {inequality rows, nonnegativity bounds} plus all equality rows is
    solved and checked against the full constraint list.
    """
    n = problem.num_vars
    if n > MAX_ORACLE_VARS:
        raise TooLarge(f"vertex oracle limited to {MAX_ORACLE_VARS} variables")

    rows: list[np.ndarray] = [problem.a_ub[i] for i in range(problem.a_ub.shape[0])]
    rows += [-np.eye(n)[j] for j in range(n)]
    offsets = list(problem.b_ub) + [0.0] * n

    eq_a, eq_b = problem.a_eq, problem.b_eq
    free = max(0, n - eq_a.shape[0])
    best_x, best_value = None, np.inf

    def feasible(x: np.ndarray) -> bool:
        if np.any(x < -FEAS_TOL):
            return False
        if problem.a_ub.size and np.any(problem.a_ub @ x - problem.b_ub > FEAS_TOL):
            return False
        if eq_a.size and np.any(np.abs(eq_a @ x - eq_b) > FEAS_TOL):
            return False
        return True

    for active in combinations(range(len(rows)), free):
        a = np.vstack([eq_a] + [rows[i][None, :] for i in active])
        b = np.concatenate([eq_b, np.array([offsets[i] for i in active])])
        if a.shape[0] == n:
            try:
                x = np.linalg.solve(a, b)
            except np.linalg.LinAlgError:
                continue
        else:
            x, *_ = np.linalg.lstsq(a, b, rcond=None)
        if not np.all(np.isfinite(x)) or not feasible(x):
            continue
        value = float(problem.c @ x)
        if value < best_value:
            best_value, best_x = value, x
    if best_x is None:
        return LpSolution(INFEASIBLE, None, None, None, None)
    return LpSolution(OPTIMAL, best_x, best_value, None, None)
