"""A small dense two-phase simplex solver.

Sized for the stationary-policy linear programs this package builds (hundreds
of columns); Bland's rule keeps it cycle-free. Problems are stated as

    maximize  c @ x   subject to   a_eq @ x == b_eq,  a_ub @ x <= b_ub,  x >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LpResult:
    status: str
    x: np.ndarray | None
    objective: float | None


def _pivot(tab: np.ndarray, obj: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    for r in range(tab.shape[0]):
        if r != row and tab[r, col] != 0.0:
            tab[r] -= tab[r, col] * tab[row]
    if obj[col] != 0.0:
        obj -= obj[col] * tab[row]
    basis[row] = col


def _iterate(tab, obj, basis, allowed, tol, max_iter):
    """Run simplex to optimality on a minimization objective row. Returns status."""
    m = tab.shape[0]
    for _ in range(max_iter):
        entering = -1
        for j in range(len(allowed)):  # Bland: lowest eligible index
            if allowed[j] and obj[j] < -tol:
                entering = j
                break
        if entering < 0:
            return OPTIMAL
        ratio = np.inf
        row = -1
        for i in range(m):
            a = tab[i, entering]
            if a > tol:
                r = tab[i, -1] / a
                if r < ratio - tol or (abs(r - ratio) <= tol and (row < 0 or basis[i] < basis[row])):
                    ratio, row = r, i
        if row < 0:
            return UNBOUNDED
        _pivot(tab, obj, basis, row, entering)
    raise RuntimeError("simplex iteration limit exceeded")


def solve_lp(
    c,
    a_eq=None,
    b_eq=None,
    a_ub=None,
    b_ub=None,
    tol: float = 1e-9,
    max_iter: int = 200_000,
) -> LpResult:
    c = np.asarray(c, dtype=np.float64)
    n = len(c)
    a_eq = np.zeros((0, n)) if a_eq is None else np.asarray(a_eq, dtype=np.float64)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=np.float64)
    a_ub = np.zeros((0, n)) if a_ub is None else np.asarray(a_ub, dtype=np.float64)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=np.float64)
    m_eq, m_ub = a_eq.shape[0], a_ub.shape[0]
    m = m_eq + m_ub

    # columns: n structural, m_ub slacks, m artificials, then the rhs
    n_slack = n + m_ub
    n_total = n_slack + m
    tab = np.zeros((m, n_total + 1))
    tab[:m_eq, :n] = a_eq
    tab[:m_eq, -1] = b_eq
    tab[m_eq:, :n] = a_ub
    tab[m_eq:, n : n_slack] = np.eye(m_ub)
    tab[m_eq:, -1] = b_ub
    neg = tab[:, -1] < 0
    tab[neg] = -tab[neg]
    tab[:, n_slack : n_total] = np.eye(m)

    basis = np.arange(n_slack, n_total)
    allowed = np.ones(n_total, dtype=bool)

    # phase 1: minimize the artificial mass
    obj = np.zeros(n_total + 1)
    obj[n_slack:n_total] = 1.0
    for i in range(m):
        obj -= tab[i]
    status = _iterate(tab, obj, basis, allowed, tol, max_iter)
    if status != OPTIMAL or -obj[-1] > np.sqrt(tol):
        return LpResult(INFEASIBLE, None, None)

    # drive leftover artificials out of the (degenerate) basis where possible
    allowed[n_slack:n_total] = False
    for i in range(m):
        if basis[i] >= n_slack:
            for j in range(n_slack):
                if abs(tab[i, j]) > tol:
                    _pivot(tab, obj, basis, i, j)
                    break

    # phase 2: minimize -c over the feasible region found above
    obj = np.zeros(n_total + 1)
    obj[:n] = -c
    for i in range(m):
        if obj[basis[i]] != 0.0:
            obj -= obj[basis[i]] * tab[i]
    status = _iterate(tab, obj, basis, allowed, tol, max_iter)
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED, None, None)

    x = np.zeros(n_total)
    for i in range(m):
        x[basis[i]] = tab[i, -1]
    x = np.maximum(x[:n], 0.0)
    return LpResult(OPTIMAL, x, float(c @ x))
