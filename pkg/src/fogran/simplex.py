"""Small exact-rational linear programming via primal simplex with Bland's
rule.  Problem sizes here are tiny (a few dozen variables, <= 5 rows), so
robustness and exactness matter far more than speed; float LP would blur the
boundary cases the verification suite exists to pin down.
"""

from __future__ import annotations

from fractions import Fraction

INFEASIBLE = "infeasible"
OPTIMAL = "optimal"
UNBOUNDED = "unbounded"


def _pivot(T, basis, row, col):
    piv = T[row][col]
    T[row] = [v / piv for v in T[row]]
    for r in range(len(T)):
        if r != row and T[r][col] != 0:
            f = T[r][col]
            T[r] = [a - f * b for a, b in zip(T[r], T[row])]
    basis[row] = col


def _simplex_phase(T, basis, ncols):
    """Minimize the objective in the last row of tableau T (Bland's rule)."""
    while True:
        obj = T[-1]
        col = next((j for j in range(ncols) if obj[j] < 0), None)
        if col is None:
            return OPTIMAL
        best = None
        for r in range(len(T) - 1):
            if T[r][col] > 0:
                ratio = T[r][-1] / T[r][col]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < basis[best[1]]):
                    best = (ratio, r)
        if best is None:
            return UNBOUNDED
        _pivot(T, basis, best[1], col)


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None):
    """min c.x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0, all exact.

    Returns (status, x, objective); x and objective are None unless optimal.
    """
    A_ub = [list(map(Fraction, row)) for row in (A_ub or [])]
    b_ub = [Fraction(v) for v in (b_ub or [])]
    A_eq = [list(map(Fraction, row)) for row in (A_eq or [])]
    b_eq = [Fraction(v) for v in (b_eq or [])]
    c = [Fraction(v) for v in c]
    n = len(c)
    m_ub, m_eq = len(A_ub), len(A_eq)
    rows = []
    for i, row in enumerate(A_ub):
        slack = [Fraction(0)] * m_ub
        slack[i] = Fraction(1)
        rows.append((row + slack, b_ub[i]))
    for row, b in zip(A_eq, b_eq):
        rows.append((row + [Fraction(0)] * m_ub, b))
    # normalize RHS signs, then add one artificial per row for phase 1
    for i, (row, b) in enumerate(rows):
        if b < 0:
            rows[i] = ([-v for v in row], -b)
    width = n + m_ub
    m = len(rows)
    T = []
    basis = []
    for i, (row, b) in enumerate(rows):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        T.append(row + art + [b])
        basis.append(width + i)
    # phase 1: minimize the artificial sum
    obj = [Fraction(0)] * (width + m) + [Fraction(0)]
    for j in range(width, width + m):
        obj[j] = Fraction(1)
    T.append(obj)
    for i in range(m):  # price out the artificial basis
        T[-1] = [a - b for a, b in zip(T[-1], T[i])]
    status = _simplex_phase(T, basis, width + m)
    if status != OPTIMAL or -T[-1][-1] != 0:
        return INFEASIBLE, None, None
    # drive leftover artificials out of the basis where possible
    for r in range(m):
        if basis[r] >= width:
            col = next((j for j in range(width) if T[r][j] != 0), None)
            if col is not None:
                _pivot(T, basis, r, col)
    # phase 2 on the real objective, artificial columns frozen
    T[-1] = [Fraction(0)] * (width + m) + [Fraction(0)]
    for j in range(n):
        T[-1][j] = c[j]
    for r in range(m):
        if basis[r] < width and T[-1][basis[r]] != 0:
            f = T[-1][basis[r]]
            T[-1] = [a - f * b for a, b in zip(T[-1], T[r])]
    status = _simplex_phase(T, basis, width)
    if status == UNBOUNDED:
        return UNBOUNDED, None, None
    x = [Fraction(0)] * n
    for r in range(m):
        if basis[r] < n:
            x[basis[r]] = T[r][-1]
    objective = sum(ci * xi for ci, xi in zip(c, x))
    return OPTIMAL, x, objective
