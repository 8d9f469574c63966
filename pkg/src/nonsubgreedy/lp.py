"""Small dense linear programs.

``simplex`` is a two-phase tableau method with Bland's anti-cycling rule.
``vertex_enumeration`` is a deliberately naive second solver used to
cross-check it on tiny problems.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .exceptions import CapacityError, DomainError

LP_TOL = 1e-9


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    status: str
    n_pivots: int = 0


def _pivot(T, row, col):
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]


def _run(T, basis, n_cols, tol, max_iter):
    """Minimize the objective held in the last row of ``T``; return pivot count or 'unbounded'."""
    pivots = 0
    m = T.shape[0] - 1
    while pivots < max_iter:
        red = T[-1, :n_cols]
        cand = np.flatnonzero(red < -tol)
        if cand.size == 0:
            return pivots
        col = int(cand[0])
        column = T[:m, col]
        ok = np.flatnonzero(column > tol)
        if ok.size == 0:
            return "unbounded"
        ratios = T[ok, -1] / column[ok]
        best = ratios.min()
        ties = ok[ratios <= best + tol * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(T, row, col)
        basis[row] = col
        pivots += 1
    raise RuntimeError("simplex exceeded its iteration cap")


def simplex(c, A_ub=None, b_ub=None, A_ge=None, b_ge=None, A_eq=None, b_eq=None, *, tol=LP_TOL, max_iter=10_000):
    """Minimize ``c @ x`` subject to ``A_ub x <= b_ub``, ``A_ge x >= b_ge``, ``A_eq x = b_eq``, ``x >= 0``."""
    c = np.asarray(c, dtype=float)
    n = c.size
    rows, rhs, kinds = [], [], []
    for A, b, kind in ((A_ub, b_ub, "le"), (A_ge, b_ge, "ge"), (A_eq, b_eq, "eq")):
        if A is None:
            continue
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).ravel()
        if A.shape != (b.size, n):
            raise DomainError(f"constraint block {kind} has shape {A.shape}, expected ({b.size}, {n})")
        rows.extend(A)
        rhs.extend(b)
        kinds.extend([kind] * b.size)
    m = len(rows)
    if m == 0:
        if np.any(c < 0):
            return LPResult(np.zeros(n), -np.inf, "unbounded")
        return LPResult(np.zeros(n), 0.0, "optimal")
    n_slack = sum(k != "eq" for k in kinds)
    n_total = n + n_slack + m  # structural, slack, artificial
    T = np.zeros((m + 1, n_total + 1))
    basis = [0] * m
    s = n
    for i, (a, b, kind) in enumerate(zip(rows, rhs, kinds)):
        T[i, :n] = a
        if kind == "le":
            T[i, s] = 1.0
            s += 1
        elif kind == "ge":
            T[i, s] = -1.0
            s += 1
        T[i, -1] = b
        if b < 0:
            T[i] *= -1
        art = n + n_slack + i
        T[i, art] = 1.0
        basis[i] = art
    # phase 1: drive the artificials to zero
    T[-1, n + n_slack:n_total] = 1.0
    for i in range(m):
        T[-1] -= T[i]
    pivots = _run(T, basis, n_total, tol, max_iter)
    if pivots == "unbounded" or -T[-1, -1] > tol * max(1.0, float(np.abs(rhs).max())):
        return LPResult(np.full(n, np.nan), np.nan, "infeasible", 0 if pivots == "unbounded" else pivots)
    # pivot leftover (degenerate) artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n + n_slack:
            nz = np.flatnonzero(np.abs(T[i, :n + n_slack]) > tol)
            if nz.size:
                _pivot(T, i, int(nz[0]))
                basis[i] = int(nz[0])
    keep = [i for i in range(m) if basis[i] < n + n_slack]
    T2 = np.zeros((len(keep) + 1, n + n_slack + 1))
    T2[:-1, :-1] = T[keep, :n + n_slack]
    T2[:-1, -1] = T[keep, -1]
    basis2 = [basis[i] for i in keep]
    T2[-1, :n] = c
    for r, bcol in enumerate(basis2):
        if T2[-1, bcol] != 0.0:
            T2[-1] -= T2[-1, bcol] * T2[r]
    p2 = _run(T2, basis2, n + n_slack, tol, max_iter)
    if p2 == "unbounded":
        return LPResult(np.full(n, np.nan), -np.inf, "unbounded", pivots)
    x = np.zeros(n + n_slack)
    for r, bcol in enumerate(basis2):
        x[bcol] = T2[r, -1]
    x = x[:n]
    x[np.abs(x) < tol] = 0.0
    return LPResult(x, float(c @ x), "optimal", pivots + p2)


def vertex_enumeration(c, G, h, *, tol=LP_TOL, budget=2_000_000):
    """Minimize ``c @ x`` over ``{x : G x >= h}`` by trying every basic solution.

    Each choice of ``n`` rows of ``G`` made tight gives a candidate vertex;
    the best feasible one is optimal when the feasible region is pointed and
    the optimum is finite. Exponential; only for cross-checks.
    """
    c = np.asarray(c, dtype=float)
    G = np.asarray(G, dtype=float)
    h = np.asarray(h, dtype=float)
    m, n = G.shape
    combos = np.array(list(itertools.combinations(range(m), n)), dtype=np.int64)
    if combos.shape[0] > budget:
        raise CapacityError(f"{combos.shape[0]} bases exceed the vertex-enumeration budget {budget}")
    best_val, best_x = np.inf, None
    for start in range(0, combos.shape[0], 20000):
        chunk = combos[start:start + 20000]
        M = G[chunk]
        rhs = h[chunk]
        det = np.linalg.det(M)
        good = np.abs(det) > 1e-9
        if not np.any(good):
            continue
        X = np.linalg.solve(M[good], rhs[good][..., None])[..., 0]
        feas = np.all(X @ G.T >= h - tol, axis=1)
        if not np.any(feas):
            continue
        vals = X[feas] @ c
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best_val, best_x = float(vals[j]), X[feas][j]
    if best_x is None:
        return LPResult(np.full(n, np.nan), np.nan, "infeasible")
    return LPResult(best_x, best_val, "optimal")
