"""Dense linear programs and a deterministic two-phase simplex solver.

The solver works on a full tableau. Pivots go through the kernel backend
(numba when available), everything else is plain numpy. Problem sizes in
this package stay around a few thousand columns, where a dense tableau is
still cheap and, more importantly, bit-for-bit reproducible.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import MalformedProgram, NumericalFailure

FEAS_TOL = 1e-8
OPT_TOL = 1e-7

# entries at or below this are never used as pivots
PIVOT_TOL = 1e-9
# below this an entering column is treated as having no positive entry at all
TINY_PIVOT = 1e-12
ZERO_ROW_TOL = 1e-13
# consecutive degenerate pivots before the Dantzig rule hands over to Bland
DEGENERATE_STREAK = 50


class LpStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


def _as_matrix(a, n, name):
    if a is None:
        return np.zeros((0, n))
    a = np.array(a, dtype=float)
    if a.ndim == 1 and a.size == 0:
        return np.zeros((0, n))
    if a.ndim != 2 or a.shape[1] != n:
        raise MalformedProgram(f"{name} must have shape (rows, {n}), got {a.shape}")
    return a


def _as_vector(b, size, name, default=0.0):
    if b is None:
        return np.full(size, default, dtype=float)
    b = np.array(b, dtype=float).reshape(-1)
    if b.size != size:
        raise MalformedProgram(f"{name} must have length {size}, got {b.size}")
    return b


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """``min cost·x`` subject to equality rows, ``≤`` rows and variable bounds.

    Rows are stored as dense matrices. ``eq_labels``/``ineq_labels`` are
    optional human-readable names used in diagnostics.
    """

    cost: np.ndarray
    eq_matrix: np.ndarray | None = None
    eq_rhs: np.ndarray | None = None
    ineq_matrix: np.ndarray | None = None
    ineq_rhs: np.ndarray | None = None
    lower_bounds: np.ndarray | None = None
    upper_bounds: np.ndarray | None = None
    eq_labels: tuple = field(default=())
    ineq_labels: tuple = field(default=())

    def __post_init__(self):
        cost = np.array(self.cost, dtype=float).reshape(-1)
        n = cost.size
        if n == 0:
            raise MalformedProgram("program needs at least one variable")
        A_eq = _as_matrix(self.eq_matrix, n, "eq_matrix")
        A_ub = _as_matrix(self.ineq_matrix, n, "ineq_matrix")
        b_eq = _as_vector(self.eq_rhs, A_eq.shape[0], "eq_rhs")
        b_ub = _as_vector(self.ineq_rhs, A_ub.shape[0], "ineq_rhs")
        lb = _as_vector(self.lower_bounds, n, "lower_bounds", 0.0)
        ub = _as_vector(self.upper_bounds, n, "upper_bounds", np.inf)
        for name, arr in (("cost", cost), ("eq_matrix", A_eq), ("eq_rhs", b_eq),
                          ("ineq_matrix", A_ub), ("ineq_rhs", b_ub)):
            if not np.all(np.isfinite(arr)):
                raise MalformedProgram(f"{name} contains non-finite values")
        if np.any(np.isnan(lb)) or np.any(np.isnan(ub)) or np.any(lb == np.inf) or np.any(ub == -np.inf):
            raise MalformedProgram("bounds must be real, lower < +inf and upper > -inf")
        if np.any(lb > ub):
            raise MalformedProgram("lower_bounds exceed upper_bounds")
        eq_labels = tuple(self.eq_labels) or tuple(f"eq{i}" for i in range(A_eq.shape[0]))
        ineq_labels = tuple(self.ineq_labels) or tuple(f"ineq{i}" for i in range(A_ub.shape[0]))
        if len(eq_labels) != A_eq.shape[0] or len(ineq_labels) != A_ub.shape[0]:
            raise MalformedProgram("label count does not match row count")
        for name, val in (("cost", cost), ("eq_matrix", A_eq), ("eq_rhs", b_eq),
                          ("ineq_matrix", A_ub), ("ineq_rhs", b_ub),
                          ("lower_bounds", lb), ("upper_bounds", ub),
                          ("eq_labels", eq_labels), ("ineq_labels", ineq_labels)):
            if isinstance(val, np.ndarray):
                val.setflags(write=False)
            object.__setattr__(self, name, val)

    @classmethod
    def from_rows(cls, cost, eq_rows=(), ineq_rows=(), lower_bounds=None, upper_bounds=None):
        """Build from lists of ``(coefficients, rhs)`` pairs."""
        n = len(cost)
        eq_rows, ineq_rows = list(eq_rows), list(ineq_rows)
        for coeffs, _ in eq_rows + ineq_rows:
            if len(coeffs) != n:
                raise MalformedProgram(f"row of length {len(coeffs)} in a {n}-variable program")
        return cls(
            cost=cost,
            eq_matrix=[r for r, _ in eq_rows] if eq_rows else None,
            eq_rhs=[b for _, b in eq_rows] if eq_rows else None,
            ineq_matrix=[r for r, _ in ineq_rows] if ineq_rows else None,
            ineq_rhs=[b for _, b in ineq_rows] if ineq_rows else None,
            lower_bounds=lower_bounds,
            upper_bounds=upper_bounds,
        )

    @property
    def num_vars(self) -> int:
        return self.cost.size

    @property
    def eq_rows(self):
        return list(zip(self.eq_matrix, self.eq_rhs))

    @property
    def ineq_rows(self):
        return list(zip(self.ineq_matrix, self.ineq_rhs))


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: LpStatus
    x: np.ndarray | None = None
    objective: float | None = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


@dataclass(frozen=True)
class Residuals:
    max_eq_residual: float
    max_ineq_violation: float
    max_bound_violation: float
    objective: float

    @property
    def worst(self) -> float:
        return max(self.max_eq_residual, self.max_ineq_violation, self.max_bound_violation)


def _row_values(A, x):
    return np.array([math.fsum(row * x) for row in A])


def check_point(lp: LinearProgram, x) -> Residuals:
    """Evaluate every row, bound and the objective at ``x`` with no tolerance."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != lp.num_vars:
        raise MalformedProgram(f"point has length {x.size}, program has {lp.num_vars} variables")
    eq = np.abs(_row_values(lp.eq_matrix, x) - lp.eq_rhs)
    ineq = np.maximum(_row_values(lp.ineq_matrix, x) - lp.ineq_rhs, 0.0)
    bound = np.maximum(np.maximum(lp.lower_bounds - x, x - lp.upper_bounds), 0.0)
    return Residuals(
        max_eq_residual=float(eq.max(initial=0.0)),
        max_ineq_violation=float(ineq.max(initial=0.0)),
        max_bound_violation=float(bound.max(initial=0.0)),
        objective=math.fsum(lp.cost * x),
    )


class _StandardForm:
    """``min c·z, A z = b, z ≥ 0, b ≥ 0`` plus the map back to the user's variables."""

    def __init__(self, lp: LinearProgram):
        n = lp.num_vars
        lb, ub = lp.lower_bounds, lp.upper_bounds
        cols, offset, ub_rows = [], np.zeros(n), []
        for i in range(n):
            if np.isfinite(lb[i]):
                offset[i] = lb[i]
                cols.append((i, 1.0))
                if np.isfinite(ub[i]):
                    ub_rows.append((len(cols) - 1, ub[i] - lb[i]))
            elif np.isfinite(ub[i]):
                offset[i] = ub[i]
                cols.append((i, -1.0))
            else:
                cols.append((i, 1.0))
                cols.append((i, -1.0))
        ny = len(cols)
        M = np.zeros((n, ny))
        for j, (i, sgn) in enumerate(cols):
            M[i, j] = sgn
        self.M, self.offset, self.ny = M, offset, ny

        U = np.zeros((len(ub_rows), ny))
        for r, (j, width) in enumerate(ub_rows):
            U[r, j] = 1.0
        A_ub = np.vstack([lp.ineq_matrix @ M, U])
        b_ub = np.concatenate([lp.ineq_rhs - lp.ineq_matrix @ offset, [w for _, w in ub_rows]])
        n_slack = A_ub.shape[0]
        A = np.vstack([
            np.hstack([lp.eq_matrix @ M, np.zeros((lp.eq_matrix.shape[0], n_slack))]),
            np.hstack([A_ub, np.eye(n_slack)]),
        ])
        b = np.concatenate([lp.eq_rhs - lp.eq_matrix @ offset, b_ub])
        self.c = np.concatenate([lp.cost @ M, np.zeros(n_slack)])

        flip = b < 0
        A[flip] *= -1.0
        b[flip] *= -1.0
        scale = np.abs(A).max(axis=1, initial=0.0)
        zero = scale <= ZERO_ROW_TOL
        self.contradiction = bool(np.any(np.abs(b[zero]) > FEAS_TOL))
        keep = ~zero
        A, b, scale = A[keep], b[keep], scale[keep]
        self.A = A / scale[:, None]
        self.b = b / scale

    def to_user(self, z):
        return self.offset + self.M @ z[: self.ny]


def _run_simplex(T, basis, ncols, rule, dtol, max_iter):
    """Iterate to optimality. Returns (status, iterations)."""
    m = T.shape[0] - 1
    it = 0
    streak = 0
    while True:
        d = T[m, :ncols]
        if rule == "bland" or streak >= DEGENERATE_STREAK:
            cand = np.flatnonzero(d < -dtol)
            if cand.size == 0:
                return LpStatus.OPTIMAL, it
            c = int(cand[0])
        else:
            c = int(np.argmin(d))
            if d[c] >= -dtol:
                return LpStatus.OPTIMAL, it
        col = T[:m, c]
        pos = col > PIVOT_TOL
        if not pos.any():
            if np.any(col > TINY_PIVOT):
                raise NumericalFailure(f"column {c} has only sub-tolerance positive entries")
            return LpStatus.UNBOUNDED, it
        rows = np.flatnonzero(pos)
        ratios = T[rows, -1] / col[rows]
        rmin = ratios.min()
        tied = rows[ratios <= rmin + 1e-12 * (1.0 + abs(rmin))]
        r = int(tied[np.argmin(basis[tied])])
        streak = streak + 1 if rmin <= 1e-12 else 0
        _kernels.pivot(T, r, c)
        basis[r] = c
        rhs = T[:m, -1]
        rhs[rhs < 0.0] = 0.0
        it += 1
        if it >= max_iter:
            raise NumericalFailure(f"simplex did not terminate within {max_iter} pivots")


def solve_lp(lp: LinearProgram, feas_tol: float = FEAS_TOL, opt_tol: float = OPT_TOL,
             rule: str = "dantzig", max_iter: int | None = None) -> LpSolution:
    """Solve ``lp`` with a two-phase dense simplex.

    ``rule="bland"`` uses Bland's smallest-index rule throughout.
    ``rule="dantzig"`` uses most-negative reduced cost and falls back to Bland
    after a run of degenerate pivots, which keeps the anti-cycling guarantee.

    The returned point is re-solved from the final basis against the original
    data and checked with :func:`check_point`; if it misses ``feas_tol`` a
    :class:`NumericalFailure` is raised rather than returning a bad answer.
    """
    if rule not in ("bland", "dantzig"):
        raise ValueError(f"unknown pricing rule {rule!r}")
    sf = _StandardForm(lp)
    if sf.contradiction:
        return LpSolution(LpStatus.INFEASIBLE)
    A, b = sf.A, sf.b
    m, n = A.shape
    if max_iter is None:
        max_iter = 100_000 + 50 * (m + n)
    dtol = opt_tol * 1e-4

    # singleton columns with a positive entry start in the basis, saving artificials
    basis = np.full(m, -1, dtype=np.int64)
    nnz = np.count_nonzero(A, axis=0)
    for j in np.flatnonzero(nnz == 1):
        r = int(np.flatnonzero(A[:, j])[0])
        if basis[r] < 0 and A[r, j] > 0:
            basis[r] = j
    art_rows = np.flatnonzero(basis < 0)
    n_art = art_rows.size

    T = np.zeros((m + 1, n + n_art + 1))
    T[:m, :n] = A
    T[:m, -1] = b
    for r in range(m):
        if basis[r] >= 0:
            T[r] /= T[r, basis[r]]
    for k, r in enumerate(art_rows):
        T[r, n + k] = 1.0
        basis[r] = n + k

    iterations = 0
    if n_art:
        T[m] = -T[art_rows].sum(axis=0)
        T[m, n:n + n_art] = 0.0
        status, it = _run_simplex(T, basis, n, rule, dtol, max_iter)
        iterations += it
        if -T[m, -1] > feas_tol:
            return LpSolution(LpStatus.INFEASIBLE, iterations=iterations)
        # pivot remaining artificials out; rows where that is impossible are redundant
        redundant = []
        for r in range(m):
            if basis[r] < n:
                continue
            row = np.abs(T[r, :n])
            row[basis[basis < n]] = 0.0
            j = int(np.argmax(row))
            if row[j] > PIVOT_TOL:
                T[r, -1] = 0.0
                _kernels.pivot(T, r, j)
                basis[r] = j
            else:
                redundant.append(r)
        keep = np.setdiff1d(np.arange(m), redundant)
        T = np.vstack([T[keep][:, list(range(n)) + [-1]], np.zeros((1, n + 1))])
        basis = basis[keep]
        A, b = A[keep], b[keep]
        m = keep.size

    cscale = max(np.abs(sf.c).max(initial=0.0), 1.0)
    c = sf.c / cscale
    T[m, :n] = c
    T[m, -1] = 0.0
    T[m] -= c[basis] @ T[:m]
    T[m, basis] = 0.0
    status, it = _run_simplex(T, basis, n, rule, dtol, max_iter)
    iterations += it
    if status is LpStatus.UNBOUNDED:
        return LpSolution(LpStatus.UNBOUNDED, iterations=iterations)

    z_tab = np.zeros(n)
    z_tab[basis] = T[:m, -1]
    candidates = [z_tab]
    try:
        z_ref = np.zeros(n)
        z_ref[basis] = np.linalg.solve(A[:, basis], b)
        candidates.insert(0, z_ref)
    except np.linalg.LinAlgError:
        pass
    best, best_res = None, None
    for z in candidates:
        x = sf.to_user(z)
        res = check_point(lp, x)
        if best_res is None or res.worst < best_res.worst:
            best, best_res = x, res
    if best_res.worst > feas_tol:
        raise NumericalFailure(f"optimal basis reproduces the constraints only to {best_res.worst:.3g}")
    return LpSolution(LpStatus.OPTIMAL, x=best, objective=best_res.objective, iterations=iterations)
