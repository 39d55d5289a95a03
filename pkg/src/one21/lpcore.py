"""Dense linear programs and a two-phase simplex solver.

The instances built by this package are tiny (a few dozen variables), so the
solver favours determinism over speed: a full dense tableau, Bland's
smallest-index rule for both the entering and the leaving variable, and no
randomisation anywhere.  Identical input gives bit-identical output.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
MAX_ITER = 10_000

# pivot elements smaller than this are treated as zero
_PIVOT_TOL = 1e-12


class Relation(str, enum.Enum):
    LE = "<="
    EQ = "=="
    GE = ">="


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class LpError(ValueError):
    """Malformed linear program (dimension mismatch, non-finite data)."""


class IterationLimitError(RuntimeError):
    pass


@dataclass
class Constraint:
    coeffs: np.ndarray
    relation: Relation
    rhs: float
    name: str = ""


@dataclass
class LinearProgram:
    """maximize ``objective @ x`` subject to linear constraints and bounds.

    Variables default to ``0 <= x < inf``.  Use :meth:`add` to append rows.
    """

    objective: np.ndarray
    constraints: list[Constraint] = field(default_factory=list)
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    names: list[str] | None = None

    def __post_init__(self) -> None:
        self.objective = np.asarray(self.objective, dtype=float).ravel()
        n = self.objective.size
        if not np.all(np.isfinite(self.objective)):
            raise LpError("objective has non-finite entries")
        self.lower = np.zeros(n) if self.lower is None else np.asarray(self.lower, dtype=float)
        self.upper = np.full(n, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float)
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise LpError("bounds must match the objective dimension")
        if np.any(np.isnan(self.lower)) or np.any(np.isnan(self.upper)) or np.any(self.lower > self.upper):
            raise LpError("invalid variable bounds")
        if self.names is None:
            self.names = [f"x{k}" for k in range(n)]
        elif len(self.names) != n:
            raise LpError("names must match the objective dimension")
        for con in self.constraints:
            self._check(con)

    @property
    def n_vars(self) -> int:
        return self.objective.size

    def _check(self, con: Constraint) -> None:
        con.coeffs = np.asarray(con.coeffs, dtype=float).ravel()
        if con.coeffs.shape != (self.n_vars,):
            raise LpError(
                f"constraint {con.name!r} has {con.coeffs.size} coefficients, expected {self.n_vars}"
            )
        if not np.all(np.isfinite(con.coeffs)) or not math.isfinite(con.rhs):
            raise LpError(f"constraint {con.name!r} has non-finite data")
        con.relation = Relation(con.relation)

    def add(self, coeffs: Sequence[float] | np.ndarray, relation: Relation | str, rhs: float,
            name: str = "") -> None:
        con = Constraint(np.asarray(coeffs, dtype=float), Relation(relation), float(rhs), name)
        self._check(con)
        self.constraints.append(con)

    def add_sparse(self, terms: dict[int, float], relation: Relation | str, rhs: float,
                   name: str = "") -> None:
        row = np.zeros(self.n_vars)
        for k, v in terms.items():
            row[k] += v
        self.add(row, relation, rhs, name)

    def dump(self) -> str:
        """Plain-text rendering, one constraint per line."""

        def expr(coeffs: np.ndarray) -> str:
            parts = [f"{c:+.12g}*{self.names[k]}" for k, c in enumerate(coeffs) if c != 0.0]
            return " ".join(parts) if parts else "0"

        lines = [f"max {expr(self.objective)}"]
        for k, con in enumerate(self.constraints):
            label = con.name or f"c{k}"
            lines.append(f"{label}: {expr(con.coeffs)} {con.relation.value} {con.rhs:.12g}")
        for k, name in enumerate(self.names):
            lo, hi = self.lower[k], self.upper[k]
            if lo != 0.0 or hi != np.inf:
                lines.append(f"bound: {lo:.12g} <= {name} <= {hi:.12g}")
        return "\n".join(lines) + "\n"


@dataclass
class LpSolution:
    status: Status
    x: np.ndarray
    objective_value: float
    iterations: int
    # constraint multipliers in the sign convention of a maximisation:
    # >= 0 for "<=" rows, <= 0 for ">=" rows, free for "==" rows
    duals: np.ndarray | None = None

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


@dataclass
class Diagnostics:
    max_constraint_violation: float
    max_bound_violation: float
    objective_mismatch: float
    complementary_slackness: float | None = None
    dual_infeasibility: float | None = None

    @property
    def max_violation(self) -> float:
        return max(self.max_constraint_violation, self.max_bound_violation)

    def ok(self, feas_tol: float = FEAS_TOL, cs_tol: float = 1e-8) -> bool:
        if self.max_violation > feas_tol:
            return False
        if self.complementary_slackness is not None and self.complementary_slackness > cs_tol:
            return False
        if self.dual_infeasibility is not None and self.dual_infeasibility > cs_tol:
            return False
        return True


class _Standard:
    """The LP rewritten as ``max c@z, A z = b, z >= 0, b >= 0``.

    ``x = offset + T @ z`` recovers the user variables.  Rows of A are the
    user constraints first (in order), then one row per finite upper bound.
    """

    def __init__(self, lp: LinearProgram):
        n = lp.n_vars
        cols: list[np.ndarray] = []  # each column maps a z-entry to x
        offset = np.zeros(n)
        for k in range(n):
            lo, hi = lp.lower[k], lp.upper[k]
            e = np.zeros(n)
            e[k] = 1.0
            if math.isfinite(lo):
                offset[k] = lo
                cols.append(e)
            elif math.isfinite(hi):
                offset[k] = hi
                cols.append(-e)
            else:
                cols.append(e)
                cols.append(-e)
        T = np.column_stack(cols) if cols else np.zeros((n, 0))

        rows, rels, rhs = [], [], []
        for con in lp.constraints:
            rows.append(con.coeffs @ T)
            rels.append(con.relation)
            rhs.append(con.rhs - con.coeffs @ offset)
        for k in range(n):
            lo, hi = lp.lower[k], lp.upper[k]
            if math.isfinite(lo) and math.isfinite(hi):
                e = np.zeros(n)
                e[k] = 1.0
                rows.append(e @ T)
                rels.append(Relation.LE)
                rhs.append(hi - lo)

        m = len(rows)
        n_struct = T.shape[1]
        n_slack = sum(1 for r in rels if r is not Relation.EQ)
        A = np.zeros((m, n_struct + n_slack))
        b = np.array(rhs, dtype=float)
        sign = np.ones(m)
        slack_of_row = np.full(m, -1)
        s = n_struct
        for i, (row, rel) in enumerate(zip(rows, rels)):
            A[i, :n_struct] = row
            if rel is Relation.LE:
                A[i, s] = 1.0
                slack_of_row[i] = s
                s += 1
            elif rel is Relation.GE:
                A[i, s] = -1.0
                slack_of_row[i] = s
                s += 1
        for i in range(m):
            if b[i] < 0:
                A[i] *= -1.0
                b[i] *= -1.0
                sign[i] = -1.0

        c = np.zeros(A.shape[1])
        c[:n_struct] = lp.objective @ T

        self.A, self.b, self.c = A, b, c
        self.T, self.offset = T, offset
        self.sign = sign
        self.slack_of_row = slack_of_row
        self.n_user_rows = len(lp.constraints)
        self.const = float(lp.objective @ offset)


def _pivot(tab: np.ndarray, r: int, k: int) -> None:
    tab[r] /= tab[r, k]
    col = tab[:, k].copy()
    col[r] = 0.0
    tab -= np.outer(col, tab[r])
    tab[:, k] = 0.0
    tab[r, k] = 1.0


def _simplex(tab: np.ndarray, basis: list[int], allowed: np.ndarray, opt_tol: float,
             max_iter: int, it0: int) -> tuple[bool, int]:
    """Maximise on a tableau whose last row holds reduced costs ``c_j - z_j``.

    Returns (bounded, iterations).  Bland's rule: lowest-index improving
    column enters; among ratio-test ties the lowest-index basic leaves.
    """
    it = it0
    m = tab.shape[0] - 1
    while True:
        red = tab[-1, :-1]
        cand = np.flatnonzero((red > opt_tol) & allowed)
        if cand.size == 0:
            return True, it
        if it >= max_iter:
            raise IterationLimitError(f"simplex exceeded {max_iter} iterations")
        k = int(cand[0])
        colk = tab[:m, k]
        rows = np.flatnonzero(colk > _PIVOT_TOL)
        if rows.size == 0:
            return False, it
        ratios = tab[rows, -1] / colk[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        r = int(min(ties, key=lambda i: basis[i]))
        _pivot(tab, r, k)
        basis[r] = k
        it += 1


def solve_lp(lp: LinearProgram, feas_tol: float = FEAS_TOL, opt_tol: float = OPT_TOL,
             max_iter: int = MAX_ITER) -> LpSolution:
    """Solve ``lp`` with a dense two-phase simplex.

    Infeasible and unbounded problems are reported through ``status``;
    exceeding ``max_iter`` pivots raises :class:`IterationLimitError`.
    """
    std = _Standard(lp)
    A, b, c = std.A, std.b, std.c
    m, n = A.shape

    # initial basis: slack columns with +1 in their row, artificials elsewhere
    basis: list[int] = []
    art_rows: list[int] = []
    for i in range(m):
        s = std.slack_of_row[i]
        if s >= 0 and A[i, s] == 1.0:
            basis.append(int(s))
        else:
            basis.append(-1)
            art_rows.append(i)
    n_art = len(art_rows)
    width = n + n_art
    tab = np.zeros((m + 1, width + 1))
    tab[:m, :n] = A
    tab[:m, -1] = b
    for a, i in enumerate(art_rows):
        tab[i, n + a] = 1.0
        basis[i] = n + a

    iterations = 0
    if n_art:
        # phase 1: maximise -sum(artificials)
        tab[-1, :] = 0.0
        tab[-1, n:width] = -1.0
        for i in art_rows:
            tab[-1] += tab[i]
        allowed = np.ones(width, dtype=bool)
        _, iterations = _simplex(tab, basis, allowed, opt_tol, max_iter, iterations)
        infeas = -tab[-1, -1]
        if abs(infeas) > feas_tol * max(1.0, float(np.abs(b).max(initial=0.0))):
            return LpSolution(Status.INFEASIBLE, np.full(lp.n_vars, np.nan), math.nan, iterations)
        # drive remaining artificials out of the basis; drop redundant rows
        keep = np.ones(m, dtype=bool)
        for r in range(m):
            if basis[r] >= n:
                nz = np.flatnonzero(np.abs(tab[r, :n]) > 1e-9)
                if nz.size:
                    _pivot(tab, r, int(nz[0]))
                    basis[r] = int(nz[0])
                    iterations += 1
                else:
                    keep[r] = False
        rows = np.flatnonzero(keep)
        tab = np.vstack([tab[rows][:, list(range(n)) + [width]], np.zeros((1, n + 1))])
        basis = [basis[r] for r in rows]
        row_map = rows
    else:
        tab = tab[:, list(range(n)) + [width]]
        row_map = np.arange(m)

    # phase 2 objective row: reduced costs c_j - c_B B^-1 A_j
    mm = len(basis)
    cb = c[basis] if mm else np.zeros(0)
    tab[-1, :n] = c - cb @ tab[:mm, :n]
    tab[-1, -1] = -(cb @ tab[:mm, -1])
    allowed = np.ones(n, dtype=bool)
    bounded, iterations = _simplex(tab, basis, allowed, opt_tol, max_iter, iterations)
    if not bounded:
        return LpSolution(Status.UNBOUNDED, np.full(lp.n_vars, np.nan), math.inf, iterations)

    z = np.zeros(n)
    for r, k in enumerate(basis):
        z[k] = tab[r, -1]
    x = std.offset + std.T @ z[: std.T.shape[1]]
    value = float(lp.objective @ x)

    duals = np.zeros(m)
    if mm:
        B = A[np.ix_(row_map, basis)]
        y = np.linalg.solve(B.T, c[basis])
        duals[row_map] = y
    duals *= std.sign
    return LpSolution(Status.OPTIMAL, x, value, iterations, duals[: std.n_user_rows])


def verify_solution(lp: LinearProgram, sol: LpSolution, duals: np.ndarray | None = None) -> Diagnostics:
    """Primal feasibility and, when multipliers are given, optimality residuals.

    ``duals`` follows the :class:`LpSolution` convention.  The complementary
    slackness residual is ``max |y_i * slack_i|`` over rows together with
    ``max |x_j * reduced_cost_j|`` over variables off their bounds; the dual
    infeasibility is the largest sign violation among multipliers and reduced
    costs.  Only meaningful for problems whose variables are bounded below by
    zero and above by infinity.
    """
    x = np.asarray(sol.x, dtype=float)
    worst_con = 0.0
    slacks = []
    for con in lp.constraints:
        lhs = float(con.coeffs @ x)
        if con.relation is Relation.LE:
            viol = lhs - con.rhs
        elif con.relation is Relation.GE:
            viol = con.rhs - lhs
        else:
            viol = abs(lhs - con.rhs)
        worst_con = max(worst_con, viol)
        slacks.append(con.rhs - lhs)
    worst_bound = float(max(np.max(lp.lower - x, initial=0.0), np.max(x - lp.upper, initial=0.0)))
    mismatch = abs(float(lp.objective @ x) - sol.objective_value)

    cs = dual_inf = None
    if duals is not None:
        y = np.asarray(duals, dtype=float)
        if y.shape != (len(lp.constraints),):
            raise LpError("dual vector length must equal the number of constraints")
        cs = float(np.max(np.abs(y * np.array(slacks)), initial=0.0))
        A = np.array([con.coeffs for con in lp.constraints]).reshape(len(lp.constraints), lp.n_vars)
        reduced = lp.objective - y @ A  # must be <= 0 for x >= 0 variables
        cs = max(cs, float(np.max(np.abs(reduced * x), initial=0.0)))
        sign_err = [max(0.0, float(r)) for r in reduced]
        for yi, con in zip(y, lp.constraints):
            if con.relation is Relation.LE:
                sign_err.append(max(0.0, -yi))
            elif con.relation is Relation.GE:
                sign_err.append(max(0.0, yi))
        dual_inf = max(sign_err, default=0.0)
    return Diagnostics(worst_con, worst_bound, mismatch, cs, dual_inf)
