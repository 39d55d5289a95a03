"""Closed forms and finite checks behind the two-relay placement result.

Every "for all lam2" statement is turned into a finite check: the bounds are
linear in lam2, so they are evaluated at the endpoints, at their crossing
points, and on a uniform grid on top of that.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .capacity import PathAllocation, _path_allocation, capacity_p6_paths, p4_bounds
from .model import ParameterError, PropagationParams, SymmetricGeometry, symmetric_geometry

STRICT_TOL = 1e-9
DEFAULT_GRID = 10_001


class DomainError(ValueError):
    """Input outside the high-SNR regime where the formulas apply."""


def log_snr(params: PropagationParams, d: float) -> float:
    return math.log2(params.gamma) - params.a * math.log2(d)


def cstar(params: PropagationParams, d: float) -> float:
    """Best capacity over all two-relay placements: 2*log2(gamma/d**a)."""
    ls = log_snr(params, d)
    if ls <= 0:
        raise DomainError(f"gamma/d**a = {2**ls:.6g} <= 1; the high-SNR link model does not apply")
    return 2.0 * ls


def hypothesis_holds(params: PropagationParams, d: float) -> bool:
    """gamma/d**a > 3**a."""
    return log_snr(params, d) > params.a * math.log2(3.0)


def category_threshold(params: PropagationParams, d: float) -> float:
    """d / gamma**(1/a): the beta separating the two proof categories."""
    return d / params.gamma ** (1.0 / params.a)


def crossover_distance(params: PropagationParams) -> float:
    """Distance beyond which the equally spaced line beats the edge placement."""
    return params.gamma ** (1.0 / params.a) / 3.0


def routing_regime(beta: float) -> bool:
    if not (0.0 < beta < 0.5):
        raise ParameterError(f"beta must lie in (0, 1/2), got {beta}")
    return beta > 1.0 / 3.0


def symmetric_closed_form(geom: SymmetricGeometry) -> float:
    """Capacity of the symmetric network when gamma/d**a > 3**a.

    ``l2(2 l1 - l3)/(l1 + l2 - l3)`` below beta = 1/3, ``l1`` from there on.
    """
    if geom.beta >= 1.0 / 3.0:
        return geom.l1
    return geom.l2 * (2.0 * geom.l1 - geom.l3) / (geom.l1 + geom.l2 - geom.l3)


# ---------------------------------------------------------------------------
# proof categories


class Category(str, enum.Enum):
    CAT1 = "Cat1"
    CAT2 = "Cat2"


@dataclass
class CategoryReport:
    beta: float
    category: Category
    margin: float | None
    witness_lambda2: float | None


@dataclass
class Category1Report:
    margin: float
    max_bound: float
    argmax_lambda2: float
    g_values: tuple[float, float, float]  # g at lam2 = 0, 1/2, 1
    g_monotone: bool


def _require_hypothesis(geom: SymmetricGeometry) -> None:
    if not geom.hypothesis_holds():
        raise ParameterError(f"needs gamma/d**a > 3**a, got {geom.s:.6g}")


def g_function(geom: SymmetricGeometry, lam2):
    """gamma**(1/a) * beta * ((1 - beta)/beta)**lam2."""
    p, b = geom.params, geom.beta
    return p.gamma ** (1.0 / p.a) * b * ((1.0 - b) / b) ** np.asarray(lam2, dtype=float)


def category1_margin(geom: SymmetricGeometry, grid_size: int = DEFAULT_GRID) -> Category1Report:
    """C* minus the largest value of the through-relays bound over lam2.

    That bound is linear in lam2 with slope l2 - l1 <= 0, so its maximum is l1
    at lam2 = 0; the grid maximum is kept as a cross-check.
    """
    _require_hypothesis(geom)
    thr = category_threshold(geom.params, geom.d)
    if not geom.beta > thr:
        raise ParameterError(f"beta={geom.beta} is not above the threshold {thr}")
    grid = np.linspace(0.0, 1.0, grid_size)
    direct = (1.0 - grid) * geom.l1 + grid * geom.l2
    k = int(np.argmax(direct))
    best = max(float(direct[k]), geom.l1, geom.l2)
    g = tuple(float(v) for v in g_function(geom, [0.0, 0.5, 1.0]))
    return Category1Report(
        margin=cstar(geom.params, geom.d) - best,
        max_bound=best,
        argmax_lambda2=float(grid[k]),
        g_values=g,
        g_monotone=g[0] <= g[1] <= g[2],
    )


@dataclass
class Lemma3Report:
    holds: bool
    min_margin: float
    worst_lambda2: float


def lemma3_check(geom: SymmetricGeometry, grid_size: int = DEFAULT_GRID) -> Lemma3Report:
    """For every lam2, the smaller of two bounds stays strictly below C*."""
    _require_hypothesis(geom)
    thr = category_threshold(geom.params, geom.d)
    if not (0.0 < geom.beta <= thr):
        raise ParameterError(f"beta={geom.beta} is outside (0, {thr}]")
    pts = list(np.linspace(0.0, 1.0, grid_size))
    # crossing of the two bounds: l1 + (l2-l1)x = l3 + (2l2-l3)x
    den = geom.l1 + geom.l2 - geom.l3
    if den != 0:
        x = (geom.l1 - geom.l3) / den
        if 0.0 <= x <= 1.0:
            pts.append(x)
    lam = np.array(pts)
    direct, cross, _ = p4_bounds(geom, lam)
    gap = cstar(geom.params, geom.d) - np.minimum(direct, cross)
    k = int(np.argmin(gap))
    return Lemma3Report(bool(np.all(gap > STRICT_TOL)), float(gap[k]), float(lam[k]))


def classify_beta(beta: float, params: PropagationParams, d: float) -> CategoryReport:
    if not (0.0 < beta <= 0.5):
        raise ParameterError(f"beta must lie in (0, 1/2], got {beta}")
    cat = Category.CAT1 if beta > category_threshold(params, d) else Category.CAT2
    margin = witness = None
    if hypothesis_holds(params, d):
        geom = symmetric_geometry(beta, d, params)
        if cat is Category.CAT1:
            rep = category1_margin(geom)
            margin, witness = rep.margin, rep.argmax_lambda2
        else:
            rep3 = lemma3_check(geom)
            margin, witness = rep3.min_margin, rep3.worst_lambda2
    return CategoryReport(beta, cat, margin, witness)


# ---------------------------------------------------------------------------
# Category 2 sign function


def f_beta(beta, log_s: float, a: float):
    """Sign function whose negativity separates the two lam2 conditions.

    All logs base 2; ``log_s = log2(gamma/d**a)``.
    """
    b = np.asarray(beta, dtype=float)
    return (2 * a * np.log2(1 - b)) * (log_s + a * np.log2(b)) - (
        log_s + a * np.log2(1 - 2 * b)
    ) * (log_s + a * np.log2(1 - b))


@dataclass
class FBetaReport:
    all_negative: bool
    nondecreasing: bool
    max_value: float


def f_beta_monotonicity(params: PropagationParams, d: float, beta_grid=None,
                        n: int = 1000) -> FBetaReport:
    """Check f < 0 and nondecreasing over a grid in (0, d/gamma**(1/a)]."""
    ls = log_snr(params, d)
    if not ls > params.a * math.log2(3.0):
        raise ParameterError("needs gamma/d**a > 3**a")
    thr = category_threshold(params, d)
    if beta_grid is None:
        beta_grid = np.linspace(thr / n, thr, n)
    beta_grid = np.asarray(beta_grid, dtype=float)
    if np.any(beta_grid <= 0) or np.any(beta_grid > thr):
        raise ParameterError("beta grid must lie in (0, d/gamma**(1/a)]")
    f = f_beta(beta_grid, ls, params.a)
    steps = np.diff(f)
    return FBetaReport(bool(np.all(f < 0)), bool(np.all(steps >= -1e-12 * np.abs(f[1:]).max(initial=1.0))),
                       float(f.max()))


# ---------------------------------------------------------------------------
# optimality of the no-direct-path vertex


def f_hat(beta, a: float):
    """Lower bound on log2(gamma/d**a) that makes the vertex optimal."""
    b = np.asarray(beta, dtype=float)
    return a * np.log2(b) / np.log2(1 - b) * np.log2((1 - b) ** 2 / (1 - 2 * b))


@dataclass
class KktReport:
    condition_lhs: float
    condition_rhs: float
    holds: bool
    analytic_x: PathAllocation
    analytic_value: float
    lp_value: float
    lp_gap: float
    dual: tuple[float, float, float]  # v1, v2, s1 at the vertex (s2 = s3 = 0)
    sufficient_bound: float  # f_hat(beta)
    sufficient_at_third: bool  # log2(s) >= f_hat(1/3)


def kkt_condition(geom: SymmetricGeometry) -> KktReport:
    if not (0.0 < geom.beta < 1.0 / 3.0):
        raise ParameterError(f"vertex analysis needs beta < 1/3, got {geom.beta}")
    l1, l2, l3, l4 = geom.l1, geom.l2, geom.l3, geom.l4
    den = l1 + l2 - l3
    lhs = l1 * (2 * l2 - l3) / den
    x2, x4 = (l1 - l3) / den, l2 / den
    alloc = _path_allocation(geom, 0.0, x2, x4)
    value = 2 * x2 * l2 + x4 * l3
    _, lp_value = capacity_p6_paths(geom)
    v1 = lhs
    v2 = l3 * (l1 - l2) / den
    return KktReport(
        condition_lhs=lhs,
        condition_rhs=l4,
        holds=lhs >= l4,
        analytic_x=alloc,
        analytic_value=value,
        lp_value=lp_value,
        lp_gap=abs(value - lp_value),
        dual=(v1, v2, v1 - l4),
        sufficient_bound=float(f_hat(geom.beta, geom.params.a)),
        sufficient_at_third=geom.log_s >= float(f_hat(1.0 / 3.0, geom.params.a)),
    )
