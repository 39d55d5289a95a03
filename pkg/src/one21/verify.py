"""Property suites behind ``one21 verify``.

Each suite returns a list of :class:`Check` rows; a suite passes when every
row passes.  Random draws use PCG64 seeded from the suite seed so reruns are
identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .analysis import (
    STRICT_TOL,
    category1_margin,
    category_threshold,
    cstar,
    f_beta_monotonicity,
    kkt_condition,
    lemma3_check,
)
from .capacity import (
    PropertySet,
    approx_capacity_cutset,
    approx_capacity_p1,
    capacity_p4,
    capacity_p6_paths,
    dual_d1,
    verify_optimal_solution_properties,
)
from .model import (
    ProjectedPair,
    PropagationParams,
    Topology,
    gain_matrix,
    make_theorem_topology,
    project_topology,
    symmetric_geometry,
    symmetrize,
)

LP_TOL = 1e-8
EPS_REL = 1e-6
EQUIV_TOL = 1e-6


@dataclass
class Check:
    name: str
    passed: bool
    margin: float
    detail: str = ""


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _p1(topo: Topology, params: PropagationParams) -> float:
    return approx_capacity_p1(gain_matrix(topo, params)).capacity


def _hypothesis_check(params: PropagationParams, d: float) -> Check:
    ls = math.log2(params.gamma) - params.a * math.log2(d)
    margin = ls - params.a * math.log2(3.0)
    return Check("hypothesis gamma/d^a > 3^a", margin > 0, margin, f"gamma/d^a={2**ls:.6g}")


def _inner_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """n points in (lo, hi], excluding lo."""
    return lo + (hi - lo) * np.arange(1, n + 1) / n


def suite_duality(params, d, n=50, seed=0) -> list[Check]:
    out = [_hypothesis_check(params, d)]
    rng = _rng(seed)
    worst_cut = 0.0
    for _ in range(n):
        relays = [(rng.uniform(0, d), rng.uniform(-d / 2, d / 2)) for _ in range(2)]
        gm = gain_matrix(Topology((0, 0), (d, 0), relays), params)
        a, b = approx_capacity_p1(gm).capacity, approx_capacity_cutset(gm).capacity
        worst_cut = max(worst_cut, abs(a - b) / max(1.0, abs(a)))
    out.append(Check("flow vs cut-set (random)", worst_cut <= EQUIV_TOL, EQUIV_TOL - worst_cut))
    if not out[0].passed:
        return out
    w14 = w46 = w6d = wcs = 0.0
    for beta in (np.arange(n) + 0.5) / (2 * n):
        geom = symmetric_geometry(float(beta), d, params)
        c1 = _p1(geom.topology(), params)
        c4, _ = capacity_p4(geom)
        alloc, c6 = capacity_p6_paths(geom)
        cert = dual_d1(geom)
        w14, w46 = max(w14, abs(c1 - c4)), max(w46, abs(c4 - c6))
        w6d = max(w6d, abs(c6 - cert.value))
        wcs = max(wcs, cert.slackness(geom, alloc))
    for name, w in (("flow vs reduced", w14), ("reduced vs path", w46),
                    ("path primal vs dual", w6d), ("complementary slackness", wcs)):
        out.append(Check(name, w <= LP_TOL, LP_TOL - w))
    return out


def suite_lemma1(params, d, n=200, seed=0) -> list[Check]:
    rng = _rng(seed)
    worst_sym = worst_proj = math.inf
    for _ in range(n):
        b1, b2 = rng.uniform(0, 0.5, size=2)
        pair = ProjectedPair(float(b1), float(b2), d)
        asym = _p1(pair.topology(), params)
        sym = _p1(symmetrize(pair, params).topology(), params)
        worst_sym = min(worst_sym, sym - asym + STRICT_TOL)
        relays = [(rng.uniform(0, d), rng.uniform(-d / 2, d / 2)) for _ in range(2)]
        topo = Topology((0, 0), (d, 0), relays)
        worst_proj = min(worst_proj, _p1(project_topology(topo), params) - _p1(topo, params) + STRICT_TOL)
    return [
        Check("symmetrized >= asymmetric", worst_sym >= 0, worst_sym),
        Check("projected >= original", worst_proj >= 0, worst_proj),
    ]


def suite_lemma2(params, d, n=50, seed=0) -> list[Check]:
    out = [_hypothesis_check(params, d)]
    if not out[0].passed:
        return out
    worst = 0.0
    for beta in (np.arange(n) + 0.5) / (2 * n):
        gm = gain_matrix(symmetric_geometry(float(beta), d, params).topology(), params)
        worst = max(worst, abs(verify_optimal_solution_properties(gm, PropertySet.LEMMA2).gap))
    out.append(Check("optimum kept under symmetric/no-direct schedule", worst <= LP_TOL, LP_TOL - worst))
    return out


def suite_lemma3(params, d, n=100, seed=0, grid=10_001) -> list[Check]:
    out = [_hypothesis_check(params, d)]
    if not out[0].passed:
        return out
    thr = category_threshold(params, d)
    worst = math.inf
    for beta in _inner_grid(0.0, thr, n):
        rep = lemma3_check(symmetric_geometry(float(beta), d, params), grid)
        worst = min(worst, rep.min_margin)
    out.append(Check("min of two bounds < C* for all lam2", worst > STRICT_TOL, worst))
    f = f_beta_monotonicity(params, d, _inner_grid(0.0, thr, n))
    out.append(Check("f(beta) < 0", f.all_negative, -f.max_value))
    out.append(Check("f(beta) nondecreasing", f.nondecreasing, 0.0))
    return out


def suite_category1(params, d, n=100, seed=0) -> list[Check]:
    out = [_hypothesis_check(params, d)]
    if not out[0].passed:
        return out
    thr = category_threshold(params, d)
    worst, mono = math.inf, True
    for beta in _inner_grid(thr, 0.5, n):
        rep = category1_margin(symmetric_geometry(float(beta), d, params))
        worst = min(worst, rep.margin)
        mono &= rep.g_monotone
    out.append(Check("max through-relays bound < C*", worst > STRICT_TOL, worst))
    out.append(Check("g(lam2) nondecreasing", mono, 0.0))
    return out


def suite_kkt(params, d, n=100, seed=0) -> list[Check]:
    out = [_hypothesis_check(params, d)]
    if not out[0].passed:
        return out
    worst_cond, worst_gap, worst_x1 = math.inf, 0.0, 0.0
    for beta in _inner_grid(0.0, 1.0 / 3.0, n + 1)[:-1]:
        geom = symmetric_geometry(float(beta), d, params)
        rep = kkt_condition(geom)
        worst_cond = min(worst_cond, rep.condition_lhs - rep.condition_rhs)
        worst_gap = max(worst_gap, rep.lp_gap)
        _, forced = capacity_p6_paths(geom, force_x1_zero=True)
        worst_x1 = max(worst_x1, abs(forced - rep.lp_value))
    out.append(Check("vertex optimality condition", worst_cond >= 0, worst_cond))
    out.append(Check("vertex value = path LP", worst_gap <= LP_TOL, LP_TOL - worst_gap))
    out.append(Check("x1 = 0 keeps the optimum", worst_x1 <= LP_TOL, LP_TOL - worst_x1))
    return out


def suite_theorem(params, d, n=20, seed=0) -> list[Check]:
    out = [_hypothesis_check(params, d)]
    if not out[0].passed:
        return out
    out += suite_category1(params, d, n)[1:]
    out += suite_lemma3(params, d, n, grid=1001)[1:]
    best = cstar(params, d)
    betas = (np.arange(n) + 0.5) / (2 * n)
    caps = [_p1(symmetric_geometry(float(b), d, params).topology(), params) for b in betas]
    edge = _p1(make_theorem_topology(d, EPS_REL), params)
    lead = edge - max(caps)
    out.append(Check("edge placement beats the symmetric slice", lead >= -STRICT_TOL, lead))
    # asymmetric projected grid: nothing reaches C*, the smallest corner wins
    fr = _inner_grid(0.0, 0.5, n)
    grid = {(float(b1), float(b2)): _p1(ProjectedPair(float(b1), float(b2), d).topology(), params)
            for b1 in fr for b2 in fr}
    top = max(grid.values())
    corner = grid[(float(fr[0]), float(fr[0]))]
    out.append(Check("all placements < C*", best - top > STRICT_TOL, best - top))
    out.append(Check("best grid placement is the edge corner", corner >= top - STRICT_TOL, corner - top))
    return out


SUITES: dict[str, Callable[..., list[Check]]] = {
    "duality": suite_duality,
    "lemma1": suite_lemma1,
    "lemma2": suite_lemma2,
    "lemma3": suite_lemma3,
    "category1": suite_category1,
    "kkt": suite_kkt,
    "theorem": suite_theorem,
}


def run_suite(name: str, params: PropagationParams, d: float, n: int | None = None,
              seed: int = 0) -> list[Check]:
    fn = SUITES[name]
    return fn(params, d, seed=seed) if n is None else fn(params, d, n=n, seed=seed)


def format_checks(name: str, checks: list[Check]) -> str:
    lines = [f"suite {name}"]
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        extra = f"  ({c.detail})" if c.detail else ""
        lines.append(f"  {status}  {c.name:<50s} margin={c.margin:.6g}{extra}")
    ok = all(c.passed for c in checks)
    lines.append(f"{'PASS' if ok else 'FAIL'} {name}")
    return "\n".join(lines) + "\n"
