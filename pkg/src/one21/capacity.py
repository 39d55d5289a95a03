"""Approximate capacity of full-duplex 1-2-1 networks.

Formulations
------------
* flow form: max total flow into the destination over beam activations
  ``lam[j, i]`` (link i -> j) and flows ``F[j, i] <= lam[j, i] * cap[j, i]``,
  with one transmit and one receive beam per node;
* cut-set form: max alpha with alpha below every source/destination cut;
* the symmetric two-relay reduction, a max-min over one scalar lam2;
* the symmetric two-relay path program and its dual.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .lpcore import FEAS_TOL, LinearProgram, LpSolution, Relation, Status, solve_lp
from .model import LinkGainMatrix, ParameterError, SymmetricGeometry

CUT_LIMIT = 12
ROUTING_TOL = 1e-7


class Formulation(str, enum.Enum):
    P1 = "P1"
    CUTSET = "CutSet"
    P4 = "P4"
    P6 = "P6"


class CapabilityError(ValueError):
    pass


class SolverError(RuntimeError):
    pass


@dataclass
class Schedule:
    lam: np.ndarray  # lam[j, i] is the activation time of link i -> j

    def transmit_load(self) -> np.ndarray:
        return self.lam.sum(axis=0)

    def receive_load(self) -> np.ndarray:
        return self.lam.sum(axis=1)

    @property
    def lambda1(self) -> float:
        return float(self.lam[1, 0])

    @property
    def lambda2(self) -> float:
        return float(self.lam[2, 0])

    @property
    def lambda3(self) -> float:
        return float(self.lam[2, 1])


@dataclass
class CapacityResult:
    capacity: float
    schedule: Schedule
    formulation: Formulation
    flows: np.ndarray | None = None  # F[j, i]
    solution: LpSolution | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = {
            "formulation": self.formulation.value,
            "capacity_bits": self.capacity,
            "schedule": self.schedule.lam.tolist(),
        }
        if self.flows is not None:
            out["flows"] = self.flows.tolist()
        if self.solution is not None:
            out["iterations"] = self.solution.iterations
        return out


# ---------------------------------------------------------------------------
# flow form


@dataclass
class _P1:
    lp: LinearProgram
    lam_idx: dict[tuple[int, int], int]
    flow_idx: dict[tuple[int, int], int]


def build_p1(gm: LinkGainMatrix) -> _P1:
    links = gm.links()
    N = gm.n_relays
    lam_idx = {e: k for k, e in enumerate(links)}
    flow_idx = {e: len(links) + k for k, e in enumerate(links)}
    names = [f"lam[{j},{i}]" for j, i in links] + [f"F[{j},{i}]" for j, i in links]
    obj = np.zeros(2 * len(links))
    for (j, i), k in flow_idx.items():
        if j == N + 1:
            obj[k] = 1.0
    lp = LinearProgram(obj, names=names)
    for (j, i) in links:
        lp.add_sparse({flow_idx[j, i]: 1.0, lam_idx[j, i]: -gm.cap[j, i]}, Relation.LE, 0.0,
                      f"cap[{j},{i}]")
    for r in range(1, N + 1):
        terms: dict[int, float] = {}
        for (j, i), k in flow_idx.items():
            if i == r:
                terms[k] = terms.get(k, 0.0) + 1.0
            if j == r:
                terms[k] = terms.get(k, 0.0) - 1.0
        lp.add_sparse(terms, Relation.EQ, 0.0, f"conserve[{r}]")
    for i in range(N + 1):
        lp.add_sparse({lam_idx[e]: 1.0 for e in links if e[1] == i}, Relation.LE, 1.0, f"tx[{i}]")
    for j in range(1, N + 2):
        lp.add_sparse({lam_idx[e]: 1.0 for e in links if e[0] == j}, Relation.LE, 1.0, f"rx[{j}]")
    return _P1(lp, lam_idx, flow_idx)


def _solve_p1(p1: _P1, n: int) -> CapacityResult:
    sol = solve_lp(p1.lp)
    if sol.status is not Status.OPTIMAL:
        raise SolverError(f"flow LP returned {sol.status.value}")
    lam = np.zeros((n, n))
    F = np.zeros((n, n))
    for e, k in p1.lam_idx.items():
        lam[e] = sol.x[k]
    for e, k in p1.flow_idx.items():
        F[e] = sol.x[k]
    return CapacityResult(sol.objective_value, Schedule(lam), Formulation.P1, F, sol)


def approx_capacity_p1(gm: LinkGainMatrix) -> CapacityResult:
    """Solve the flow form for any number of relays."""
    return _solve_p1(build_p1(gm), gm.n_nodes)


def check_result(gm: LinkGainMatrix, res: CapacityResult, tol: float = FEAS_TOL) -> float:
    """Largest violation of the beam, capacity and conservation constraints."""
    lam = res.schedule.lam
    N = gm.n_relays
    worst = max(0.0, -float(lam.min()))
    worst = max(worst, float(lam.sum(axis=0)[: N + 1].max()) - 1.0)
    worst = max(worst, float(lam.sum(axis=1)[1:].max()) - 1.0)
    if res.flows is not None:
        F = res.flows
        worst = max(worst, -float(F.min()))
        for j, i in gm.links():
            worst = max(worst, F[j, i] - lam[j, i] * gm.cap[j, i])
        for r in range(1, N + 1):
            worst = max(worst, abs(F[:, r].sum() - F[r, :].sum()))
        worst = max(worst, abs(F[N + 1, :].sum() - res.capacity))
    return worst


# ---------------------------------------------------------------------------
# cut-set form


def enumerate_cuts(n_relays: int, cut_limit: int = CUT_LIMIT) -> list[frozenset[int]]:
    """All node sets holding the source but not the destination.

    Ordered by binary counting over relay membership (relay 1 = lowest bit).
    """
    if n_relays < 0:
        raise ParameterError("n_relays must be non-negative")
    if n_relays > cut_limit:
        raise CapabilityError(f"{n_relays} relays exceed the cut enumeration limit {cut_limit}")
    cuts = []
    for mask in range(2**n_relays):
        cuts.append(frozenset([0] + [r + 1 for r in range(n_relays) if mask >> r & 1]))
    return cuts


def approx_capacity_cutset(gm: LinkGainMatrix, cut_limit: int = CUT_LIMIT) -> CapacityResult:
    cuts = enumerate_cuts(gm.n_relays, cut_limit)
    links = gm.links()
    N = gm.n_relays
    lam_idx = {e: k for k, e in enumerate(links)}
    a = len(links)
    obj = np.zeros(a + 1)
    obj[a] = 1.0
    lp = LinearProgram(obj, names=[f"lam[{j},{i}]" for j, i in links] + ["alpha"])
    for i in range(N + 1):
        lp.add_sparse({lam_idx[e]: 1.0 for e in links if e[1] == i}, Relation.LE, 1.0, f"tx[{i}]")
    for j in range(1, N + 2):
        lp.add_sparse({lam_idx[e]: 1.0 for e in links if e[0] == j}, Relation.LE, 1.0, f"rx[{j}]")
    for omega in cuts:
        terms = {a: 1.0}
        for (j, i), k in lam_idx.items():
            if i in omega and j not in omega:
                terms[k] = -gm.cap[j, i]
        label = "cut{" + ",".join(map(str, sorted(omega))) + "}"
        lp.add_sparse(terms, Relation.LE, 0.0, label)
    sol = solve_lp(lp)
    if sol.status is not Status.OPTIMAL:
        raise SolverError(f"cut-set LP returned {sol.status.value}")
    lam = np.zeros((gm.n_nodes, gm.n_nodes))
    for e, k in lam_idx.items():
        lam[e] = sol.x[k]
    return CapacityResult(sol.objective_value, Schedule(lam), Formulation.CUTSET, None, sol)


# ---------------------------------------------------------------------------
# symmetric two-relay reductions


def _check_symmetric(geom: SymmetricGeometry) -> None:
    if not (0.0 < geom.beta < 0.5):
        raise ParameterError(f"beta must lie in (0, 1/2), got {geom.beta}")


def p4_bounds(geom: SymmetricGeometry, lam2):
    """The three distinct upper bounds on alpha as functions of lam2.

    Returns (through-relays bound, relay-pair cut bound, source-side bound),
    i.e. ``(1-x)l1 + x l2``, ``(1-x)l3 + 2x l2`` and ``2(1-x)l1``.
    """
    x = np.asarray(lam2, dtype=float)
    direct = (1.0 - x) * geom.l1 + x * geom.l2
    cross = (1.0 - x) * geom.l3 + 2.0 * x * geom.l2
    outer = 2.0 * (1.0 - x) * geom.l1
    return direct, cross, outer


def capacity_p4(geom: SymmetricGeometry) -> tuple[float, float]:
    """Exact max over lam2 in [0, 1] of the smallest of the three bounds.

    The objective is concave piecewise linear, so its maximum sits at an
    endpoint or at a pairwise crossing.  Ties go to the smaller lam2.
    """
    _check_symmetric(geom)
    lines = [(geom.l1, geom.l2 - geom.l1),
             (geom.l3, 2.0 * geom.l2 - geom.l3),
             (2.0 * geom.l1, -2.0 * geom.l1)]
    cand = {0.0, 1.0}
    for p in range(3):
        for q in range(p + 1, 3):
            (a1, b1), (a2, b2) = lines[p], lines[q]
            if b1 != b2:
                x = (a2 - a1) / (b1 - b2)
                if 0.0 <= x <= 1.0:
                    cand.add(x)
    best_x = best_v = None
    for x in sorted(cand):
        v = min(a + b * x for a, b in lines)
        if best_v is None or v > best_v + 1e-12 * max(1.0, abs(best_v)):
            best_x, best_v = x, v
    return best_v, best_x


def capacity_p4_lp(geom: SymmetricGeometry) -> float:
    """The same reduction solved as an LP over (lam1, lam2, lam3, alpha)."""
    _check_symmetric(geom)
    lp = LinearProgram([0.0, 0.0, 0.0, 1.0], names=["lam1", "lam2", "lam3", "alpha"])
    lp.add([1, 1, 0, 0], Relation.EQ, 1.0, "lam1+lam2")
    lp.add([0, 1, 1, 0], Relation.EQ, 1.0, "lam2+lam3")
    lp.add([-geom.l1, -geom.l2, 0, 1], Relation.LE, 0.0, "d")
    lp.add([-geom.l1, -geom.l2, 0, 1], Relation.LE, 0.0, "e")
    lp.add([0, -2 * geom.l2, -geom.l3, 1], Relation.LE, 0.0, "f")
    lp.add([-2 * geom.l1, 0, 0, 1], Relation.LE, 0.0, "g")
    sol = solve_lp(lp)
    if sol.status is not Status.OPTIMAL:
        raise SolverError(f"reduced LP returned {sol.status.value}")
    return sol.objective_value


@dataclass
class PathAllocation:
    """Time fractions on the four source-destination paths.

    p1 direct, p2 via relay 1, p3 via relay 2, p4 via both relays.  The
    both-relay path capacity is taken as ``l3``, which is its bottleneck
    whenever ``l3 < l1``.
    """

    x: tuple[float, float, float, float]
    path_caps: tuple[float, float, float, float]
    link_fractions: dict[str, dict[tuple[int, int], float]]

    @property
    def routing(self) -> bool:
        return self.x[0] + self.x[1] + self.x[2] <= ROUTING_TOL


def _path_allocation(geom: SymmetricGeometry, x1: float, x2: float, x4: float) -> PathAllocation:
    caps = (geom.l4, geom.l2, geom.l2, geom.l3)
    links = {
        "p1": {(3, 0): geom.l4},
        "p2": {(1, 0): geom.l1, (3, 1): geom.l2},
        "p3": {(2, 0): geom.l2, (3, 2): geom.l1},
        "p4": {(1, 0): geom.l1, (2, 1): geom.l3, (3, 2): geom.l1},
    }
    fractions = {p: {e: c / l for e, l in es.items()} for (p, es), c in zip(links.items(), caps)}
    return PathAllocation((x1, x2, x2, x4), caps, fractions)


def build_p6(geom: SymmetricGeometry) -> LinearProgram:
    l1, l2, l3, l4 = geom.l1, geom.l2, geom.l3, geom.l4
    lp = LinearProgram([l4, 2.0 * l2, l3], names=["x1", "x2", "x4"])
    lp.add([1.0, l2 / l1 + 1.0, l3 / l1], Relation.LE, 1.0, "source")
    lp.add([0.0, 1.0, 1.0], Relation.LE, 1.0, "relays")
    return lp


def capacity_p6_paths(geom: SymmetricGeometry, force_x1_zero: bool = False
                      ) -> tuple[PathAllocation, float]:
    """Solve the symmetric path program (x2 = x3 by symmetry)."""
    _check_symmetric(geom)
    lp = build_p6(geom)
    if force_x1_zero:
        lp.upper = np.array([0.0, np.inf, np.inf])
    sol = solve_lp(lp)
    if sol.status is not Status.OPTIMAL:
        raise SolverError(f"path LP returned {sol.status.value}")
    x1, x2, x4 = (float(v) for v in sol.x)
    return _path_allocation(geom, x1, x2, x4), sol.objective_value


@dataclass
class DualCertificate:
    v1: float
    v2: float
    s1: float
    s2: float
    s3: float

    @property
    def value(self) -> float:
        return self.v1 + self.v2

    def residual(self, geom: SymmetricGeometry) -> float:
        """Largest violation of the dual equalities and sign constraints."""
        l1, l2, l3, l4 = geom.l1, geom.l2, geom.l3, geom.l4
        eqs = [
            -l4 + self.v1 - self.s1,
            -2 * l2 + self.v1 * l2 / l1 + self.v1 + self.v2 - self.s2,
            -l3 + self.v1 * l3 / l1 + self.v2 - self.s3,
        ]
        signs = [max(0.0, -v) for v in (self.v1, self.v2, self.s1, self.s2, self.s3)]
        return max(max(abs(e) for e in eqs), max(signs))

    def slackness(self, geom: SymmetricGeometry, alloc: PathAllocation) -> float:
        """Complementary slackness residual against a primal allocation."""
        l1, l2, l3 = geom.l1, geom.l2, geom.l3
        x1, x2, _, x4 = alloc.x
        src = x1 + x2 * (l2 / l1 + 1.0) + x4 * l3 / l1 - 1.0
        rel = x2 + x4 - 1.0
        terms = [self.v1 * src, self.v2 * rel, self.s1 * x1, self.s2 * x2, self.s3 * x4]
        return max(abs(t) for t in terms)


def dual_d1(geom: SymmetricGeometry) -> DualCertificate:
    """Solve the dual of the path program: min v1 + v2."""
    _check_symmetric(geom)
    l1, l2, l3, l4 = geom.l1, geom.l2, geom.l3, geom.l4
    lp = LinearProgram([-1.0, -1.0, 0.0, 0.0, 0.0], names=["v1", "v2", "s1", "s2", "s3"])
    lp.add([1.0, 0.0, -1.0, 0.0, 0.0], Relation.EQ, l4, "x1")
    lp.add([l2 / l1 + 1.0, 1.0, 0.0, -1.0, 0.0], Relation.EQ, 2.0 * l2, "x2")
    lp.add([l3 / l1, 1.0, 0.0, 0.0, -1.0], Relation.EQ, l3, "x4")
    sol = solve_lp(lp)
    if sol.status is not Status.OPTIMAL:
        raise SolverError(f"dual path LP returned {sol.status.value}")
    return DualCertificate(*(float(v) for v in sol.x))


# ---------------------------------------------------------------------------
# value preservation under extra equalities


class PropertySet(str, enum.Enum):
    LEMMA2 = "Lemma2"
    APPENDIX_A_EQ17 = "AppendixA_Eq17"


# each equality: ({(j, i): coeff}, rhs) over activation variables
Equality = tuple[dict[tuple[int, int], float], float]

_PROPERTY_EQUALITIES: dict[PropertySet, list[Equality]] = {
    PropertySet.LEMMA2: [
        ({(1, 0): 1.0, (3, 2): -1.0}, 0.0),
        ({(2, 0): 1.0, (3, 1): -1.0}, 0.0),
        ({(1, 2): 1.0}, 0.0),
        ({(2, 0): 1.0, (2, 1): 1.0}, 1.0),
        ({(3, 0): 1.0}, 0.0),
        ({(1, 0): 1.0, (2, 0): 1.0}, 1.0),
    ],
    PropertySet.APPENDIX_A_EQ17: [
        ({(3, 1): 1.0, (2, 0): -1.0}, 0.0),
    ],
}


def p1_with_equalities(gm: LinkGainMatrix, equalities: list[Equality]) -> CapacityResult:
    p1 = build_p1(gm)
    for terms, rhs in equalities:
        p1.lp.add_sparse({p1.lam_idx[e]: c for e, c in terms.items()}, Relation.EQ, rhs)
    return _solve_p1(p1, gm.n_nodes)


@dataclass
class PropertyCheck:
    unconstrained: float
    constrained: float
    holds: bool

    @property
    def gap(self) -> float:
        return self.unconstrained - self.constrained


def _is_symmetric(gm: LinkGainMatrix, tol: float = 1e-9) -> bool:
    c = gm.cap
    return abs(c[1, 0] - c[3, 2]) <= tol and abs(c[2, 0] - c[3, 1]) <= tol and abs(c[1, 2] - c[2, 1]) <= tol


def check_value_preserved(gm: LinkGainMatrix, equalities: list[Equality], tol: float = 1e-8
                          ) -> PropertyCheck:
    free = approx_capacity_p1(gm).capacity
    try:
        fixed = p1_with_equalities(gm, equalities).capacity
    except SolverError:
        fixed = -math.inf
    return PropertyCheck(free, fixed, abs(free - fixed) <= tol)


def verify_optimal_solution_properties(gm: LinkGainMatrix, property_set: PropertySet | str,
                                       tol: float = 1e-8) -> PropertyCheck:
    """Does some optimal schedule satisfy the named equalities?

    Existence is tested as value preservation: re-solve the flow LP with the
    equalities added and compare optima.
    """
    property_set = PropertySet(property_set)
    if gm.n_relays != 2:
        raise ParameterError("property checks need exactly two relays")
    if property_set is PropertySet.LEMMA2:
        if not _is_symmetric(gm):
            raise ParameterError("symmetric-schedule properties need a symmetric topology")
        if gm.params is not None:
            a = gm.params.a
            if not math.log2(gm.params.gamma) - a * math.log2(gm.dist[3, 0]) > a * math.log2(3.0):
                raise ParameterError("symmetric-schedule properties need gamma/d**a > 3**a")
    return check_value_preserved(gm, _PROPERTY_EQUALITIES[property_set], tol)
