"""Network geometry and the path-loss link model.

Nodes are indexed 0 (source), 1..N (relays) and N+1 (destination).  Link
capacities are in bits per channel use and always computed in the log
domain as ``log2(gamma) - a*log2(d)`` so that relays sitting (almost) on top
of the source stay finite.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

# relative clamp: distances below this fraction of |source - destination|
# are raised to it
DEFAULT_REL_MIN_DISTANCE = 1e-9


class ParameterError(ValueError):
    pass


class Mode(str, enum.Enum):
    APPROX = "approx"
    EXACT = "exact"


@dataclass(frozen=True)
class PropagationParams:
    gamma: float
    a: float
    mode: Mode = Mode.APPROX
    # absolute clamp length; None means DEFAULT_REL_MIN_DISTANCE * reference distance
    min_distance: float | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise ParameterError(f"gamma must be finite and positive, got {self.gamma}")
        if not (math.isfinite(self.a) and self.a > 1):
            raise ParameterError(f"path-loss exponent must exceed 1, got {self.a}")
        if self.min_distance is not None and not (
            math.isfinite(self.min_distance) and self.min_distance > 0
        ):
            raise ParameterError(f"min_distance must be positive, got {self.min_distance}")
        object.__setattr__(self, "mode", Mode(self.mode))

    def floor(self, d_ref: float = 1.0) -> float:
        if self.min_distance is not None:
            return self.min_distance
        return DEFAULT_REL_MIN_DISTANCE * d_ref

    def snr(self, d: float) -> float:
        """gamma / d**a."""
        return 2.0 ** (math.log2(self.gamma) - self.a * math.log2(d))

    def with_mode(self, mode: Mode | str) -> PropagationParams:
        return PropagationParams(self.gamma, self.a, Mode(mode), self.min_distance)


def link_capacity(distance, params: PropagationParams, d_ref: float = 1.0):
    """Point-to-point capacity of an aligned link, in bits.

    Works elementwise on arrays.  Distances below ``params.floor(d_ref)`` are
    clamped up to it.
    """
    d = np.maximum(np.asarray(distance, dtype=float), params.floor(d_ref))
    if np.any(~np.isfinite(d)):
        raise ParameterError("distance must be finite")
    approx = math.log2(params.gamma) - params.a * np.log2(d)
    if params.mode is Mode.EXACT:
        # log2(1 + 2**approx) without overflow
        out = np.logaddexp2(approx, 0.0)
    else:
        out = approx
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Topology:
    source: tuple[float, float]
    destination: tuple[float, float]
    relays: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "source", _point(self.source))
        object.__setattr__(self, "destination", _point(self.destination))
        object.__setattr__(self, "relays", tuple(_point(p) for p in self.relays))
        if self.source == self.destination:
            raise ParameterError("source and destination coincide")

    @property
    def n_relays(self) -> int:
        return len(self.relays)

    @property
    def n_nodes(self) -> int:
        return self.n_relays + 2

    @property
    def sd_distance(self) -> float:
        return math.dist(self.source, self.destination)

    def points(self) -> np.ndarray:
        return np.array([self.source, *self.relays, self.destination], dtype=float)

    def scaled(self, k: float) -> Topology:
        sc = lambda p: (k * p[0], k * p[1])  # noqa: E731
        return Topology(sc(self.source), sc(self.destination), tuple(sc(p) for p in self.relays))


def _point(p) -> tuple[float, float]:
    x, y = p
    x, y = float(x), float(y)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ParameterError(f"non-finite coordinate {p!r}")
    return (x, y)


@dataclass(frozen=True, eq=False)
class LinkGainMatrix:
    """Pairwise distances and capacities; ``cap[j, i]`` is the link i -> j.

    ``valid[j, i]`` is False where gamma/d**a <= 1, i.e. where the
    high-SNR approximation of the link model is not justified.
    """

    n_nodes: int
    dist: np.ndarray
    cap: np.ndarray
    valid: np.ndarray
    params: PropagationParams | None = field(default=None, repr=False)

    @property
    def n_relays(self) -> int:
        return self.n_nodes - 2

    def links(self) -> list[tuple[int, int]]:
        """Ordered (j, i) pairs of usable links, i in [0:N], j in [1:N+1]."""
        N = self.n_relays
        return [(j, i) for i in range(N + 1) for j in range(1, N + 2) if j != i]

    def all_valid(self) -> bool:
        return all(bool(self.valid[j, i]) for j, i in self.links())

    @classmethod
    def from_capacities(cls, cap: np.ndarray) -> LinkGainMatrix:
        """Wrap a raw capacity matrix (no geometry)."""
        cap = np.array(cap, dtype=float)
        n = cap.shape[0]
        return cls(n, np.full((n, n), np.nan), cap, np.ones((n, n), dtype=bool))


def gain_matrix(topology: Topology, params: PropagationParams) -> LinkGainMatrix:
    pts = topology.points()
    diff = pts[:, None, :] - pts[None, :, :]
    raw = np.sqrt((diff**2).sum(axis=-1))
    floor = params.floor(topology.sd_distance)
    dist = np.maximum(raw, floor)
    np.fill_diagonal(dist, 0.0)
    off = ~np.eye(len(pts), dtype=bool)
    cap = np.zeros_like(dist)
    cap[off] = link_capacity(dist[off], params)
    log_snr = math.log2(params.gamma) - params.a * np.log2(np.where(off, dist, 1.0))
    valid = (log_snr > 0) & off
    return LinkGainMatrix(len(pts), dist, cap, valid, params)


# ---------------------------------------------------------------------------
# geometric reductions


def project_topology(topology: Topology) -> Topology:
    """Drop every relay orthogonally onto the source-destination line."""
    s = np.array(topology.source)
    u = np.array(topology.destination) - s
    u /= np.linalg.norm(u)
    relays = tuple(tuple(s + float(np.dot(np.array(p) - s, u)) * u) for p in topology.relays)
    return Topology(topology.source, topology.destination, relays)


@dataclass(frozen=True)
class ProjectedPair:
    """Two relays on the axis at ``beta1*d`` and ``(1 - beta2)*d``."""

    beta1: float
    beta2: float
    d: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.beta1 <= 1.0 and 0.0 <= self.beta2 <= 1.0):
            raise ParameterError("beta fractions must lie in [0, 1]")
        if self.d <= 0:
            raise ParameterError("d must be positive")
        if self.beta1 * self.d > self.d - self.beta2 * self.d:
            raise ParameterError("relay 1 lies to the right of relay 2")

    def topology(self) -> Topology:
        return Topology((0.0, 0.0), (self.d, 0.0),
                        ((self.beta1 * self.d, 0.0), ((1.0 - self.beta2) * self.d, 0.0)))

    @classmethod
    def from_topology(cls, topology: Topology) -> ProjectedPair:
        """Read fractions from a 2-relay topology in the canonical frame."""
        if topology.n_relays != 2:
            raise ParameterError("need exactly two relays")
        d = topology.sd_distance
        p = project_topology(topology)
        s = np.array(p.source)
        u = (np.array(p.destination) - s) / d
        t1, t2 = (float(np.dot(np.array(r) - s, u)) for r in p.relays)
        if t1 > t2:
            t1, t2 = t2, t1
        return cls(min(max(t1 / d, 0.0), 1.0), min(max(1.0 - t2 / d, 0.0), 1.0), d)


@dataclass(frozen=True)
class SymmetricGeometry:
    """Symmetric projected 2-relay network: relays at beta*d and (1-beta)*d.

    ``l1`` source->relay1 (= relay2->dest), ``l2`` source->relay2
    (= relay1->dest), ``l3`` relay<->relay, ``l4`` source->dest, ``s`` the
    end-to-end SNR gamma/d**a.
    """

    beta: float
    d: float
    l1: float
    l2: float
    l3: float
    l4: float
    s: float
    params: PropagationParams = field(repr=False, compare=False)

    @property
    def log_s(self) -> float:
        return math.log2(self.params.gamma) - self.params.a * math.log2(self.d)

    def topology(self) -> Topology:
        return ProjectedPair(self.beta, self.beta, self.d).topology()

    def hypothesis_holds(self) -> bool:
        """True when gamma/d**a > 3**a."""
        return self.log_s > self.params.a * math.log2(3.0)


def symmetric_geometry(beta: float, d: float, params: PropagationParams) -> SymmetricGeometry:
    if not (0.0 < beta <= 0.5):
        raise ParameterError(f"beta must lie in (0, 1/2], got {beta}")
    if d <= 0:
        raise ParameterError("d must be positive")
    lc = lambda x: link_capacity(x, params, d_ref=d)  # noqa: E731
    l3 = lc((1.0 - 2.0 * beta) * d) if beta < 0.5 else math.inf
    return SymmetricGeometry(beta, d, lc(beta * d), lc((1.0 - beta) * d), l3, lc(d),
                             params.snr(d), params)


def symmetrize(pair: ProjectedPair, params: PropagationParams) -> SymmetricGeometry:
    """Symmetric network that moves the inner relay outward to the larger fraction.

    A larger fraction above 1/2 describes the same symmetric network as
    ``1 - beta`` with the relay labels swapped; that form is returned.
    """
    beta = max(pair.beta1, pair.beta2)
    if beta > 0.5:
        beta = 1.0 - beta
    if beta <= 0.0:
        raise ParameterError("symmetrization needs a relay strictly inside the segment")
    return symmetric_geometry(beta, pair.d, params)


def make_theorem_topology(d: float, eps_rel: float) -> Topology:
    if not (0.0 < eps_rel < 0.5):
        raise ParameterError(f"eps_rel must lie in (0, 1/2), got {eps_rel}")
    return Topology((0.0, 0.0), (d, 0.0), ((eps_rel * d, 0.0), ((1.0 - eps_rel) * d, 0.0)))


def make_line_topology(d: float, n_relays: int) -> Topology:
    if n_relays < 0:
        raise ParameterError("n_relays must be non-negative")
    step = d / (n_relays + 1)
    return Topology((0.0, 0.0), (d, 0.0), tuple((k * step, 0.0) for k in range(1, n_relays + 1)))
