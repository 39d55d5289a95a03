"""Seeded Monte Carlo runs and parameter sweeps, with CSV/JSON output.

Random relay positions come from numpy's PCG64 generator.  Sample ``i`` of a
run with seed ``s`` uses its own stream,
``PCG64(SeedSequence(entropy=s, spawn_key=(i,)))``, and draws four doubles
``u`` via ``Generator.random(4)``; relay k sits at
``(x_lo + u[2k] * (x_hi - x_lo), y_lo + u[2k+1] * (y_hi - y_lo))``.  Streams
are therefore independent of evaluation order and worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .analysis import cstar, crossover_distance, hypothesis_holds, symmetric_closed_form
from .capacity import approx_capacity_p1, capacity_p4
from .model import (
    Mode,
    PropagationParams,
    Topology,
    gain_matrix,
    make_line_topology,
    make_theorem_topology,
    symmetric_geometry,
)

EPS_REL = 1e-6
HIST_BINS = 20
THREADS_ENV = "ONE21_THREADS"


@dataclass(frozen=True)
class Rect:
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    def __post_init__(self) -> None:
        if self.x_lo > self.x_hi or self.y_lo > self.y_hi:
            raise ValueError("region bounds are not ordered")

    @classmethod
    def strip(cls, d: float) -> Rect:
        """[0, d] x [-d/2, d/2]."""
        return cls(0.0, d, -d / 2.0, d / 2.0)


@dataclass
class ExperimentConfig:
    params: PropagationParams
    d: float
    seed: int = 0
    samples: int = 1000
    region: Rect | tuple[Rect, Rect] | None = None
    eps_rel: float = EPS_REL
    beta_grid_size: int = 99
    d_grid_size: int = 23

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.region is None:
            self.region = Rect.strip(self.d)
        elif not isinstance(self.region, Rect) and len(self.region) != 2:
            raise ValueError("region must be one rectangle or one per relay")

    def echo(self) -> dict:
        out = asdict(self)
        out["params"] = {
            "gamma": self.params.gamma,
            "a": self.params.a,
            "mode": self.params.mode.value,
            "min_distance": self.params.min_distance,
        }
        return out


@dataclass
class SweepRow:
    key: float
    capacity: float
    aux: dict = field(default_factory=dict)
    columns: tuple[str, ...] = ()

    def record(self) -> dict:
        out = {}
        for col in self.columns:
            if col == self.columns[0]:
                out[col] = self.key
            elif col == "capacity_bits":
                out[col] = self.capacity
            else:
                out[col] = self.aux[col]
        return out


def default_workers() -> int:
    raw = os.environ.get(THREADS_ENV, "0")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"{THREADS_ENV} must be >= 0")
    return n or min(8, os.cpu_count() or 1)


def p1_capacity(topology: Topology, params: PropagationParams) -> float:
    return approx_capacity_p1(gain_matrix(topology, params)).capacity


# ---------------------------------------------------------------------------
# Monte Carlo


MC_COLUMNS = ("sample", "x1", "y1", "x2", "y2", "capacity_bits")


def sample_relays(seed: int, index: int, region: Rect | tuple[Rect, Rect]
                  ) -> tuple[tuple[float, float], ...]:
    """Relay pair for one sample; a pair of rectangles gives each relay its own."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))
    u = rng.random(4)
    boxes = (region, region) if isinstance(region, Rect) else region
    return tuple(
        (b.x_lo + u[2 * k] * (b.x_hi - b.x_lo), b.y_lo + u[2 * k + 1] * (b.y_hi - b.y_lo))
        for k, b in enumerate(boxes)
    )


def _mc_sample(config: ExperimentConfig, index: int) -> SweepRow:
    relays = sample_relays(config.seed, index, config.region)
    topo = Topology((0.0, 0.0), (config.d, 0.0), relays)
    cap = p1_capacity(topo, config.params)
    (x1, y1), (x2, y2) = relays
    return SweepRow(index, cap, {"x1": x1, "y1": y1, "x2": x2, "y2": y2}, MC_COLUMNS)


def monte_carlo(config: ExperimentConfig, workers: int | None = None) -> tuple[list[SweepRow], dict]:
    """Capacities of ``config.samples`` random relay pairs plus a summary.

    The summary's reference is the edge placement at ``eps_rel``.
    """
    workers = default_workers() if workers is None else workers
    idx = range(config.samples)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda i: _mc_sample(config, i), idx))
    else:
        rows = [_mc_sample(config, i) for i in idx]

    caps = np.array([r.capacity for r in rows])
    ref = p1_capacity(make_theorem_topology(config.d, config.eps_rel), config.params)
    hi = max(ref, float(caps.max()))
    counts, edges = np.histogram(caps, bins=HIST_BINS, range=(min(0.0, float(caps.min())), hi))
    summary = {
        "samples": config.samples,
        "mean_capacity_bits": float(caps.mean()),
        "min_capacity_bits": float(caps.min()),
        "max_capacity_bits": float(caps.max()),
        "reference_capacity_bits": ref,
        "mean_to_reference": float(caps.mean()) / ref,
        "histogram": {"edges": edges.tolist(), "counts": counts.tolist()},
    }
    try:
        summary["cstar_bits"] = cstar(config.params, config.d)
    except ValueError:
        summary["cstar_bits"] = None
    return rows, summary


# ---------------------------------------------------------------------------
# sweeps


BETA_COLUMNS = ("beta", "capacity_bits", "lambda2_star", "regime")
# closed form vs LP disagreement above this means a bug, not noise
CROSS_CHECK_TOL = 1e-8


def default_beta_grid(n: int) -> np.ndarray:
    """n points strictly inside (0, 1/2), cell midpoints."""
    return (np.arange(n) + 0.5) / (2.0 * n)


def beta_sweep(config: ExperimentConfig, beta_grid=None) -> list[SweepRow]:
    """Capacity of the symmetric placement as the relays move inward."""
    grid = default_beta_grid(config.beta_grid_size) if beta_grid is None else beta_grid
    grid = np.sort(np.asarray(grid, dtype=float))
    if np.any(grid <= 0) or np.any(grid >= 0.5):
        raise ValueError("beta grid must lie in (0, 1/2)")
    exact_closed = hypothesis_holds(config.params, config.d) and config.params.mode is Mode.APPROX
    rows = []
    for beta in grid:
        geom = symmetric_geometry(float(beta), config.d, config.params)
        lp = p1_capacity(geom.topology(), config.params)
        if exact_closed:
            cap = symmetric_closed_form(geom)
            if abs(cap - lp) > CROSS_CHECK_TOL * max(1.0, abs(lp)):
                raise RuntimeError(f"closed form {cap} and LP {lp} disagree at beta={beta}")
        else:
            cap = lp
        _, lam2 = capacity_p4(geom)
        regime = "routing" if beta > 1.0 / 3.0 else "split"
        rows.append(SweepRow(float(beta), cap, {"lambda2_star": lam2, "regime": regime}, BETA_COLUMNS))
    return rows


DIST_COLUMNS = (
    "d", "theorem_approx_bits", "line_approx_bits", "winner_approx",
    "theorem_exact_bits", "line_exact_bits", "winner_exact", "cstar_bits", "hypothesis_violated",
)


def default_d_grid(n: int) -> np.ndarray:
    return np.linspace(50.0, 600.0, n)


def distance_sweep_compare(config: ExperimentConfig, d_grid=None) -> list[SweepRow]:
    """Edge placement vs equally spaced line, in both link models."""
    grid = default_d_grid(config.d_grid_size) if d_grid is None else d_grid
    grid = np.sort(np.asarray(grid, dtype=float))
    if np.any(grid <= 0):
        raise ValueError("distances must be positive")
    approx = config.params.with_mode(Mode.APPROX)
    exact = config.params.with_mode(Mode.EXACT)
    rows = []
    for d in grid:
        d = float(d)
        thm, line = make_theorem_topology(d, config.eps_rel), make_line_topology(d, 2)
        ta, la = p1_capacity(thm, approx), p1_capacity(line, approx)
        te, le = p1_capacity(thm, exact), p1_capacity(line, exact)
        try:
            cs = cstar(approx, d)
        except ValueError:
            cs = math.nan
        aux = {
            "line_approx_bits": la,
            "winner_approx": "theorem" if ta > la else "line",
            "theorem_exact_bits": te,
            "line_exact_bits": le,
            "winner_exact": "theorem" if te > le else "line",
            "cstar_bits": cs,
            "hypothesis_violated": int(not hypothesis_holds(approx, d)),
        }
        aux["theorem_approx_bits"] = ta
        rows.append(SweepRow(d, ta, aux, DIST_COLUMNS))
    return rows


def first_line_win(rows: list[SweepRow], mode: Mode | str = Mode.APPROX) -> float | None:
    """Smallest grid distance at which the line beats the edge placement."""
    col = f"winner_{Mode(mode).value}"
    for row in rows:
        if row.aux[col] == "line":
            return row.key
    return None


def distance_summary(config: ExperimentConfig, rows: list[SweepRow]) -> dict:
    step = rows[1].key - rows[0].key if len(rows) > 1 else math.nan
    return {
        "crossover_distance": crossover_distance(config.params),
        "grid_step": step,
        "first_line_win_approx": first_line_win(rows, Mode.APPROX),
        "first_line_win_exact": first_line_win(rows, Mode.EXACT),
    }


def beta_summary(config: ExperimentConfig, rows: list[SweepRow]) -> dict:
    caps = [r.capacity for r in rows]
    out = {"points": len(rows), "max_capacity_bits": max(caps), "min_capacity_bits": min(caps)}
    try:
        out["cstar_bits"] = cstar(config.params, config.d)
    except ValueError:
        out["cstar_bits"] = None
    out["hypothesis_holds"] = hypothesis_holds(config.params, config.d)
    return out


# ---------------------------------------------------------------------------
# output


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.12g" % v
    return str(v)


def render_csv(rows: list[SweepRow]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = rows[0].columns
    w.writerow(cols)
    for row in rows:
        rec = row.record()
        w.writerow([_fmt(rec[c]) for c in cols])
    return buf.getvalue()


def render_json(summary: dict, config: ExperimentConfig | None = None) -> str:
    doc = {"summary": summary}
    if config is not None:
        doc["config"] = config.echo()
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_outputs(rows: list[SweepRow], summary: dict, path_prefix: str | Path,
                  config: ExperimentConfig | None = None) -> tuple[Path, Path]:
    """Write ``<prefix>.csv`` and ``<prefix>.json``."""
    prefix = Path(path_prefix)
    csv_path = prefix.with_name(prefix.name + ".csv")
    json_path = prefix.with_name(prefix.name + ".json")
    for path, text in ((csv_path, render_csv(rows)), (json_path, render_json(summary, config))):
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return csv_path, json_path


def topology_corpus(d: float, n: int = 200, seed: int = 0) -> list[Topology]:
    """Seeded 2-relay instances in the strip, shared by the property checks."""
    region = Rect.strip(d)
    return [Topology((0.0, 0.0), (d, 0.0), sample_relays(seed, i, region)) for i in range(n)]
