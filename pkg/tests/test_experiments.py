import json
import math

import numpy as np
import pytest

from one21.experiments import (
    BETA_COLUMNS,
    DIST_COLUMNS,
    MC_COLUMNS,
    THREADS_ENV,
    ExperimentConfig,
    Rect,
    beta_sweep,
    default_workers,
    distance_sweep_compare,
    first_line_win,
    monte_carlo,
    render_csv,
    sample_relays,
    topology_corpus,
    write_outputs,
)
from one21.model import Mode, PropagationParams

P7 = PropagationParams(1e7, 2.0)
P6 = PropagationParams(1e6, 2.0)


def small_mc(seed=5, samples=40, **kw):
    return ExperimentConfig(P7, 600 * math.sqrt(2), seed=seed, samples=samples, **kw)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(P7, 100.0, samples=0)
    with pytest.raises(ValueError):
        ExperimentConfig(P7, 100.0, seed=-1)
    with pytest.raises(ValueError):
        Rect(1.0, 0.0, 0.0, 1.0)
    assert ExperimentConfig(P7, 100.0).region == Rect(0.0, 100.0, -50.0, 50.0)


def test_sampler_is_documented_pcg64():
    u = np.random.Generator(np.random.PCG64(np.random.SeedSequence(9, spawn_key=(3,)))).random(4)
    (x1, y1), (x2, y2) = sample_relays(9, 3, Rect(0, 10, -5, 5))
    assert (x1, y1, x2, y2) == pytest.approx((10 * u[0], -5 + 10 * u[1], 10 * u[2], -5 + 10 * u[3]))


def test_monte_carlo_bounded_by_reference():
    rows, summary = monte_carlo(small_mc(), workers=1)
    caps = [r.capacity for r in rows]
    assert max(caps) <= summary["reference_capacity_bits"] + 1e-6
    assert summary["reference_capacity_bits"] < summary["cstar_bits"]
    assert sum(summary["histogram"]["counts"]) == len(rows)
    assert [r.key for r in rows] == list(range(40))


def test_monte_carlo_thread_count_does_not_matter(monkeypatch):
    serial, _ = monte_carlo(small_mc(), workers=1)
    monkeypatch.setenv(THREADS_ENV, "4")
    threaded, _ = monte_carlo(small_mc())
    assert render_csv(serial) == render_csv(threaded)


def test_degenerate_regions_hit_reference():
    d, eps = 600 * math.sqrt(2), 1e-6
    pins = (Rect(eps * d, eps * d, 0.0, 0.0), Rect((1 - eps) * d, (1 - eps) * d, 0.0, 0.0))
    rows, summary = monte_carlo(ExperimentConfig(P7, d, samples=1, eps_rel=eps, region=pins), workers=1)
    assert rows[0].capacity == pytest.approx(summary["reference_capacity_bits"], abs=1e-9)


def test_workers_env(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert default_workers() == 3
    monkeypatch.setenv(THREADS_ENV, "0")
    assert default_workers() >= 1
    monkeypatch.setenv(THREADS_ENV, "x")
    with pytest.raises(ValueError):
        default_workers()


def test_beta_sweep_rows_and_regimes():
    cfg = ExperimentConfig(P6, 100.0, beta_grid_size=20)
    rows = beta_sweep(cfg)
    keys = [r.key for r in rows]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)
    assert all((r.aux["regime"] == "routing") == (r.key > 1 / 3) for r in rows)
    caps = np.array([r.capacity for r in rows])
    assert np.all(np.diff(caps) < 0)  # s = 100: well above 3^a
    with pytest.raises(ValueError):
        beta_sweep(cfg, [0.0, 0.2])


def test_beta_sweep_approaches_cstar_from_below():
    cfg = ExperimentConfig(P6, 100.0)
    rows = beta_sweep(cfg, [1e-2, 1e-4, 1e-6, 1e-8])
    gaps = 2 * math.log2(100) - np.array([r.capacity for r in rows])
    # rows come back sorted by beta, so the gap must shrink toward the front
    assert np.all(gaps > 0) and np.all(np.diff(gaps) > 0)
    # convergence is logarithmic in beta (gap ~ l2**2 / l1); stay above the distance clamp
    assert gaps[0] < 0.75


def test_distance_sweep_flags():
    cfg = ExperimentConfig(P6, 600.0)
    rows = distance_sweep_compare(cfg, [100.0, 400.0])
    assert rows[0].aux["hypothesis_violated"] == 0 and rows[1].aux["hypothesis_violated"] == 1
    assert rows[0].aux["winner_approx"] == "theorem" and rows[1].aux["winner_approx"] == "line"
    assert first_line_win(rows, Mode.APPROX) == 400.0
    assert first_line_win(rows[:1], "exact") is None


def test_csv_headers_and_format(tmp_path):
    cfg = ExperimentConfig(P6, 100.0, beta_grid_size=3)
    rows = beta_sweep(cfg)
    text = render_csv(rows)
    assert text.splitlines()[0] == ",".join(BETA_COLUMNS) == "beta,capacity_bits,lambda2_star,regime"
    assert text.splitlines()[1].split(",")[0] == "%.12g" % rows[0].key
    mc_rows, summary = monte_carlo(small_mc(samples=3), workers=1)
    assert render_csv(mc_rows).splitlines()[0] == ",".join(MC_COLUMNS)
    assert render_csv(distance_sweep_compare(cfg, [100.0])).splitlines()[0] == ",".join(DIST_COLUMNS)
    csv_path, json_path = write_outputs(mc_rows, summary, tmp_path / "sub" / "mc", small_mc(samples=3))
    doc = json.loads(json_path.read_text())
    assert {"reference_capacity_bits", "mean_capacity_bits"} <= doc["summary"].keys()
    assert doc["config"]["seed"] == 5
    first = (csv_path.read_bytes(), json_path.read_bytes())
    write_outputs(mc_rows, summary, tmp_path / "sub" / "mc", small_mc(samples=3))
    assert first == (csv_path.read_bytes(), json_path.read_bytes())


def test_write_error_has_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        write_outputs([], {}, blocker / "out")


def test_corpus_is_seeded():
    a, b = topology_corpus(100.0, 5, seed=2), topology_corpus(100.0, 5, seed=2)
    assert a == b and a != topology_corpus(100.0, 5, seed=3)
