import math

import numpy as np
import pytest

from one21.model import (
    Mode,
    ParameterError,
    ProjectedPair,
    PropagationParams,
    Topology,
    gain_matrix,
    link_capacity,
    make_line_topology,
    make_theorem_topology,
    project_topology,
    symmetric_geometry,
    symmetrize,
)

P = PropagationParams(1e6, 2.0)


def test_link_capacity_values():
    assert link_capacity(100.0, P) == pytest.approx(math.log2(100))
    assert link_capacity(100.0, P.with_mode("exact")) == pytest.approx(math.log2(101))
    np.testing.assert_allclose(link_capacity([10.0, 100.0], P), [math.log2(1e4), math.log2(100)])


def test_exact_within_one_bit_when_snr_above_one():
    d = np.linspace(1.0, 999.0, 50)
    gap = link_capacity(d, P.with_mode(Mode.EXACT)) - link_capacity(d, P)
    assert np.all(gap > 0) and np.all(gap < 1)


def test_zero_distance_is_clamped_and_finite():
    v = link_capacity(0.0, P, d_ref=100.0)
    assert math.isfinite(v) and v > 50
    assert math.isfinite(link_capacity(0.0, PropagationParams(1e300, 2.0, Mode.EXACT)))


@pytest.mark.parametrize("gamma,a", [(0, 2), (-1, 2), (math.inf, 2), (1e6, 1.0), (1e6, math.nan)])
def test_bad_params(gamma, a):
    with pytest.raises(ParameterError):
        PropagationParams(gamma, a)


def test_symmetric_geometry_values():
    g = symmetric_geometry(0.1, 100.0, P)
    assert (g.l1, g.l2, g.l3, g.l4) == pytest.approx(
        (math.log2(1e6 / 100), math.log2(1e6 / 8100), math.log2(1e6 / 6400), math.log2(100)))
    assert g.l1 >= g.l2 >= g.l4 and g.l3 >= g.l4
    assert g.hypothesis_holds()
    with pytest.raises(ParameterError):
        symmetric_geometry(0.0, 100.0, P)


def test_gain_matrix_matches_link_capacity():
    topo = Topology((0, 0), (100, 0), [(20, 15), (75, -20)])
    gm = gain_matrix(topo, P)
    assert np.allclose(gm.dist, gm.dist.T) and np.all(np.diag(gm.dist) == 0)
    for j, i in gm.links():
        assert gm.cap[j, i] == pytest.approx(link_capacity(gm.dist[j, i], P))
    assert gm.all_valid()
    assert len(gm.links()) == 3 * 3 - 2


def test_zero_relay_matrix():
    gm = gain_matrix(Topology((0, 0), (100, 0)), P)
    assert gm.links() == [(1, 0)]
    assert gm.cap[1, 0] == pytest.approx(math.log2(100))


def test_invalid_links_flagged():
    gm = gain_matrix(Topology((0, 0), (1900, 0), [(900, 0)]), P)
    assert not gm.valid[2, 0] and gm.valid[1, 0]


def test_projection_example_and_idempotence():
    topo = Topology((0, 0), (100, 0), [(20, 15), (75, -20)])
    proj = project_topology(topo)
    np.testing.assert_allclose(proj.relays, [(20, 0), (75, 0)], atol=1e-12)
    assert project_topology(proj) == proj


def test_projection_never_increases_distances():
    rng = np.random.default_rng(3)
    for _ in range(50):
        topo = Topology((0, 0), (100, 0), rng.uniform(-80, 180, size=(2, 2)))
        a, b = topo.points(), project_topology(topo).points()
        da = np.linalg.norm(a[:, None] - a[None], axis=-1)
        db = np.linalg.norm(b[:, None] - b[None], axis=-1)
        assert np.all(db <= da + 1e-9)


@pytest.mark.parametrize("b1,b2,expected", [(0.2, 0.25, 0.25), (0.3, 0.2, 0.3), (0.1, 0.1, 0.1)])
def test_symmetrize_examples(b1, b2, expected):
    assert symmetrize(ProjectedPair(b1, b2, 100.0), P).beta == pytest.approx(expected)


def test_projected_pair_ordering_error():
    with pytest.raises(ParameterError):
        ProjectedPair(0.7, 0.6, 100.0)


def test_projected_pair_roundtrip():
    pair = ProjectedPair(0.2, 0.3, 50.0)
    back = ProjectedPair.from_topology(pair.topology())
    assert (back.beta1, back.beta2, back.d) == pytest.approx((0.2, 0.3, 50.0))


def test_theorem_and_line_topologies():
    t = make_theorem_topology(100.0, 1e-6)
    np.testing.assert_allclose(t.relays, [(1e-4, 0), (99.9999, 0)])
    np.testing.assert_allclose(make_theorem_topology(300.0, 1 / 3).relays,
                               make_line_topology(300.0, 2).relays)
    assert make_line_topology(300.0, 2).relays == ((100.0, 0.0), (200.0, 0.0))
    assert make_line_topology(300.0, 0).relays == ()
    with pytest.raises(ParameterError):
        make_theorem_topology(100.0, 0.0)


def test_topology_rejects_coincident_ends():
    with pytest.raises(ParameterError):
        Topology((1, 1), (1, 1))
