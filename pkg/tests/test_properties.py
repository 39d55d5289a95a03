import math

from hypothesis import assume, given, settings, strategies as st

from one21.analysis import cstar, hypothesis_holds
from one21.capacity import approx_capacity_cutset, approx_capacity_p1
from one21.model import (
    Mode,
    ProjectedPair,
    PropagationParams,
    Topology,
    gain_matrix,
    link_capacity,
    project_topology,
    symmetrize,
)

coord = st.floats(-150, 250, allow_nan=False)
point = st.tuples(coord, coord)
gammas = st.floats(1e5, 1e9)
alphas = st.floats(1.5, 4.0)
SETTINGS = settings(max_examples=60, deadline=None)


def p1(topo, params):
    return approx_capacity_p1(gain_matrix(topo, params)).capacity


@SETTINGS
@given(relays=st.lists(point, min_size=2, max_size=2), gamma=gammas, a=alphas,
       k=st.floats(0.1, 10.0))
def test_scale_invariance(relays, gamma, a, k):
    params = PropagationParams(gamma, a)
    topo = Topology((0, 0), (100, 0), relays)
    scaled = PropagationParams(gamma * k**a, a)
    g1, g2 = gain_matrix(topo, params), gain_matrix(topo.scaled(k), scaled)
    for j, i in g1.links():
        assert abs(g1.cap[j, i] - g2.cap[j, i]) <= 1e-12 * max(1.0, abs(g1.cap[j, i]))
    assert abs(p1(topo, params) - p1(topo.scaled(k), scaled)) <= 1e-9


@SETTINGS
@given(relays=st.lists(point, min_size=2, max_size=2), gamma=gammas, a=alphas)
def test_projection_never_hurts(relays, gamma, a):
    params = PropagationParams(gamma, a)
    topo = Topology((0, 0), (100, 0), relays)
    assert p1(project_topology(topo), params) >= p1(topo, params) - 1e-9


@SETTINGS
@given(b1=st.floats(0.0, 0.5), b2=st.floats(0.001, 0.5), gamma=gammas)
def test_symmetrization_never_hurts(b1, b2, gamma):
    params = PropagationParams(gamma, 2.0)
    pair = ProjectedPair(b1, b2, 100.0)
    assert p1(symmetrize(pair, params).topology(), params) >= p1(pair.topology(), params) - 1e-9


@SETTINGS
@given(relays=st.lists(point, min_size=1, max_size=3), gamma=gammas, a=alphas)
def test_flow_equals_cut(relays, gamma, a):
    gm = gain_matrix(Topology((0, 0), (100, 0), relays), PropagationParams(gamma, a))
    f, c = approx_capacity_p1(gm).capacity, approx_capacity_cutset(gm).capacity
    assert abs(f - c) <= 1e-6 * max(1.0, abs(f))


@SETTINGS
@given(relays=st.lists(point, min_size=2, max_size=2), gamma=gammas, a=alphas)
def test_exact_dominates_approx(relays, gamma, a):
    params = PropagationParams(gamma, a)
    topo = Topology((0, 0), (100, 0), relays)
    gm = gain_matrix(topo, params)
    assume(gm.all_valid())
    approx, exact = p1(topo, params), p1(topo, params.with_mode(Mode.EXACT))
    assert approx - 1e-9 <= exact <= approx + 2.0


@SETTINGS
@given(d1=st.floats(1e-3, 1e4), d2=st.floats(1e-3, 1e4), gamma=gammas, a=alphas,
       mode=st.sampled_from(list(Mode)))
def test_link_capacity_monotone(d1, d2, gamma, a, mode):
    assume(abs(d1 - d2) > 1e-9 * max(d1, d2))
    params = PropagationParams(gamma, a, mode)
    lo, hi = sorted((d1, d2))
    assert link_capacity(lo, params) > link_capacity(hi, params)
    assert link_capacity(lo, PropagationParams(gamma * 2, a, mode)) > link_capacity(lo, params)


@SETTINGS
@given(x=st.lists(st.floats(0, 1), min_size=4, max_size=4), gamma=gammas)
def test_no_placement_beats_cstar(x, gamma):
    d = 100.0
    params = PropagationParams(gamma, 2.0)
    assume(hypothesis_holds(params, d))
    topo = Topology((0, 0), (d, 0), [(x[0] * d, (x[1] - 0.5) * d), (x[2] * d, (x[3] - 0.5) * d)])
    assert p1(topo, params) <= cstar(params, d) + 1e-9


@SETTINGS
@given(relays=st.lists(point, min_size=2, max_size=2), gamma=gammas)
def test_capacity_nonnegative_and_finite(relays, gamma):
    c = p1(Topology((0, 0), (100, 0), relays), PropagationParams(gamma, 2.0))
    assert math.isfinite(c) and c >= -1e-12
