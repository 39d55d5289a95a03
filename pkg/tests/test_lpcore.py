import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from one21.lpcore import (
    IterationLimitError,
    LinearProgram,
    LpError,
    Relation,
    Status,
    solve_lp,
    verify_solution,
)


def to_scipy(lp: LinearProgram):
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for con in lp.constraints:
        if con.relation is Relation.LE:
            A_ub.append(con.coeffs)
            b_ub.append(con.rhs)
        elif con.relation is Relation.GE:
            A_ub.append(-con.coeffs)
            b_ub.append(-con.rhs)
        else:
            A_eq.append(con.coeffs)
            b_eq.append(con.rhs)
    bounds = [(None if np.isinf(lo) else lo, None if np.isinf(hi) else hi)
              for lo, hi in zip(lp.lower, lp.upper)]
    return linprog(-lp.objective, A_ub=A_ub or None, b_ub=b_ub or None,
                   A_eq=A_eq or None, b_eq=b_eq or None, bounds=bounds, method="highs")


def test_box_example():
    lp = LinearProgram([1.0, 1.0])
    lp.add([1, 0], "<=", 1)
    lp.add([0, 1], "<=", 1)
    sol = solve_lp(lp)
    assert sol.status is Status.OPTIMAL
    assert sol.objective_value == pytest.approx(2.0)
    np.testing.assert_allclose(sol.x, [1.0, 1.0])
    assert verify_solution(lp, sol).max_violation <= 1e-9


def test_unbounded_is_a_status():
    assert solve_lp(LinearProgram([1.0])).status is Status.UNBOUNDED


def test_infeasible_is_a_status():
    lp = LinearProgram([1.0])
    lp.add([1.0], "<=", 1)
    lp.add([1.0], ">=", 2)
    assert solve_lp(lp).status is Status.INFEASIBLE


def test_equality_and_ge_rows():
    # max x + 2y  s.t.  x + y == 3, y >= 1, y <= 2
    lp = LinearProgram([1.0, 2.0])
    lp.add([1, 1], "==", 3)
    lp.add([0, 1], ">=", 1)
    lp.add([0, 1], "<=", 2)
    sol = solve_lp(lp)
    assert sol.objective_value == pytest.approx(5.0)
    np.testing.assert_allclose(sol.x, [1.0, 2.0], atol=1e-12)


def test_free_and_shifted_bounds():
    # min |shift|: max -x  s.t.  x >= -5 via bound, x free above
    lp = LinearProgram([-1.0, 1.0], lower=[-5.0, -np.inf], upper=[np.inf, 4.0])
    lp.add([0, 1], ">=", -10)
    sol = solve_lp(lp)
    assert sol.objective_value == pytest.approx(9.0)
    np.testing.assert_allclose(sol.x, [-5.0, 4.0])


def test_degenerate_cycling_example_terminates():
    # Beale's classic example cycles under the largest-coefficient rule
    lp = LinearProgram([0.75, -150.0, 0.02, -6.0])
    lp.add([0.25, -60, -0.04, 9], "<=", 0)
    lp.add([0.5, -90, -0.02, 3], "<=", 0)
    lp.add([0, 0, 1, 0], "<=", 1)
    sol = solve_lp(lp)
    assert sol.status is Status.OPTIMAL
    assert sol.objective_value == pytest.approx(0.05)


def test_redundant_equalities():
    lp = LinearProgram([1.0, 1.0])
    lp.add([1, 1], "==", 1)
    lp.add([2, 2], "==", 2)
    sol = solve_lp(lp)
    assert sol.objective_value == pytest.approx(1.0)


def test_dimension_mismatch_raises():
    lp = LinearProgram([1.0, 2.0])
    with pytest.raises(LpError):
        lp.add([1.0], "<=", 1)
    with pytest.raises(LpError):
        LinearProgram([1.0], lower=[0.0, 0.0])
    with pytest.raises(LpError):
        LinearProgram([np.nan])


def test_iteration_cap():
    lp = LinearProgram(np.ones(6))
    for k in range(6):
        row = np.zeros(6)
        row[k] = 1
        lp.add(row, "<=", 1)
    with pytest.raises(IterationLimitError):
        solve_lp(lp, max_iter=2)


def test_verify_reports_perturbation():
    lp = LinearProgram([1.0, 1.0])
    lp.add([1, 1], "<=", 1)
    sol = solve_lp(lp)
    sol.x = sol.x + np.array([1.0, 0.0])
    assert verify_solution(lp, sol).max_violation > 0.5


def test_duals_certify_optimum():
    lp = LinearProgram([3.0, 2.0])
    lp.add([1, 1], "<=", 4)
    lp.add([1, 3], "<=", 6)
    lp.add([1, 0], "<=", 3)
    sol = solve_lp(lp)
    diag = verify_solution(lp, sol, sol.duals)
    assert diag.ok()
    b = np.array([c.rhs for c in lp.constraints])
    assert sol.duals @ b == pytest.approx(sol.objective_value)


def test_dump_lists_every_row():
    lp = LinearProgram([1.0, 0.0], names=["a", "b"])
    lp.add([1, 1], "<=", 2, "cap")
    text = lp.dump()
    assert "max +1*a" in text and "cap: +1*a +1*b <= 2" in text


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), m=st.integers(1, 6), n=st.integers(1, 6),
       eq=st.booleans())
def test_matches_highs_on_random_programs(seed, m, n, eq):
    rng = np.random.default_rng(seed)
    lp = LinearProgram(rng.normal(size=n), upper=np.where(rng.random(n) < 0.3, 5.0, np.inf))
    for _ in range(m):
        lp.add(rng.normal(size=n), rng.choice(["<=", ">="]), float(rng.normal() * 2))
    if eq:
        lp.add(rng.normal(size=n), "==", float(rng.normal()))
    ours = solve_lp(lp)
    ref = to_scipy(lp)
    if ref.status == 0:
        assert ours.status is Status.OPTIMAL
        assert ours.objective_value == pytest.approx(-ref.fun, rel=1e-7, abs=1e-7)
        assert verify_solution(lp, ours).max_violation <= 1e-7
    elif ref.status == 2:
        # HiGHS reports both "infeasible" and "infeasible or unbounded" as 2
        assert ours.status is not Status.OPTIMAL
    elif ref.status == 3:
        assert ours.status is Status.UNBOUNDED


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_deterministic(seed):
    rng = np.random.default_rng(seed)
    lp = LinearProgram(rng.random(4))
    for _ in range(4):
        lp.add(rng.random(4), "<=", 1.0)
    a, b = solve_lp(lp), solve_lp(lp)
    assert a.objective_value == b.objective_value and np.array_equal(a.x, b.x)
