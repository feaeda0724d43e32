import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from rectiplan.errors import MalformedProgram
from rectiplan.lp import LinearProgram, LpStatus, check_point, solve_lp


def lp_rows(cost, eq=(), ineq=(), **kw):
    return LinearProgram.from_rows(cost, eq, ineq, **kw)


# -- spec examples ---------------------------------------------------------

def test_bound_active_optimum():
    sol = solve_lp(lp_rows([1.0]))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.x[0] == 0.0 and sol.objective == 0.0


def test_cheaper_per_unit_variable():
    sol = solve_lp(lp_rows([1.0, 1.0], [([1.0, 2.0], 1.0)]))
    assert sol.status is LpStatus.OPTIMAL
    np.testing.assert_allclose(sol.x, [0.0, 0.5], atol=1e-12)
    assert sol.objective == pytest.approx(0.5, abs=1e-12)


def test_unbounded():
    assert solve_lp(lp_rows([-1.0])).status is LpStatus.UNBOUNDED


def test_contradictory_equalities():
    assert solve_lp(lp_rows([0.0], [([1.0], 1.0), ([1.0], 2.0)])).status is LpStatus.INFEASIBLE


def test_check_point_examples():
    assert check_point(lp_rows([0.0], [([1.0], 1.0)]), [1.0]).max_eq_residual == 0.0
    assert check_point(lp_rows([0.0], [([1.0], 1.0)]), [0.9]).max_eq_residual == pytest.approx(0.1, abs=1e-15)
    assert check_point(lp_rows([0.0], ineq=[([1.0], 2.0)]), [3.0]).max_ineq_violation == 1.0


# -- malformed input ---------------------------------------------------------

def test_dimension_mismatch():
    with pytest.raises(MalformedProgram):
        lp_rows([1.0, 2.0], [([1.0], 1.0)])
    with pytest.raises(MalformedProgram):
        LinearProgram(cost=[1.0], eq_matrix=[[1.0, 1.0]], eq_rhs=[1.0])
    with pytest.raises(MalformedProgram):
        check_point(lp_rows([1.0]), [1.0, 2.0])


def test_non_finite_and_bad_bounds():
    with pytest.raises(MalformedProgram):
        lp_rows([np.nan])
    with pytest.raises(MalformedProgram):
        lp_rows([1.0], [([np.inf], 1.0)])
    with pytest.raises(MalformedProgram):
        lp_rows([1.0], lower_bounds=[2.0], upper_bounds=[1.0])


# -- bounds, inequalities, redundancy -----------------------------------------

def test_general_bounds():
    # min x0 - x1, -1 <= x0 <= 3, x1 free but x1 <= 2 via upper bound, x0 + x1 = 1
    lp = lp_rows([1.0, -1.0], [([1.0, 1.0], 1.0)], lower_bounds=[-1.0, -np.inf], upper_bounds=[3.0, 2.0])
    sol = solve_lp(lp)
    np.testing.assert_allclose(sol.x, [-1.0, 2.0], atol=1e-12)
    assert sol.objective == pytest.approx(-3.0)


def test_free_variable():
    lp = lp_rows([1.0], ineq=[([-1.0], 4.0)], lower_bounds=[-np.inf])
    sol = solve_lp(lp)
    assert sol.x[0] == pytest.approx(-4.0)


def test_redundant_rows_are_tolerated():
    lp = lp_rows([1.0, 2.0, 0.0], [([1.0, 1.0, 1.0], 1.0), ([2.0, 2.0, 2.0], 2.0), ([0.0, 0.0, 0.0], 0.0),
                                   ([1.0, 0.0, -1.0], 0.0)])
    sol = solve_lp(lp)
    assert sol.optimal
    assert check_point(lp, sol.x).worst <= 1e-12
    assert sol.objective == pytest.approx(0.5)


def test_zero_row_with_nonzero_rhs_is_infeasible():
    assert solve_lp(lp_rows([1.0], [([0.0], 1.0)])).status is LpStatus.INFEASIBLE


@pytest.mark.parametrize("rule", ["bland", "dantzig"])
def test_degenerate_cycling_example(rule):
    # Beale's example cycles under the textbook Dantzig rule without anti-cycling
    c = [-0.75, 150.0, -0.02, 6.0]
    ineq = [([0.25, -60.0, -0.04, 9.0], 0.0), ([0.5, -90.0, -0.02, 3.0], 0.0), ([0.0, 0.0, 1.0, 0.0], 1.0)]
    sol = solve_lp(lp_rows(c, ineq=ineq), rule=rule)
    assert sol.optimal
    assert sol.objective == pytest.approx(-0.05, abs=1e-9)


# -- properties ---------------------------------------------------------------

def _random_lp(rng, m, n):
    A = rng.integers(-3, 4, size=(m, n)).astype(float)
    x0 = rng.uniform(0, 2, size=n)  # guarantees feasibility
    b = A @ x0
    c = rng.uniform(0.1, 2.0, size=n)  # positive cost on x >= 0 keeps it bounded
    return LinearProgram(cost=c, eq_matrix=A, eq_rhs=b), x0


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), m=st.integers(1, 6), extra=st.integers(1, 8))
def test_matches_highs_and_weak_duality(seed, m, extra):
    rng = np.random.default_rng(seed)
    lp, x0 = _random_lp(rng, m, m + extra)
    sol = solve_lp(lp)
    assert sol.optimal
    ref = linprog(lp.cost, A_eq=lp.eq_matrix, b_eq=lp.eq_rhs, bounds=(0, None), method="highs")
    assert sol.objective == pytest.approx(ref.fun, abs=1e-7, rel=1e-9)
    assert sol.objective <= float(lp.cost @ x0) + 1e-7
    assert check_point(lp, sol.x).worst <= 1e-8


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_bland_and_dantzig_agree(seed):
    rng = np.random.default_rng(seed)
    lp, _ = _random_lp(rng, 5, 12)
    a, b = solve_lp(lp, rule="bland"), solve_lp(lp, rule="dantzig")
    assert a.objective == pytest.approx(b.objective, abs=1e-9)


def test_infeasible_detected_like_highs():
    A = np.array([[1.0, 1.0], [1.0, -1.0]])
    lp = LinearProgram(cost=[1.0, 1.0], eq_matrix=A, eq_rhs=[1.0, 3.0])  # needs x1 = -1
    assert solve_lp(lp).status is LpStatus.INFEASIBLE
    assert linprog([1, 1], A_eq=A, b_eq=[1, 3], bounds=(0, None), method="highs").status == 2


def test_determinism(rng):
    lp, _ = _random_lp(rng, 6, 14)
    a, b = solve_lp(lp), solve_lp(lp)
    assert a.x.tobytes() == b.x.tobytes()
    assert a.objective == b.objective and a.iterations == b.iterations


@pytest.mark.parametrize("scale", [1e-3, 0.37, 5.0, 1e4])
def test_cost_scaling_keeps_active_set(scale):
    base = lp_rows([1.0, 1.0], [([1.0, 2.0], 1.0)])
    scaled = lp_rows([scale, scale], [([1.0, 2.0], 1.0)])
    a, b = solve_lp(base), solve_lp(scaled)
    assert (np.abs(a.x) < 1e-12).tolist() == (np.abs(b.x) < 1e-12).tolist()
    assert b.objective == pytest.approx(scale * a.objective)


def test_inequality_rows(rng):
    # max x0 + x1 within a box cut by a diagonal
    lp = lp_rows([-1.0, -1.0], ineq=[([1.0, 0.0], 2.0), ([0.0, 1.0], 2.0), ([1.0, 1.0], 3.0)])
    sol = solve_lp(lp)
    assert sol.objective == pytest.approx(-3.0)
    assert check_point(lp, sol.x).max_ineq_violation <= 1e-12
