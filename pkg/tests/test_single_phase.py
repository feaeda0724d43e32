import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from conftest import fig_bindings
from rectiplan.discretization import build_grid, single_phase_template, template_from_samples
from rectiplan.errors import InfeasibleProblem, LengthMismatch, NonpositiveLoad, SpecInvalid
from rectiplan.lp import LinearProgram, LpStatus, solve_lp
from rectiplan.quantizer import residual_report
from rectiplan.single_phase import (SinglePhaseSpec, build_single_phase_lp, input_current_single,
                                    output_voltage_single, solve_single_phase)


def grid_mean_abs_sin(N):
    """Largest reachable DC: conduct with the sign of the supply at every sample."""
    return math.fsum(abs(math.sin(2 * math.pi * n / N)) for n in range(N)) / N


def test_cost_coefficients_example():
    lp = build_single_phase_lp(SinglePhaseSpec(N=4, lam=10.0), build_grid(4))
    c = lp.cost.reshape(4, 3)
    np.testing.assert_allclose(c[:, 0], [0.25, 2.75, 0.25, 2.75], atol=1e-12)
    np.testing.assert_allclose(c[:, 2], [0.25, 2.75, 0.25, 2.75], atol=1e-12)
    assert np.all(c[:, 1] == 0.0)


def test_row_counts():
    spec = SinglePhaseSpec(N=16, voltage_harmonic_bindings={2: 0, 3: 0, 5: 0})
    lp = build_single_phase_lp(spec, build_grid(16))
    assert lp.num_vars == 48
    assert lp.eq_matrix.shape[0] == 16 + 1 + 6


@pytest.mark.parametrize("kwargs", [
    dict(N=16, current_zero_harmonics=[1]),
    dict(N=16, current_zero_harmonics=[8]),
    dict(N=16, voltage_harmonic_bindings={9: 0}),
    dict(N=16, lam=-1.0),
    dict(N=16, dc_target=math.inf),
    dict(N=16, dc_interval=(0.3, 0.1)),
])
def test_invalid_specs(kwargs):
    with pytest.raises(SpecInvalid):
        SinglePhaseSpec(**kwargs)


def test_grid_mismatch():
    with pytest.raises(SpecInvalid):
        build_single_phase_lp(SinglePhaseSpec(N=16), build_grid(32))


def test_zero_dc_is_free():
    r = solve_single_phase(SinglePhaseSpec(N=32, lam=10.0), build_grid(32))
    assert r.objective == pytest.approx(0.0, abs=1e-12)
    assert np.all(r.Z[:, 1] == pytest.approx(1.0))
    assert np.all(r.x == 0.0)


def test_fig5_dc_met(grid128):
    spec = SinglePhaseSpec(N=128, dc_target=0.2, lam=10.0, voltage_harmonic_bindings=fig_bindings())
    r = solve_single_phase(spec, grid128)
    assert np.mean(np.sin(grid128.theta) * r.x) == pytest.approx(0.2, abs=1e-6)


def test_max_dc_matches_full_conduction(grid128):
    bound = grid_mean_abs_sin(128)
    assert bound == pytest.approx(2 / math.pi, abs=1e-3)
    # the LP that maximizes the DC row reaches exactly the full-conduction value
    lp = build_single_phase_lp(SinglePhaseSpec(N=128), grid128)
    dc_row = lp.eq_matrix[lp.eq_labels.index("dc")]
    rows = [i for i, lab in enumerate(lp.eq_labels) if lab.startswith("rowsum")]
    sol = solve_lp(LinearProgram(cost=-dc_row, eq_matrix=lp.eq_matrix[rows], eq_rhs=lp.eq_rhs[rows]))
    assert -sol.objective == pytest.approx(bound, abs=1e-12)
    x = np.sign(np.sin(grid128.theta))
    assert np.mean(output_voltage_single(x, single_phase_template(grid128))) == pytest.approx(bound, abs=1e-12)


def test_dc_above_bound_is_infeasible(grid128):
    assert 0.7 > grid_mean_abs_sin(128)
    with pytest.raises(InfeasibleProblem) as exc:
        solve_single_phase(SinglePhaseSpec(N=128, dc_target=0.7), grid128)
    assert exc.value.lp is not None
    solve_single_phase(SinglePhaseSpec(N=128, dc_target=grid_mean_abs_sin(128) - 1e-6), grid128)


def test_output_voltage_examples():
    t = single_phase_template(build_grid(4))
    np.testing.assert_allclose(output_voltage_single(np.ones(4), t), [0, 1, 0, -1], atol=1e-15)
    assert np.all(output_voltage_single(np.zeros(4), t) == 0.0)
    g = build_grid(256)
    v = output_voltage_single(np.sign(np.sin(g.theta)), single_phase_template(g))
    assert v.mean() == pytest.approx(0.63662, abs=1e-4)
    with pytest.raises(LengthMismatch):
        output_voltage_single(np.ones(3), t)


def test_input_current_examples():
    np.testing.assert_array_equal(input_current_single([1, 0, -1], 2.0), [2, 0, -2])
    assert np.all(input_current_single(np.zeros(5), 3.0) == 0.0)
    x = np.array([0.3, -0.2])
    np.testing.assert_array_equal(input_current_single(x, 1.0), x)
    with pytest.raises(NonpositiveLoad):
        input_current_single(x, 0.0)


def check_relaxed(r, spec, grid, template=None, tol=1e-8):
    """Independent re-evaluation of every constraint group from Z and the waveforms."""
    assert r.Z.min() >= -tol
    assert np.abs(r.Z.sum(axis=1) - 1.0).max() <= tol
    S = np.array(spec.levels.S, dtype=float)
    np.testing.assert_array_equal(r.x, r.Z @ S)
    assert r.x.min() >= -1 - tol and r.x.max() <= 1 + tol
    rep = residual_report(r, spec, grid, template)
    assert rep.dc_error <= tol
    assert rep.max_harmonic_residual <= tol
    # objective is the conduction-weighted energy
    s = (template or single_phase_template(grid)).samples
    expected = np.mean(r.conduction_mass * (1 + spec.lam * s ** 2))
    assert r.objective == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("free_wheel", [True, False])
def test_constraint_faithfulness_fig5(grid128, free_wheel):
    spec = SinglePhaseSpec(N=128, free_wheel=free_wheel, dc_target=0.2, lam=10.0,
                           voltage_harmonic_bindings=fig_bindings())
    check_relaxed(solve_single_phase(spec, grid128), spec, grid128)


def test_current_harmonics_and_bindings():
    g = build_grid(64)
    spec = SinglePhaseSpec(N=64, dc_target=0.3, lam=2.0, current_zero_harmonics=[0, 2, 6],
                           voltage_harmonic_bindings={2: (0.05, -0.02), 4: 0})
    r = solve_single_phase(spec, g)
    check_relaxed(r, spec, g)
    X = np.fft.fft(r.x)
    assert max(abs(X[k]) for k in (0, 2, 6)) <= 1e-8
    V = np.fft.fft(np.sin(g.theta) * r.x)
    assert V[2].real == pytest.approx(0.05, abs=1e-8)
    assert -V[2].imag == pytest.approx(-0.02, abs=1e-8)


def test_harmonic_coupling_forces_infeasibility():
    # the supply multiplies x by sin, so V[k] = (X[k-1] - X[k+1]) / 2i: with X[3] = 0 and
    # V[2] = 0 we get X[1] = 0, and then the DC V[0] = (X[-1] - X[1]) / 2i vanishes too
    g = build_grid(64)
    spec = SinglePhaseSpec(N=64, dc_target=0.2, current_zero_harmonics=[3],
                           voltage_harmonic_bindings={2: 0})
    with pytest.raises(InfeasibleProblem):
        solve_single_phase(spec, g)
    zero = SinglePhaseSpec(N=64, dc_target=0.0, current_zero_harmonics=[3],
                           voltage_harmonic_bindings={2: 0})
    assert solve_single_phase(zero, g).objective == pytest.approx(0.0, abs=1e-12)


def test_current_zero_mean_extension():
    g = build_grid(48)
    spec = SinglePhaseSpec(N=48, dc_target=0.25, lam=1.0, current_zero_mean=True)
    r = solve_single_phase(spec, g)
    assert abs(r.x.sum()) <= 1e-8


def test_custom_template():
    g = build_grid(48)
    distorted = template_from_samples("s1", 0.9 * np.sin(g.theta) + 0.1 * np.sin(3 * g.theta))
    spec = SinglePhaseSpec(N=48, dc_target=0.2, lam=10.0, voltage_harmonic_bindings={2: 0})
    r = solve_single_phase(spec, g, distorted)
    check_relaxed(r, spec, g, distorted)


def test_monotone_in_constraints(grid128):
    a = SinglePhaseSpec(N=128, dc_target=0.2, lam=10.0)
    b = SinglePhaseSpec(N=128, dc_target=0.2, lam=10.0, voltage_harmonic_bindings=fig_bindings())
    c = SinglePhaseSpec(N=128, dc_target=0.2, lam=10.0, voltage_harmonic_bindings=fig_bindings(),
                        current_zero_harmonics=[8, 10])
    oa, ob, oc = (solve_single_phase(s, grid128).objective for s in (a, b, c))
    assert oa <= ob + 1e-7 <= oc + 2e-7


@settings(max_examples=20, deadline=None)
@given(N=st.integers(8, 40), dc=st.floats(-0.6, 0.6), lam=st.floats(0, 20),
       free_wheel=st.booleans(), bind=st.sets(st.integers(2, 3), max_size=2))
def test_random_specs_match_highs(N, dc, lam, free_wheel, bind):
    g = build_grid(N)
    spec = SinglePhaseSpec(N=N, free_wheel=free_wheel, dc_target=dc, lam=lam,
                           voltage_harmonic_bindings={k: 0 for k in bind})
    lp = build_single_phase_lp(spec, g)
    ref = linprog(lp.cost, A_eq=lp.eq_matrix, b_eq=lp.eq_rhs, bounds=(0, None), method="highs")
    sol = solve_lp(lp)
    if ref.status == 2:
        assert sol.status is LpStatus.INFEASIBLE
        return
    assert sol.optimal
    assert sol.objective == pytest.approx(ref.fun, abs=1e-7)
    check_relaxed(solve_single_phase(spec, g), spec, g)
