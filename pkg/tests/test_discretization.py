import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rectiplan.discretization import (WITH_FREE_WHEEL, WITHOUT_FREE_WHEEL, LevelVector, build_fourier_row,
                                      build_grid, build_sine_template, line_templates, load_templates_csv,
                                      template_from_samples)
from rectiplan.errors import AliasedHarmonic, BadCsv, BadN, LengthMismatch


def test_grid_examples():
    g = build_grid(4)
    np.testing.assert_allclose(g.theta, [0, np.pi / 2, np.pi, 3 * np.pi / 2])
    assert build_grid(8).theta[3] == pytest.approx(3 * np.pi / 4)
    assert g.theta[0] == 0.0 and np.all(np.diff(build_grid(97).theta) > 0)


@pytest.mark.parametrize("N", [3, 0, -1])
def test_small_grid_rejected(N):
    with pytest.raises(BadN):
        build_grid(N)


def test_sine_template_examples():
    t = build_sine_template(build_grid(4))
    np.testing.assert_allclose(t.samples, [0, 1, 0, -1], atol=1e-15)
    t12 = build_sine_template(build_grid(12), 0.0, 2 * np.pi / 3)
    assert t12.samples[0] == pytest.approx(-math.sqrt(3) / 2, abs=1e-12)
    assert np.array_equal(t12.samples_sq, t12.samples ** 2)


@pytest.mark.parametrize("N", [12, 24, 96, 192])
def test_line_template_peak_is_sqrt3(N):
    # direct evaluation of the line-voltage formula at every grid point
    peak = max(abs(math.sin(2 * math.pi * n / N) - math.sin(2 * math.pi / 3 + 2 * math.pi * n / N))
               for n in range(N))
    t = build_sine_template(build_grid(N), 0.0, 2 * np.pi / 3)
    assert np.abs(t.samples).max() == pytest.approx(peak, abs=1e-15)
    assert peak == pytest.approx(math.sqrt(3), abs=1e-9)


@pytest.mark.parametrize("N", [12, 30, 64, 193])
def test_line_templates_sum_to_zero(N):
    s12, s23, s31 = line_templates(build_grid(N))
    assert np.abs(s12.samples + s23.samples + s31.samples).max() <= 1e-12


def test_fourier_row_examples():
    g = build_grid(4)
    f0 = build_fourier_row(g, 0)
    assert np.all(f0.cos_row == 1.0) and np.all(f0.sin_row == 0.0)
    f1 = build_fourier_row(g, 1)
    np.testing.assert_allclose(f1.cos_row, [1, 0, -1, 0], atol=1e-15)
    np.testing.assert_allclose(f1.sin_row, [0, 1, 0, -1], atol=1e-15)
    with pytest.raises(AliasedHarmonic):
        build_fourier_row(build_grid(8), 4)
    with pytest.raises(AliasedHarmonic):
        build_fourier_row(build_grid(8), -1)


@pytest.mark.parametrize("N", [16, 45, 128])
def test_fourier_rows_orthogonal(N):
    g = build_grid(N)
    rows = [build_fourier_row(g, k) for k in range((N - 1) // 2 + 1)]
    for a in rows:
        for b in rows:
            assert abs(a.cos_row @ b.sin_row) <= 1e-9 * N
            if a.k != b.k:
                assert abs(a.cos_row @ b.cos_row) <= 1e-9 * N


@settings(max_examples=30, deadline=None)
@given(N=st.integers(5, 80).filter(lambda n: n % 2 == 1), seed=st.integers(0, 2**31))
def test_parseval_on_grid(N, seed):
    v = np.random.default_rng(seed).normal(size=N)
    g = build_grid(N)
    energy = 0.0
    for k in range((N - 1) // 2 + 1):
        f = build_fourier_row(g, k)
        scale = 1.0 / N if k == 0 else 2.0 / N
        a, b = scale * (f.cos_row @ v), scale * (f.sin_row @ v)
        energy += a * a if k == 0 else 0.5 * (a * a + b * b)
    assert energy == pytest.approx(np.mean(v * v), rel=1e-9)


def test_level_vectors():
    assert WITH_FREE_WHEEL.S == (-1, 0, 1) and WITH_FREE_WHEEL.S_p == (1, 0, 1)
    assert WITHOUT_FREE_WHEEL.S == (-1, 1) and WITHOUT_FREE_WHEEL.S_p == (1, 1)
    with pytest.raises(ValueError):
        LevelVector((1, 0))


def test_template_csv(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("v\n" + "\n".join(str(0.5 * n) for n in range(6)) + "\n")
    (t,) = load_templates_csv(p, 6, 1)
    np.testing.assert_allclose(t.samples, 0.5 * np.arange(6))
    with pytest.raises(BadCsv):
        load_templates_csv(p, 7, 1)
    p3 = tmp_path / "t3.csv"
    p3.write_text("\n".join("1,2,-3" for _ in range(4)))
    ts = load_templates_csv(p3, 4, 3)
    assert [t.label for t in ts] == ["s12", "s23", "s31"]
    with pytest.raises(BadCsv):
        load_templates_csv(p3, 4, 1)
    with pytest.raises(LengthMismatch):
        template_from_samples("x", [1.0, 2.0], 3)
