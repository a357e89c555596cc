import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from feynclock.numerics import (
    SymTridiag,
    cos_cubic_integral_closed_form,
    expm_taylor,
    first_zero_tail_bound,
    fit_affine,
    fit_power_law,
    is_unitary,
    matrix_exponential,
    oscillatory_integral_cos_cubic,
    tridiag_eigenvalues,
    tridiag_eigenvalues_batch,
    unitarity_residual,
)

from conftest import random_hermitian


class TestMatrixExponential:
    def test_zero_generator_gives_identity(self):
        for n in (1, 3, 6):
            assert np.allclose(matrix_exponential(np.zeros((n, n)), 3.7), np.eye(n), atol=0)

    def test_three_site_clock_at_full_transfer(self):
        h = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float)
        t = math.pi / math.sqrt(2)
        g = matrix_exponential(h, t)
        assert g[2, 0] == pytest.approx((math.cos(math.sqrt(2) * t) - 1) / 2, abs=1e-12)
        assert g[2, 0] == pytest.approx(-1.0, abs=1e-12)

    def test_matches_independent_exponentials(self, rng):
        h = random_hermitian(rng, 8)
        g = matrix_exponential(h, 0.7)
        assert np.max(np.abs(g - scipy.linalg.expm(-0.7j * h))) <= 1e-10
        assert np.max(np.abs(g - expm_taylor(-0.7j * h))) <= 1e-10

    def test_unitary_and_group_property(self, rng):
        for _ in range(10):
            h = random_hermitian(rng, 8)
            t1, t2 = rng.uniform(-3, 3, 2)
            g1, g2 = matrix_exponential(h, t1), matrix_exponential(h, t2)
            assert unitarity_residual(g1) <= 1e-10
            assert np.max(np.abs(g1 @ g2 - matrix_exponential(h, t1 + t2))) <= 1e-9

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError, match="square"):
            matrix_exponential(np.zeros((2, 3)), 1.0)
        with pytest.raises(ValueError, match="Hermitian"):
            matrix_exponential(np.array([[0, 1], [0, 0]]), 1.0)
        with pytest.raises(ValueError, match="2-D"):
            matrix_exponential(np.zeros(3), 1.0)

    def test_is_unitary(self):
        assert is_unitary(np.array([[0, 1], [1, 0]]))
        assert not is_unitary(np.array([[1, 1], [0, 1]]))
        assert not is_unitary(np.zeros((2, 3)))


class TestTridiagonal:
    def test_three_site_spectrum(self):
        vals = tridiag_eigenvalues(SymTridiag([0, 0, 0], [1, 1]), 3)
        assert vals == pytest.approx([-math.sqrt(2), 0.0, math.sqrt(2)], abs=1e-14)

    def test_single_entry(self):
        assert tridiag_eigenvalues(SymTridiag([5.0], []), 1).tolist() == [5.0]

    def test_zero_requested(self):
        assert tridiag_eigenvalues(SymTridiag([1.0, 2.0], [0.5]), 0).size == 0

    def test_rejects_empty_and_mismatch(self):
        with pytest.raises(ValueError):
            SymTridiag([], [])
        with pytest.raises(ValueError):
            SymTridiag([1, 2, 3], [1])
        with pytest.raises(ValueError):
            tridiag_eigenvalues(SymTridiag([1.0], []), 2)

    def test_adiabatic_clock_at_s1(self):
        k = 4
        d = np.ones(k + 1)
        d[0] = d[-1] = 0.5
        m = SymTridiag(d, -0.5 * np.ones(k))
        ref = np.linalg.eigvalsh(m.to_dense())[:2]
        assert np.max(np.abs(tridiag_eigenvalues(m, 2) - ref)) <= 1e-12

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 50), st.integers(0, 2**32 - 1))
    def test_agrees_with_dense_solver(self, n, seed):
        r = np.random.default_rng(seed)
        m = SymTridiag(r.normal(size=n) * 3, r.normal(size=n - 1))
        ref = np.linalg.eigvalsh(m.to_dense())
        got = tridiag_eigenvalues(m, n)
        assert np.all(np.abs(got - ref) <= 1e-12 * np.maximum(1.0, np.abs(ref)))
        assert np.all(np.diff(got) >= 0)

    def test_batch_matches_single(self, rng):
        d = rng.normal(size=(6, 30))
        e = rng.normal(size=(6, 29))
        batch = tridiag_eigenvalues_batch(d, e, 3)
        for i in range(6):
            single = tridiag_eigenvalues(SymTridiag(d[i], e[i]), 3)
            assert np.max(np.abs(batch[i] - single)) <= 1e-12

    def test_deterministic(self, rng):
        m = SymTridiag(rng.normal(size=40), rng.normal(size=39))
        assert tridiag_eigenvalues(m, 5).tobytes() == tridiag_eigenvalues(m, 5).tobytes()


class TestCosCubicIntegral:
    def test_closed_form_value(self):
        # Gamma(4/3) 6^(1/3) cos(pi/6)
        ref = math.gamma(4 / 3) * 6 ** (1 / 3) * math.sqrt(3) / 2
        assert cos_cubic_integral_closed_form() == pytest.approx(ref, rel=1e-15)
        assert abs(oscillatory_integral_cos_cubic() - ref) <= 1e-6
        assert ref == pytest.approx(1.40526, abs=1e-5)

    def test_first_zero_truncation_is_bounded(self):
        full = oscillatory_integral_cos_cubic()
        trunc = oscillatory_integral_cos_cubic("first_zero")
        bound = first_zero_tail_bound()
        assert 0.1 < abs(full - trunc) <= bound

    def test_halved_step_self_consistent(self):
        a = oscillatory_integral_cos_cubic(panels=4)
        b = oscillatory_integral_cos_cubic(panels=8)
        assert abs(a - b) <= 1e-7

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            oscillatory_integral_cos_cubic("nope")


def normal_equations(x, y):
    """Slope and intercept from the 2x2 normal equations, solved by Cramer's rule."""
    n = len(x)
    sx, sy = sum(x), sum(y)
    sxx = sum(v * v for v in x)
    sxy = sum(a * b for a, b in zip(x, y))
    det = n * sxx - sx * sx
    return (n * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det


class TestFits:
    def test_exact_linear_power(self):
        xs = np.array([1.0, 2.0, 5.0, 11.0])
        f = fit_power_law(xs, 3 * xs)
        assert f.exponent == pytest.approx(1.0, abs=1e-12)
        assert f.coefficient == pytest.approx(3.0, rel=1e-12)
        assert f.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_synthetic_inverse_two_thirds(self):
        xs = np.geomspace(1e2, 1e4, 15)
        f = fit_power_law(xs, 6.76 * xs ** (-2 / 3))
        assert f.exponent == pytest.approx(-2 / 3, abs=1e-9)
        assert f.coefficient == pytest.approx(6.76, abs=1e-6)

    def test_noisy_matches_normal_equations(self, rng):
        xs = np.linspace(1, 50, 30)
        ys = 0.5 * xs + 2.37 + rng.normal(scale=0.3, size=xs.size)
        slope, icpt = normal_equations(xs.tolist(), ys.tolist())
        f = fit_affine(xs, ys)
        assert f.coefficient == pytest.approx(slope, abs=1e-10)
        assert f.intercept == pytest.approx(icpt, abs=1e-10)
        assert 0 <= f.r_squared <= 1

        zs = 2.0 * xs ** 0.4 * np.exp(rng.normal(scale=0.05, size=xs.size))
        slope, icpt = normal_equations(np.log(xs).tolist(), np.log(zs).tolist())
        g = fit_power_law(xs, zs)
        assert g.exponent == pytest.approx(slope, abs=1e-10)
        assert g.intercept == pytest.approx(icpt, abs=1e-10)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(1e-3, 1e3), st.integers(0, 2**32 - 1))
    def test_exponent_invariant_under_rescaling(self, c, seed):
        r = np.random.default_rng(seed)
        xs = np.sort(r.uniform(1, 100, 8))
        ys = r.uniform(0.1, 10, 8)
        a, b = fit_power_law(xs, ys), fit_power_law(xs, c * ys)
        assert abs(a.exponent - b.exponent) <= 1e-12
        assert b.coefficient == pytest.approx(c * a.coefficient, rel=1e-10)
        assert 0 <= a.r_squared <= 1

    def test_rejections(self):
        with pytest.raises(ValueError, match="3 points"):
            fit_affine([1, 2], [1, 2])
        with pytest.raises(ValueError, match="positive"):
            fit_power_law([1, 2, 3], [1, 0, 2])
        with pytest.raises(ValueError, match="positive"):
            fit_power_law([-1, 2, 3], [1, 1, 2])
        with pytest.raises(ValueError):
            fit_affine([1, 2, 3], [1, 2])
