import math

import numpy as np
import pytest

from feynclock import adiabatic as ad
from feynclock.numerics import SymTridiag, tridiag_eigenvalues


def dense_adiabatic(k, s):
    m = np.zeros((k + 1, k + 1))
    for l in range(k + 1):
        m[l, l] = s / 2 if l == 0 else (1 - s / 2 if l == k else 1.0)
        if l < k:
            m[l, l + 1] = m[l + 1, l] = -s / 2
    return m


class TestBuild:
    def test_decoupled(self):
        m = ad.build_adiabatic_clock(5, 0.0)
        assert m.diag.tolist() == [0, 1, 1, 1, 1, 1]
        assert np.all(m.offdiag == 0)

    def test_k2_s1(self):
        assert ad.build_adiabatic_clock(2, 1.0).to_dense().tolist() == [[0.5, -0.5, 0], [-0.5, 1, -0.5], [0, -0.5, 0.5]]

    @pytest.mark.parametrize("s", [0.0, 0.13, 0.5, 0.97, 1.0])
    def test_k4_entrywise(self, s):
        assert np.array_equal(ad.build_adiabatic_clock(4, s).to_dense(), dense_adiabatic(4, s))

    @pytest.mark.parametrize("s", [-0.1, 1.01])
    def test_rejects_s(self, s):
        with pytest.raises(ValueError):
            ad.build_adiabatic_clock(3, s)


class TestGapScan:
    def test_k100(self):
        sc = ad.gap_scan(100)
        assert sc.gap_min * 100**2 >= math.pi**2 / 8
        assert 0.9 < sc.s_min <= 1.0
        # locate the minimum to 1e-4 against a fine dense-solver scan near it
        ss = np.linspace(sc.s_min - 2e-3, min(sc.s_min + 2e-3, 1.0), 801)
        ref = [np.diff(np.linalg.eigvalsh(dense_adiabatic(100, s))[:2])[0] for s in ss]
        assert abs(ss[int(np.argmin(ref))] - sc.s_min) <= 1e-4
        assert sc.gap_min == pytest.approx(min(ref), rel=1e-6)

    def test_k10_bound(self):
        assert ad.gap_scan(10).gap_min >= math.pi**2 / 800

    def test_gap_at_zero(self):
        sc = ad.gap_scan(30)
        assert sc.s_grid[0] == 0.0
        assert sc.gap[0] == pytest.approx(1.0, abs=1e-14)
        assert sc.gap_min <= sc.gap.min() and np.all(sc.gap >= 0)

    def test_ground_state_decoupled(self):
        vals = tridiag_eigenvalues(ad.build_adiabatic_clock(6, 0.0), 2)
        assert vals.tolist() == pytest.approx([0.0, 1.0], abs=1e-14)
        w, v = np.linalg.eigh(dense_adiabatic(6, 0.0))
        assert abs(v[0, 0]) == pytest.approx(1.0)

    def test_gaps_match_dense(self):
        for s in (0.2, 0.8, 0.99):
            ref = np.linalg.eigvalsh(dense_adiabatic(40, s))
            assert ad.gaps(40, [s])[0] == pytest.approx(ref[1] - ref[0], abs=1e-12)

    def test_continuity(self):
        sc = ad.gap_scan(200, grid_size=64)
        r = sc.gap[1:] / sc.gap[:-1]
        assert np.all((r < 10) & (r > 0.1))

    @pytest.mark.parametrize("k", [10, 25, 60, 150, 300])
    def test_lower_bound_law(self, k):
        assert ad.gap_scan(k).gap_min * k**2 >= math.pi**2 / 8 - 1e-8

    def test_grid_size_guard(self):
        with pytest.raises(ValueError):
            ad.gap_scan(10, grid_size=8)

    def test_csv(self):
        sc = ad.gap_scan(20, grid_size=16)
        lines = sc.to_csv().splitlines()
        assert lines[0] == "s,gap" and len(lines) == 17
        assert ad.summary_csv([sc]).splitlines()[0] == "k,s_min,gap_min"


class TestFit:
    def test_sweep_exponent(self):
        f = ad.fit_gap_scaling([50, 100, 200, 400, 800])
        assert f.fit.exponent == pytest.approx(-2, abs=0.05)
        assert f.runtime_exponent == pytest.approx(4, abs=0.1)
        assert f.runtime_exponent_cubic == pytest.approx(6, abs=0.15)
        # the fitted coefficient sits well above the pi^2/8 lower bound
        assert f.fit.coefficient / (math.pi**2 / 8) >= 1.0

    def test_synthetic_round_trip(self):
        ks = [50, 100, 200, 400, 800]
        scans = [ad.GapScan(k, np.empty(0), np.empty(0), 0.99, 1.2337 / k**2) for k in ks]
        f = ad.fit_gap_scaling_from_scans(scans)
        assert f.fit.exponent == pytest.approx(-2, abs=1e-9)
        assert f.fit.coefficient == pytest.approx(1.2337, abs=1e-6)

    def test_span_guards(self):
        with pytest.raises(ValueError, match="5"):
            ad.fit_gap_scaling([10, 20, 100, 200])
        with pytest.raises(ValueError, match="decade"):
            ad.fit_gap_scaling([10, 20, 30, 40, 50])
