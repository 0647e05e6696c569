import math

import numpy as np
import pytest

from oracles import ar1_stationary_rms, locking_range_by_bisection, sech2_autocorrelation_ratio
from swapsim.laser_sync import (
    CavityPair,
    KerrCoupling,
    NotLockedError,
    PulseShape,
    SyncState,
    cross_correlate,
    infer_jitter_bound,
    linearized_jitter,
    locked_offset,
    locking_range,
    pull_function,
    simulate,
    steady_state_jitter,
    step,
)

G60 = PulseShape("gaussian", 60.0)
G70 = PulseShape("gaussian", 70.0)


class TestPull:
    def test_zero(self):
        assert pull_function(0.0, KerrCoupling(3.0, 10.0)) == 0.0

    def test_argmax_by_scan(self):
        k = KerrCoupling(1.0, 7.0)
        grid = np.linspace(0, 50, 500001)
        vals = np.array([pull_function(x, k) for x in grid[::10]])
        i = int(np.argmax(vals))
        assert grid[::10][i] == pytest.approx(7.0, abs=2e-3)
        assert vals[i] == pytest.approx(0.6065, abs=1e-4)

    def test_odd(self):
        k = KerrCoupling(2.0, 5.0)
        for x in np.linspace(0.1, 30, 37):
            assert pull_function(-x, k) == -pull_function(x, k)


class TestStep:
    def test_fixed_point(self):
        s = step(SyncState(0.0), CavityPair(), KerrCoupling(1.0, 2.0))
        assert s.dt_fs == 0.0 and s.round_index == 1

    def test_contracts(self):
        k = KerrCoupling(5.0, 10.0)
        s = step(SyncState(1.0), CavityPair(), k)
        assert abs(s.dt_fs) < 1.0

    def test_loss_of_lock(self):
        k = KerrCoupling(1.0, 2.0)
        trace = simulate(CavityPair(detuning_fs=1.1 * locking_range(k)), k, 0.0, 20000)
        assert abs(trace[-1]) > 100 * k.width_fs
        assert np.all(np.diff(trace[-1000:]) > 0)

    def test_noise_requires_rng(self):
        with pytest.raises(ValueError):
            step(SyncState(0.0), CavityPair(), KerrCoupling(1.0, 2.0), noise_rms=1.0)

    def test_step_and_simulate_agree(self):
        k = KerrCoupling(1.5, 4.0)
        cav = CavityPair(detuning_fs=0.3)
        s = SyncState(2.0)
        for _ in range(50):
            s = step(s, cav, k)
        assert simulate(cav, k, 0.0, 50, dt0_fs=2.0)[-1] == pytest.approx(s.dt_fs, abs=1e-13)

    def test_attracting_from_random_starts(self):
        rng = np.random.default_rng(0)
        for g in (0.1, 0.7, 1.5, 1.9):
            k = KerrCoupling(g * 10.0, 10.0)
            for x0 in rng.uniform(-10.0, 10.0, 25):
                assert abs(simulate(CavityPair(), k, 0.0, 3000, dt0_fs=x0)[-1]) < 1e-6


class TestLockingRange:
    def test_values(self):
        assert locking_range(KerrCoupling(1.0, 3.0)) == pytest.approx(0.6065, abs=1e-4)
        assert locking_range(KerrCoupling(0.0, 3.0)) == 0.0
        assert locking_range(KerrCoupling(2.0, 3.0)) == 2 * locking_range(KerrCoupling(1.0, 3.0))

    @pytest.mark.parametrize("kappa,w", [(1.0, 1.0), (1.0, 5.0)])
    def test_bisection(self, kappa, w):
        bf = locking_range_by_bisection(kappa, w)
        assert locking_range(KerrCoupling(kappa, w)) == pytest.approx(bf, rel=1e-3)

    def test_locked_offset_branch(self):
        k = KerrCoupling(2.0, 4.0)
        x = locked_offset(CavityPair(detuning_fs=0.5), k)
        assert pull_function(x, k) == pytest.approx(0.5, abs=1e-12)
        assert 0 < x < k.width_fs
        x = locked_offset(CavityPair(detuning_fs=-0.5), k)
        assert x < 0

    def test_not_locked(self):
        with pytest.raises(NotLockedError):
            locked_offset(CavityPair(detuning_fs=2.0), KerrCoupling(1.0, 2.0))
        with pytest.raises(NotLockedError):
            locked_offset(CavityPair(), KerrCoupling(25.0, 10.0))  # restoring slope 2.5
        with pytest.raises(NotLockedError):
            steady_state_jitter(KerrCoupling(1.0, 2.0), 0.1, 1000, seed=1,
                                cavities=CavityPair(detuning_fs=1.0))


class TestJitter:
    def test_noiseless(self):
        assert steady_state_jitter(KerrCoupling(5.0, 10.0), 0.0, 1000, seed=1) == 0.0

    @pytest.mark.parametrize("g", [0.5, 1.0])
    def test_ar1(self, g):
        w = 100.0
        sim = steady_state_jitter(KerrCoupling(g * w, w), 1.0, 200_000, seed=3)
        assert sim == pytest.approx(ar1_stationary_rms(g, 1.0), rel=0.05)
        assert linearized_jitter(g, 1.0) == pytest.approx(ar1_stationary_rms(g, 1.0), rel=1e-15)

    def test_g_half_value(self):
        assert linearized_jitter(0.5, 1.0) == pytest.approx(1.155, abs=1e-3)

    def test_sub_2fs_regime(self):
        assert steady_state_jitter(KerrCoupling(25.0, 50.0), 1.0, 100_000, seed=9) < 2.0

    def test_deterministic(self):
        k = KerrCoupling(25.0, 50.0)
        a = simulate(CavityPair(), k, 1.0, 1000, seed=4)
        b = simulate(CavityPair(), k, 1.0, 1000, seed=4)
        np.testing.assert_array_equal(a, b)


class TestCrossCorrelation:
    def test_gaussian_60_70(self):
        xc = cross_correlate(G60, G70)
        assert xc.fwhm_fs == pytest.approx(math.hypot(60, 70), abs=0.05)
        assert xc.signal.max() == 1.0
        assert np.diff(xc.delays_fs) == pytest.approx(0.1)

    def test_gaussian_60_60(self):
        assert cross_correlate(G60, G60).fwhm_fs == pytest.approx(84.85, abs=0.05)

    def test_jitter_broadening(self):
        base = cross_correlate(G60, G70).fwhm_fs
        jit = cross_correlate(G60, G70, 2.0).fwhm_fs
        assert jit == pytest.approx(92.3, abs=0.05)
        assert 0 < jit - base < 0.3

    @pytest.mark.parametrize("a", [30.0, 60.0, 120.0])
    @pytest.mark.parametrize("b", [45.0, 70.0])
    @pytest.mark.parametrize("sj", [0.0, 5.0, 20.0])
    def test_quadrature_rule(self, a, b, sj):
        expected = math.sqrt(a**2 + b**2 + (2.3548200450309493 * sj) ** 2)
        got = cross_correlate(PulseShape("gaussian", a), PulseShape("gaussian", b), sj).fwhm_fs
        assert got == pytest.approx(expected, rel=0.005)

    def test_sech2_autocorrelation(self):
        oracle = sech2_autocorrelation_ratio()
        assert oracle == pytest.approx(1.543, rel=1e-3)
        p = PulseShape("sech2", 65.0)
        assert cross_correlate(p, p).fwhm_fs / 65.0 == pytest.approx(oracle, rel=0.01)

    def test_pulse_validation(self):
        with pytest.raises(ValueError):
            PulseShape("lorentzian", 60.0)
        with pytest.raises(ValueError):
            PulseShape("gaussian", 0.0)


class TestInferJitter:
    def test_two_fs(self):
        bound = infer_jitter_bound(92.3, G60, G70)
        assert not bound.below_resolution
        assert bound.sigma_fs == pytest.approx(2.0, abs=0.15)

    def test_transform_pair(self):
        # 92.2 is the 0.1 fs rounding of the pulse-only width 92.195 fs.
        assert infer_jitter_bound(92.2, G60, G70).sigma_fs < 0.5
        exact = cross_correlate(G60, G70).fwhm_fs
        assert infer_jitter_bound(exact, G60, G70).sigma_fs == 0.0

    def test_below_resolution(self):
        bound = infer_jitter_bound(90.0, G60, G70)
        assert bound.below_resolution
        assert bound.sigma_fs == 0.0
        assert bound.resolution_fs == pytest.approx(92.2, abs=0.05)

    def test_invalid(self):
        with pytest.raises(ValueError):
            infer_jitter_bound(-1.0, G60, G70)
