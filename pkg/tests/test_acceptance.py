"""Exit criteria for the simulator; each test logs one PASS/FAIL line."""

import math

import numpy as np

from oracles import (
    ar1_stationary_rms,
    fock_bsm_effect,
    locking_range_by_bisection,
    overlap_by_quadrature,
)
from swapsim.chsh import ChshSettings, CorrelationEstimate, chsh_analytic, chsh_estimate, run_chsh_batch
from swapsim.laser_sync import KerrCoupling, PulseShape, cross_correlate, locking_range, steady_state_jitter
from swapsim.polarization import BELL_ORDER, BellState, bell_decompose_14_23, bell_state, singlet, werner
from swapsim.swapping import (
    BsmSpec,
    SourceSpec,
    bsm_coincidence_effect,
    coincidence_curve,
    fit_sinusoid,
    fit_visibility,
    swap,
)
from swapsim.wavepacket import FilterSpec, coherence_time, timing_overlap

PAPER = ChshSettings(-22.5, -67.5, 0.0, 45.0)


def test_ac01_bell_rearrangement(acceptance):
    ket = np.kron(bell_state(BellState.PSI_MINUS), bell_state(BellState.PSI_MINUS))
    coeffs = bell_decompose_14_23(ket)
    matched = {(b, b) for b in BELL_ORDER}
    on = max(abs(abs(coeffs[k]) - 0.5) for k in matched)
    off = max(abs(c) for k, c in coeffs.items() if k not in matched)
    acceptance.check("AC1 Bell x Bell rearrangement", on < 1e-12 and off < 1e-12,
                     f"max | |c|-1/2 | = {on:.1e}, max off-pair |c| = {off:.1e}")


def test_ac02_bsm_oracle(acceptance):
    worst = 0.0
    for overlap in (0.0, 0.25, 0.5, 0.75, 1.0):
        eff, oracle = bsm_coincidence_effect(overlap), fock_bsm_effect(overlap)
        for b in BELL_ORDER:
            psi = bell_state(b)
            worst = max(worst, abs(np.vdot(psi, (eff - oracle) @ psi)))
        worst = max(worst, np.max(np.abs(eff - oracle)))
    acceptance.check("AC2 BSM effect vs Fock oracle", worst < 1e-9, f"max dev = {worst:.1e}")


def test_ac03_swap_closed_forms(acceptance):
    worst = 0.0
    for overlap in np.linspace(0, 1, 11):
        out = swap(SourceSpec(1, 1), BsmSpec(overlap))
        worst = max(worst,
                    abs(out.coincidence_prob - (2 - overlap) / 4),
                    abs(out.visibility_45 - overlap / (2 - overlap)),
                    abs(out.singlet_fidelity - (1 + overlap) / (2 * (2 - overlap))))
    vis = swap(SourceSpec(1, 1), BsmSpec(0.9011)).visibility_45
    acceptance.check("AC3 swapping closed forms", worst < 1e-10 and abs(vis - 0.820) <= 1e-3,
                     f"max dev = {worst:.1e}, visibility(I=0.9011) = {vis:.4f}")


def test_ac04_chsh_analytic(acceptance):
    s_singlet = chsh_analytic(singlet(), PAPER)
    s_w = chsh_analytic(werner(0.82), PAPER)
    ok = (abs(s_singlet - 2 * math.sqrt(2)) < 1e-9
          and abs(s_w - 0.82 * 2 * math.sqrt(2)) < 1e-9
          and abs(s_w - 2.3194) < 1e-4
          and abs(s_w - 2.308) < 0.095)
    acceptance.check("AC4 CHSH analytic", ok, f"S(singlet) = {s_singlet:.10f}, S(W0.82) = {s_w:.10f}")


def test_ac05_chsh_published_values(acceptance):
    ests = [CorrelationEstimate(e, s) for e, s in
            [(-0.570, 0.049), (0.583, 0.046), (0.600, 0.049), (0.554, 0.046)]]
    r = chsh_estimate(*ests)
    ok = (abs(r.s_value - 2.307) <= 1e-3 and abs(r.s_sigma - 0.095) <= 1e-3
          and abs(r.sigma_violation - 3.2) <= 0.1)
    acceptance.check("AC5 CHSH from published E values", ok,
                     f"S = {r.s_value:.4f} +/- {r.s_sigma:.4f}, {r.sigma_violation:.2f} sigma")


def test_ac06_monte_carlo_calibration(acceptance):
    res = run_chsh_batch(werner(0.82), PAPER, 300, range(1000), workers=4)
    s = np.array([r.s_value for r in res])
    ds = np.array([r.s_sigma for r in res])
    spread = s.std(ddof=1)
    ok = (2.29 <= s.mean() <= 2.35 and 0.085 <= ds.mean() <= 0.105
          and abs(spread - ds.mean()) <= 0.15 * ds.mean())
    acceptance.check("AC6 Monte-Carlo calibration", ok,
                     f"mean S = {s.mean():.4f}, mean dS = {ds.mean():.4f}, sd(S) = {spread:.4f}")


def test_ac07_cross_correlation(acceptance):
    g60, g70 = PulseShape("gaussian", 60.0), PulseShape("gaussian", 70.0)
    w0 = cross_correlate(g60, g70, 0.0).fwhm_fs
    w2 = cross_correlate(g60, g70, 2.0).fwhm_fs
    ok = abs(w0 - 92.2) <= 0.5 and abs(w2 - w0) < 0.3
    acceptance.check("AC7 cross-correlation width", ok,
                     f"FWHM = {w0:.3f} fs, with 2 fs jitter {w2:.3f} fs (+{w2 - w0:.3f})")


def test_ac08_coherence_hierarchy(acceptance):
    tau = coherence_time(FilterSpec(788.0, 2.8))
    overlap = timing_overlap(tau, tau, 2.0)
    quad = overlap_by_quadrature(tau, tau, 2.0)
    ok = abs(tau - 326) <= 7 and overlap > 0.999 and abs(overlap - quad) < 1e-9
    acceptance.check("AC8 coherence-time hierarchy", ok,
                     f"tau_c = {tau:.2f} fs, I_timing(2 fs) = {overlap:.6f}")


def test_ac09_sync_dynamics(acceptance):
    pairs = [(1.0, 1.0), (1.0, 2.0), (2.0, 3.0), (0.5, 0.4), (3.0, 10.0)]
    lock_dev = max(abs(locking_range(KerrCoupling(k, w)) / locking_range_by_bisection(k, w) - 1)
                   for k, w in pairs)
    jitter_dev = 0.0
    w = 100.0
    for g in (0.1, 0.5, 1.0):
        sim = steady_state_jitter(KerrCoupling(g * w, w), 1.0, 10**6, seed=2024)
        jitter_dev = max(jitter_dev, abs(sim / ar1_stationary_rms(g, 1.0) - 1))
    ok = lock_dev < 1e-3 and jitter_dev < 0.10
    acceptance.check("AC9 synchronization dynamics", ok,
                     f"locking-range rel dev = {lock_dev:.1e}, jitter rel dev = {jitter_dev:.3f}")


def test_ac10_werner_composition(acceptance):
    out = swap(SourceSpec(0.9, 0.9), BsmSpec(1.0))
    dev = np.max(np.abs(out.rho_14 - werner(0.81)))
    acceptance.check("AC10 Werner composition", dev < 1e-10, f"max |rho_14 - W(0.81)| = {dev:.1e}")


def test_ac11_fig3_shape(acceptance):
    grid = np.arange(0.0, 180.1, 5.0)
    par, perp = coincidence_curve(werner(0.82), 45.0, grid)
    shift = (fit_sinusoid(grid, perp).phase_deg - fit_sinusoid(grid, par).phase_deg) % 180.0
    vis = fit_visibility(grid, par, perp).visibility
    ok = abs(shift - 90.0) <= 0.1 and abs(vis - 0.820) <= 1e-6
    acceptance.check("AC11 coincidence-curve shape", ok,
                     f"phase shift = {shift:.4f} deg, joint-fit visibility = {vis:.8f}")
