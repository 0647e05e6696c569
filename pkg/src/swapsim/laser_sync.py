"""Passive synchronization of two Kerr-coupled mode-locked lasers.

The relative timing offset ``dt`` between the two pulse trains evolves by a
one-dimensional round-trip map::

    dt' = dt + detuning - pull(dt) + noise

where ``pull`` is the cross-phase-modulation restoring term (the leading
pulse is slowed, the trailing one sped up). The module also models the
sum-frequency cross-correlator used to bound the residual jitter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.signal import fftconvolve

FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))  # ~2.3548
SECH2_FWHM_FACTOR = 2.0 * math.log(1.0 + math.sqrt(2.0))  # FWHM / T for sech^2(t/T)
XCORR_STEP_FS = 0.1
XCORR_SPAN_WIDTHS = 5.0


class NotLockedError(RuntimeError):
    """The lasers do not settle to a stable common timing."""


@dataclass(frozen=True)
class CavityPair:
    repetition_rate_mhz: float = 81.0
    detuning_fs: float = 0.0

    def __post_init__(self):
        if not self.repetition_rate_mhz > 0:
            raise ValueError("repetition_rate_mhz must be positive")

    @property
    def round_trip_ns(self) -> float:
        return 1e3 / self.repetition_rate_mhz


@dataclass(frozen=True)
class KerrCoupling:
    strength_fs: float
    width_fs: float

    def __post_init__(self):
        if self.strength_fs < 0:
            raise ValueError("strength_fs must be non-negative")
        if not self.width_fs > 0:
            raise ValueError("width_fs must be positive")

    @property
    def gain(self) -> float:
        """Small-signal restoring fraction per round trip, kappa / w."""
        return self.strength_fs / self.width_fs


@dataclass(frozen=True)
class SyncState:
    dt_fs: float = 0.0
    round_index: int = 0


@dataclass(frozen=True)
class PulseShape:
    kind: str  # "gaussian" or "sech2"
    fwhm_fs: float

    def __post_init__(self):
        if self.kind not in ("gaussian", "sech2"):
            raise ValueError(f"pulse kind must be 'gaussian' or 'sech2', got {self.kind!r}")
        if not self.fwhm_fs > 0:
            raise ValueError("pulse fwhm_fs must be positive")

    def intensity(self, t: np.ndarray) -> np.ndarray:
        if self.kind == "gaussian":
            return np.exp(-4.0 * math.log(2.0) * (t / self.fwhm_fs) ** 2)
        x = t * (SECH2_FWHM_FACTOR / self.fwhm_fs)
        return 1.0 / np.cosh(x) ** 2


@dataclass(frozen=True)
class CrossCorrelation:
    delays_fs: np.ndarray
    signal: np.ndarray
    fwhm_fs: float


@dataclass(frozen=True)
class JitterBound:
    """Jitter deduced from a cross-correlation width.

    When ``below_resolution`` is set the measured trace is no wider than the
    pulses alone; ``sigma_fs`` is then 0 and ``resolution_fs`` is the pulse-only
    cross-correlation width.
    """
    sigma_fs: float
    below_resolution: bool
    resolution_fs: float


def pull_function(dt: float, k: KerrCoupling) -> float:
    w = k.width_fs
    return k.strength_fs * (dt / w) * math.exp(-dt * dt / (2.0 * w * w))


def pull_slope(dt: float, k: KerrCoupling) -> float:
    w = k.width_fs
    u2 = (dt / w) ** 2
    return k.gain * (1.0 - u2) * math.exp(-0.5 * u2)


def step(state: SyncState, cavities: CavityPair, k: KerrCoupling,
         noise_rms: float = 0.0, rng: np.random.Generator | None = None) -> SyncState:
    """Advance the timing offset by one cavity round trip."""
    dt = state.dt_fs + cavities.detuning_fs - pull_function(state.dt_fs, k)
    if noise_rms > 0:
        if rng is None:
            raise ValueError("an rng is required when noise_rms > 0")
        dt += rng.normal(0.0, noise_rms)
    return SyncState(dt, state.round_index + 1)


def simulate(cavities: CavityPair, k: KerrCoupling, noise_rms: float, n_rounds: int,
             seed=None, dt0_fs: float = 0.0) -> np.ndarray:
    """Iterate the round-trip map; returns ``n_rounds + 1`` offsets starting at ``dt0_fs``."""
    if n_rounds < 0:
        raise ValueError("n_rounds must be non-negative")
    if noise_rms > 0:
        noise = np.random.default_rng(seed).normal(0.0, noise_rms, size=n_rounds).tolist()
    else:
        noise = [0.0] * n_rounds
    trace = [0.0] * (n_rounds + 1)
    kappa, w, det = k.strength_fs, k.width_fs, cavities.detuning_fs
    inv2w2 = 1.0 / (2.0 * w * w)
    exp = math.exp
    dt = float(dt0_fs)
    trace[0] = dt
    for i in range(n_rounds):
        dt = dt + det - kappa * (dt / w) * exp(-dt * dt * inv2w2) + noise[i]
        trace[i + 1] = dt
    return np.asarray(trace)


def locking_range(k: KerrCoupling) -> float:
    """Largest |detuning| (fs per round trip) that still admits a fixed point."""
    return k.strength_fs * math.exp(-0.5)


def locked_offset(cavities: CavityPair, k: KerrCoupling) -> float:
    """Stable fixed point of the noiseless map.

    Raises:
        NotLockedError: detuning outside the locking range, or the fixed point
            is unstable (restoring slope not in (0, 2)).
    """
    det = cavities.detuning_fs
    if k.strength_fs <= 0:
        if det == 0:
            raise NotLockedError("no Kerr coupling: timing offset is neutrally stable, not locked")
        raise NotLockedError("no Kerr coupling with non-zero detuning")
    lr = locking_range(k)
    if abs(det) > lr:
        raise NotLockedError(f"detuning {det} fs exceeds locking range {lr:.6g} fs")
    if det == 0:
        x = 0.0
    elif abs(det) == lr:
        x = math.copysign(k.width_fs, det)
    else:
        x = brentq(lambda t: pull_function(t, k) - abs(det), 0.0, k.width_fs, xtol=1e-14)
        x = math.copysign(x, det)
    slope = pull_slope(x, k)
    if not 0.0 < slope < 2.0:
        raise NotLockedError(f"fixed point at {x:.6g} fs is unstable (restoring slope {slope:.4g})")
    return x


def steady_state_jitter(k: KerrCoupling, noise_rms: float, n_rounds: int, seed=None,
                        cavities: CavityPair | None = None, burn_in: int | None = None,
                        return_trace: bool = False):
    """RMS timing jitter (fs) about the mean offset after burn-in.

    The linearized expectation is ``noise_rms / sqrt(1 - (1 - g)^2)`` with
    ``g = kappa / w`` (see :func:`linearized_jitter`).

    Raises:
        NotLockedError: if the map has no stable fixed point, or the noisy
            trace wanders more than three overlap widths from it.
    """
    cavities = cavities or CavityPair()
    x0 = locked_offset(cavities, k)
    if burn_in is None:
        burn_in = min(n_rounds // 10, max(10, int(50.0 / k.gain)))
    trace = simulate(cavities, k, noise_rms, n_rounds, seed=seed, dt0_fs=x0)
    if np.max(np.abs(trace - x0)) > 3.0 * k.width_fs:
        raise NotLockedError("noise drove the timing offset out of the locking basin")
    settled = trace[burn_in + 1:]
    jitter = float(np.std(settled)) if settled.size else 0.0
    return (jitter, trace) if return_trace else jitter


def linearized_jitter(gain: float, noise_rms: float) -> float:
    """Stationary RMS of ``x' = (1 - g) x + noise``."""
    a = 1.0 - gain
    if abs(a) >= 1:
        raise NotLockedError(f"restoring gain {gain} gives no stationary jitter")
    return noise_rms / math.sqrt(1.0 - a * a)


def fwhm(x: np.ndarray, y: np.ndarray) -> float:
    """Full width at half maximum of a single-peaked curve, by linear interpolation."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    i = int(np.argmax(y))
    half = 0.5 * y[i]
    left = np.nonzero(y[:i] < half)[0]
    right = np.nonzero(y[i:] < half)[0]
    if left.size == 0 or right.size == 0:
        raise ValueError("curve does not fall below half maximum on both sides")
    l, r = left[-1], i + right[0]
    xl = x[l] + (half - y[l]) * (x[l + 1] - x[l]) / (y[l + 1] - y[l])
    xr = x[r - 1] + (half - y[r - 1]) * (x[r] - x[r - 1]) / (y[r] - y[r - 1])
    return float(xr - xl)


def cross_correlate(p1: PulseShape, p2: PulseShape, jitter_rms: float = 0.0,
                    step_fs: float = XCORR_STEP_FS) -> CrossCorrelation:
    """Jitter-averaged sum-frequency cross-correlation ``int I1(t) I2(t - tau) dt``.

    Evaluated on a ``step_fs`` delay grid spanning five combined widths on
    each side; the signal is normalized to unit peak.
    """
    if jitter_rms < 0:
        raise ValueError("jitter_rms must be non-negative")
    combined = math.sqrt(p1.fwhm_fs**2 + p2.fwhm_fs**2 + (FWHM_PER_SIGMA * jitter_rms) ** 2)
    half_n = int(math.ceil(XCORR_SPAN_WIDTHS * combined / step_fs))
    grid = np.arange(-half_n, half_n + 1) * step_fs
    # Both intensity profiles are even, so correlation equals convolution.
    signal = fftconvolve(p1.intensity(grid), p2.intensity(grid), mode="same")
    if jitter_rms > 0:
        kernel = np.exp(-0.5 * (grid / jitter_rms) ** 2)
        signal = fftconvolve(signal, kernel / kernel.sum(), mode="same")
    signal = np.clip(signal, 0.0, None)
    signal = signal / signal.max()
    return CrossCorrelation(delays_fs=grid, signal=signal, fwhm_fs=fwhm(grid, signal))


def infer_jitter_bound(measured_fwhm: float, p1: PulseShape, p2: PulseShape) -> JitterBound:
    """Deconvolve pulse durations from a measured cross-correlation width."""
    if not (measured_fwhm > 0 and math.isfinite(measured_fwhm)):
        raise ValueError("measured_fwhm must be positive and finite")
    resolution = cross_correlate(p1, p2, 0.0).fwhm_fs
    if measured_fwhm <= resolution:
        return JitterBound(sigma_fs=0.0, below_resolution=True, resolution_fs=resolution)
    sigma = math.sqrt(measured_fwhm**2 - resolution**2) / FWHM_PER_SIGMA
    return JitterBound(sigma_fs=sigma, below_resolution=False, resolution_fs=resolution)
