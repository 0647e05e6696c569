"""Temporal modes of the filtered down-converted photons.

All single-photon wavepackets are Gaussian. Widths are intensity FWHM in
femtoseconds, wavelengths in nanometres.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s
# Time-bandwidth product of a transform-limited Gaussian (intensity FWHM), 2 ln2 / pi.
GAUSSIAN_TBP = 2.0 * math.log(2.0) / math.pi


@dataclass(frozen=True)
class FilterSpec:
    center_wavelength_nm: float
    fwhm_bandwidth_nm: float

    def __post_init__(self):
        if not self.center_wavelength_nm > 0:
            raise ValueError("center_wavelength_nm must be positive")
        if not self.fwhm_bandwidth_nm > 0:
            raise ValueError("fwhm_bandwidth_nm must be positive")
        if self.fwhm_bandwidth_nm / self.center_wavelength_nm >= 0.1:
            raise ValueError("fwhm_bandwidth_nm must be narrow (< 10% of the center wavelength)")

    @property
    def bandwidth_hz(self) -> float:
        lam = self.center_wavelength_nm * 1e-9
        return SPEED_OF_LIGHT * self.fwhm_bandwidth_nm * 1e-9 / lam**2


@dataclass(frozen=True)
class WavepacketParams:
    coherence_time_fs: float
    arrival_offset_fs: float = 0.0
    pump_fwhm_fs: float = 0.0

    def __post_init__(self):
        if not self.coherence_time_fs > 0:
            raise ValueError("coherence_time_fs must be positive")
        if self.pump_fwhm_fs < 0:
            raise ValueError("pump_fwhm_fs must be non-negative")


@dataclass(frozen=True)
class OverlapResult:
    overlap: float
    timing: float
    pump: float


def coherence_time(filt: FilterSpec) -> float:
    """Intensity-FWHM coherence time (fs) of a photon behind a Gaussian filter."""
    return GAUSSIAN_TBP / filt.bandwidth_hz * 1e15


def timing_overlap(tau_a: float, tau_b: float, delay: float) -> float:
    """Squared amplitude overlap of two Gaussian wavepackets displaced by ``delay``.

    Wavepackets have intensity FWHM ``tau_a`` and ``tau_b``; for equal widths
    this is ``exp(-4 ln2 delay^2 / (tau_a^2 + tau_b^2))``.
    """
    s2 = tau_a**2 + tau_b**2
    width_match = 2.0 * tau_a * tau_b / s2
    return width_match * math.exp(-4.0 * math.log(2.0) * delay**2 / s2)


def pump_overlap(pump_fwhm: float, mean_coherence_time: float) -> float:
    return (1.0 + 2.0 * (pump_fwhm / mean_coherence_time) ** 2) ** -0.5


def gaussian_overlap_model(p: WavepacketParams, q: WavepacketParams) -> OverlapResult:
    """Separable Gaussian model: timing overlap times pump-leakage factor."""
    delay = p.arrival_offset_fs - q.arrival_offset_fs
    timing = timing_overlap(p.coherence_time_fs, q.coherence_time_fs, delay)
    tau_mean = 0.5 * (p.coherence_time_fs + q.coherence_time_fs)
    pump = pump_overlap(max(p.pump_fwhm_fs, q.pump_fwhm_fs), tau_mean)
    return OverlapResult(overlap=timing * pump, timing=timing, pump=pump)


OverlapModel = Callable[[WavepacketParams, WavepacketParams], OverlapResult]


def mode_overlap(p: WavepacketParams, q: WavepacketParams,
                 model: OverlapModel = gaussian_overlap_model) -> OverlapResult:
    """Indistinguishability of photons 2 and 3 at the beam splitter.

    ``model`` can be swapped for a richer joint-spectral description; it must
    return an overlap in [0, 1].
    """
    res = model(p, q)
    if not 0.0 <= res.overlap <= 1.0 + 1e-12:
        raise ValueError(f"overlap model returned {res.overlap!r}, outside [0, 1]")
    return res


def sample_jitter(rms: float, seed=None, size: Optional[int] = None):
    """Zero-mean Gaussian timing offsets (fs); same seed gives the same draws."""
    if rms < 0:
        raise ValueError("rms must be non-negative")
    rng = np.random.default_rng(seed)
    if rms == 0:
        return 0.0 if size is None else np.zeros(size)
    draw = rng.normal(0.0, rms, size=size)
    return float(draw) if size is None else draw
