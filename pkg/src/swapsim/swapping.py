"""Entanglement swapping with a partially distinguishable Bell-state measurement.

Photons (1,2) come from the first source and (3,4) from the second. Photons
2 and 3 meet on a 50:50 beam splitter; a cross-port coincidence heralds the
swapped state of photons 1 and 4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .polarization import (
    BellState,
    bell_state,
    correlation_E,
    fidelity_to_pure,
    measure_project,
    partial_trace,
    polarizer_projector,
    singlet,
    tensor,
    werner,
)


@dataclass(frozen=True)
class SourceSpec:
    werner_v1: float = 1.0
    werner_v2: float = 1.0

    def __post_init__(self):
        for name in ("werner_v1", "werner_v2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")


@dataclass(frozen=True)
class BsmSpec:
    overlap: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.overlap <= 1.0:
            raise ValueError(f"overlap must lie in [0, 1], got {self.overlap!r}")


@dataclass(frozen=True)
class SwapOutcome:
    coincidence_prob: float
    rho_14: np.ndarray
    visibility_45: float
    singlet_fidelity: float

    def summary(self) -> dict:
        return {
            "coincidence_prob": self.coincidence_prob,
            "visibility_45": self.visibility_45,
            "singlet_fidelity": self.singlet_fidelity,
            "rho_14_real": np.real(self.rho_14).tolist(),
            "rho_14_imag": np.imag(self.rho_14).tolist(),
        }


class VisibilityFit(NamedTuple):
    visibility: float
    phase_deg: float
    offset: float


def four_photon_state(src: SourceSpec) -> np.ndarray:
    """Werner pair on photons (1,2) times Werner pair on photons (3,4)."""
    return tensor(werner(src.werner_v1), werner(src.werner_v2))


def bsm_coincidence_effect(b: BsmSpec | float) -> np.ndarray:
    """POVM element for a cross-port coincidence, acting on photons 2 and 3.

    Only the antisymmetric polarization part always exits in different ports;
    symmetric parts do so with probability ``(1 - I)/2``.
    """
    overlap = b.overlap if isinstance(b, BsmSpec) else BsmSpec(float(b)).overlap
    anti = singlet()
    sym = np.eye(4, dtype=complex) - anti
    return 0.5 * (1.0 - overlap) * sym + 0.5 * (1.0 + overlap) * anti


def swap(src: SourceSpec, b: BsmSpec) -> SwapOutcome:
    """Condition on a BSM coincidence and return the state of photons 1 and 4."""
    rho = four_photon_state(src)
    p, post = measure_project(rho, bsm_coincidence_effect(b), targets=(2, 3))
    rho_14 = partial_trace(post, keep=(1, 4))
    return SwapOutcome(
        coincidence_prob=p,
        rho_14=rho_14,
        visibility_45=-correlation_E(rho_14, 45.0, 45.0),
        singlet_fidelity=fidelity_to_pure(rho_14, bell_state(BellState.PSI_MINUS)),
    )


def coincidence_curve(rho_14: np.ndarray, photon1_angle_deg: float,
                      theta4_grid: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Heralded joint probabilities versus the photon-4 polarizer angle.

    Returns ``(p_parallel, p_perp)``: photon 1 transmitted (resp. reflected)
    at ``photon1_angle_deg`` and photon 4 transmitted at each grid angle.
    """
    grid = np.asarray(theta4_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("theta4_grid must be nonempty")
    p1t = polarizer_projector(photon1_angle_deg, "transmit")
    p1r = polarizer_projector(photon1_angle_deg, "reflect")
    par, perp = np.empty(grid.size), np.empty(grid.size)
    for i, th in enumerate(grid):
        p4 = polarizer_projector(th, "transmit")
        par[i] = np.real(np.trace(np.kron(p1t, p4) @ rho_14))
        perp[i] = np.real(np.trace(np.kron(p1r, p4) @ rho_14))
    return par, perp


def _check_grid(grid: np.ndarray):
    if grid.size < 6:
        raise ValueError("need at least 6 grid points to fit a visibility")
    if np.ptp(grid) < 180.0 - 1e-9:
        raise ValueError("theta4 grid must span at least 180 degrees")


def fit_sinusoid(theta_deg: Sequence[float], y: Sequence[float]) -> VisibilityFit:
    """Least-squares ``a + b cos 2(theta - phi)`` with ``b >= 0`` for a single curve."""
    th = np.radians(np.asarray(theta_deg, dtype=float))
    _check_grid(np.degrees(th))
    design = np.column_stack([np.ones_like(th), np.cos(2 * th), np.sin(2 * th)])
    (a, c, s), *_ = np.linalg.lstsq(design, np.asarray(y, dtype=float), rcond=None)
    if a <= 0:
        raise ValueError("degenerate fit: non-positive offset")
    return VisibilityFit(math.hypot(c, s) / a, math.degrees(0.5 * math.atan2(s, c)), float(a))


def fit_visibility(theta4_grid: Sequence[float], curve_parallel: Sequence[float],
                   curve_perp: Sequence[float]) -> VisibilityFit:
    """Joint fit of two complementary curves with a shared amplitude.

    Model: ``a + b cos 2(theta - phi)`` for the parallel curve and
    ``a - b cos 2(theta - phi)`` for the perpendicular one. Works on raw
    counts or probabilities; visibility is ``|b| / a``, ``phase_deg`` refers
    to the parallel curve's maximum.

    Raises:
        ValueError: too few points, grid spanning < 180 deg, or ``a <= 0``.
    """
    grid = np.asarray(theta4_grid, dtype=float)
    _check_grid(grid)
    y1 = np.asarray(curve_parallel, dtype=float)
    y2 = np.asarray(curve_perp, dtype=float)
    if y1.shape != grid.shape or y2.shape != grid.shape:
        raise ValueError("curves must match the grid length")
    th = np.radians(grid)
    cos2, sin2, one = np.cos(2 * th), np.sin(2 * th), np.ones_like(th)
    design = np.vstack([np.column_stack([one, cos2, sin2]),
                        np.column_stack([one, -cos2, -sin2])])
    (a, c, s), *_ = np.linalg.lstsq(design, np.concatenate([y1, y2]), rcond=None)
    if a <= 0:
        raise ValueError("degenerate fit: non-positive offset")
    return VisibilityFit(math.hypot(c, s) / a, math.degrees(0.5 * math.atan2(s, c)), float(a))
