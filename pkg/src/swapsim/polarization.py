"""Polarization-qubit state algebra for up to four photons.

Conventions used throughout the package:

* single-photon basis ``|H> = index 0``, ``|V> = index 1``;
* photon 1 is the most significant qubit of a multi-photon ket;
* photons are addressed by 1-based labels (1..4), matching the usual
  "photon 1 / photon 4" language of swapping experiments;
* angles at public boundaries are in degrees.

States are plain numpy arrays: a pure state is a complex vector of length
``2**n``, a density matrix is a ``(2**n, 2**n)`` complex array.
"""

from __future__ import annotations

import enum
import math
from typing import Iterable, Sequence

import numpy as np

MAX_QUBITS = 4
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10
NULL_PROBABILITY = 1e-15

_S = 1.0 / math.sqrt(2.0)


class NullOutcomeError(ValueError):
    """Raised when a measurement outcome has (numerically) zero probability."""


class BellState(enum.Enum):
    PSI_MINUS = "psi-"
    PSI_PLUS = "psi+"
    PHI_MINUS = "phi-"
    PHI_PLUS = "phi+"


# Ordering of the Bell basis used by bell_decompose_14_23.
BELL_ORDER = (BellState.PSI_PLUS, BellState.PSI_MINUS, BellState.PHI_PLUS, BellState.PHI_MINUS)

_BELL_AMPLITUDES = {
    BellState.PSI_MINUS: (0.0, _S, -_S, 0.0),
    BellState.PSI_PLUS: (0.0, _S, _S, 0.0),
    BellState.PHI_MINUS: (_S, 0.0, 0.0, -_S),
    BellState.PHI_PLUS: (_S, 0.0, 0.0, _S),
}


def n_qubits_of(op: np.ndarray) -> int:
    dim = op.shape[0]
    n = dim.bit_length() - 1
    if dim != 1 << n or n < 1:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def bell_state(kind: BellState) -> np.ndarray:
    """Two-qubit Bell ket, e.g. ``|Psi-> = (|HV> - |VH>)/sqrt(2)``."""
    return np.array(_BELL_AMPLITUDES[BellState(kind)], dtype=complex)


def ket_to_dm(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    norm = np.vdot(psi, psi).real
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
    return np.outer(psi, psi.conj())


def singlet() -> np.ndarray:
    return ket_to_dm(bell_state(BellState.PSI_MINUS))


def maximally_mixed(n_qubits: int) -> np.ndarray:
    dim = 2**n_qubits
    return np.eye(dim, dtype=complex) / dim


def validate_density_matrix(rho: np.ndarray) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return ``rho`` as complex."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    n = n_qubits_of(rho)
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")
    if not np.all(np.isfinite(rho)):
        raise ValueError("density matrix has non-finite entries")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > TRACE_TOL:
        raise ValueError(f"density matrix trace is {np.trace(rho).real!r}, expected 1")
    if np.linalg.eigvalsh(rho).min() < PSD_TOL:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def _hermitize(rho: np.ndarray) -> np.ndarray:
    return 0.5 * (rho + rho.conj().T)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if n_qubits_of(a) + n_qubits_of(b) > MAX_QUBITS:
        raise ValueError(f"tensor product would exceed {MAX_QUBITS} qubits")
    return np.kron(a, b)


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def _bell_pair_tensor(kind: BellState) -> np.ndarray:
    return bell_state(kind).reshape(2, 2)


def bell_product_14_23(bell_14: BellState, bell_23: BellState) -> np.ndarray:
    """Four-photon ket ``|bell_14>_{14} |bell_23>_{23}`` in photon order 1,2,3,4."""
    t = np.einsum("ad,bc->abcd", _bell_pair_tensor(bell_14), _bell_pair_tensor(bell_23))
    return t.reshape(16)


def bell_basis_14_23() -> np.ndarray:
    """Unitary whose columns are the Bell x Bell kets, column ``4*i + j`` for
    ``(BELL_ORDER[i] on photons 1,4, BELL_ORDER[j] on photons 2,3)``."""
    cols = [bell_product_14_23(a, b) for a in BELL_ORDER for b in BELL_ORDER]
    return np.stack(cols, axis=1)


def bell_decompose_14_23(psi: np.ndarray) -> dict[tuple[BellState, BellState], complex]:
    """Expand a four-photon pure state over Bell states of the (1,4) and (2,3) pairs.

    Returns a mapping ``(bell_14, bell_23) -> coefficient``; the sixteen
    coefficients have unit total weight for a normalized input.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (16,):
        raise ValueError("expected a four-photon state vector of length 16")
    coeffs = bell_basis_14_23().conj().T @ psi
    return {(a, b): complex(coeffs[4 * i + j])
            for i, a in enumerate(BELL_ORDER) for j, b in enumerate(BELL_ORDER)}


def bell_reconstruct_14_23(coeffs: dict[tuple[BellState, BellState], complex]) -> np.ndarray:
    psi = np.zeros(16, dtype=complex)
    for (a, b), c in coeffs.items():
        psi += c * bell_product_14_23(a, b)
    return psi


def _as_labels(qubits: Iterable[int], n: int) -> list[int]:
    labels = list(qubits)
    if not labels:
        raise ValueError("qubit set must be nonempty")
    if len(set(labels)) != len(labels) or any(not 1 <= q <= n for q in labels):
        raise ValueError(f"qubit labels {labels} invalid for {n} qubits (labels are 1-based)")
    return labels


def partial_trace(rho: np.ndarray, keep: Iterable[int]) -> np.ndarray:
    """Reduced state on the photons in ``keep`` (1-based labels, output in ascending order)."""
    n = n_qubits_of(rho)
    keep = sorted(_as_labels(keep, n))
    traced = [q for q in range(1, n + 1) if q not in keep]
    t = rho.reshape([2] * (2 * n))
    # Trace highest labels first so remaining axis indices stay valid.
    cur = n
    for q in sorted(traced, reverse=True):
        t = np.trace(t, axis1=q - 1, axis2=q - 1 + cur)
        cur -= 1
    dim = 2 ** len(keep)
    return _hermitize(t.reshape(dim, dim))


def embed_operator(op: np.ndarray, targets: Sequence[int], n_qubits: int) -> np.ndarray:
    """Lift ``op`` acting on ``targets`` (1-based, in op's own qubit order) to ``n_qubits``."""
    targets = _as_labels(targets, n_qubits)
    k = len(targets)
    if op.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {op.shape} does not match {k} target qubits")
    rest = [q for q in range(1, n_qubits + 1) if q not in targets]
    full = np.kron(op, np.eye(2 ** len(rest), dtype=complex))
    order = targets + rest  # qubit label held by each axis of ``full``
    perm = [order.index(q) for q in range(1, n_qubits + 1)]
    t = full.reshape([2] * (2 * n_qubits))
    t = t.transpose(perm + [n_qubits + p for p in perm])
    dim = 2**n_qubits
    return t.reshape(dim, dim)


def werner(v: float) -> np.ndarray:
    """Singlet fraction ``v`` mixed with white noise: ``v |Psi-><Psi-| + (1 - v) I/4``."""
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"Werner parameter must lie in [0, 1], got {v!r}")
    return v * singlet() + (1.0 - v) * maximally_mixed(2)


def _psd_sqrt(op: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh(_hermitize(op))
    w = np.clip(w, 0.0, None)
    return (u * np.sqrt(w)) @ u.conj().T


def measure_project(rho: np.ndarray, effect: np.ndarray,
                    targets: Sequence[int] | None = None) -> tuple[float, np.ndarray]:
    """Apply a POVM element and return ``(probability, post-measurement state)``.

    ``targets`` (1-based) places a smaller effect on a subset of photons;
    by default the effect must span the whole space.

    Raises:
        NullOutcomeError: if the outcome probability is below 1e-15.
    """
    n = n_qubits_of(rho)
    if targets is not None:
        effect = embed_operator(effect, targets, n)
    if effect.shape != rho.shape:
        raise ValueError("effect and state dimensions differ")
    p = float(np.real(np.trace(effect @ rho)))
    if p < NULL_PROBABILITY:
        raise NullOutcomeError(f"outcome probability {p:.3e} is numerically zero")
    root = _psd_sqrt(effect)
    post = root @ rho @ root
    post = _hermitize(post / np.real(np.trace(post)))
    return p, post


def polarizer_projector(angle_deg: float, outcome: str = "transmit") -> np.ndarray:
    """Projector of a polarizer at ``angle_deg`` from H: ``|theta><theta|`` or its complement."""
    t = math.radians(angle_deg)
    k = np.array([math.cos(t), math.sin(t)], dtype=complex)
    p = np.outer(k, k.conj())
    if outcome == "transmit":
        return p
    if outcome == "reflect":
        return np.eye(2, dtype=complex) - p
    raise ValueError(f"outcome must be 'transmit' or 'reflect', got {outcome!r}")


def outcome_probabilities(rho: np.ndarray, theta_a: float, theta_b: float) -> np.ndarray:
    """Joint probabilities ``[tt, tr, rt, rr]`` for polarizers on a two-photon state."""
    if rho.shape != (4, 4):
        raise ValueError("expected a two-qubit density matrix")
    probs = []
    for oa in ("transmit", "reflect"):
        pa = polarizer_projector(theta_a, oa)
        for ob in ("transmit", "reflect"):
            op = np.kron(pa, polarizer_projector(theta_b, ob))
            probs.append(np.real(np.trace(op @ rho)))
    return np.clip(np.array(probs), 0.0, 1.0)


def correlation_E(rho: np.ndarray, theta_a: float, theta_b: float) -> float:
    """Polarization correlation ``P(t,t) + P(r,r) - P(t,r) - P(r,t)``."""
    tt, tr, rt, rr = outcome_probabilities(rho, theta_a, theta_b)
    return float(tt + rr - tr - rt)


def fidelity_to_pure(rho: np.ndarray, psi: np.ndarray) -> float:
    psi = np.asarray(psi, dtype=complex)
    if rho.shape[0] != psi.shape[0]:
        raise ValueError("state dimensions differ")
    return float(np.real(np.vdot(psi, rho @ psi)))
