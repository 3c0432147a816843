"""Minimal statevector core for 1-3 qubits.

Amplitudes are indexed with qubit 0 as the most significant bit, so the
basis label of index i is its binary expansion.  Local operations are
checked for unitarity (column orthonormality within 1e-9) on application.
"""
from __future__ import annotations

import math

import numpy as np

ATOL = 1e-9


def identity2() -> np.ndarray:
    return np.eye(2, dtype=complex)


def hadamard() -> np.ndarray:
    return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def s_dagger() -> np.ndarray:
    return np.array([[1, 0], [0, -1j]], dtype=complex)


def rotation(theta: float) -> np.ndarray:
    """Real rotation by theta in the computational plane."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def bell_phi_plus() -> np.ndarray:
    """(|00> + |11>) / sqrt(2)."""
    state = np.zeros(4, dtype=complex)
    state[0b00] = state[0b11] = 1 / math.sqrt(2)
    return state


def ghz_state() -> np.ndarray:
    """(|011> + |101> + |110> - |000>) / 2."""
    state = np.zeros(8, dtype=complex)
    state[0b011] = state[0b101] = state[0b110] = 0.5
    state[0b000] = -0.5
    return state


def _check_unitary(u: np.ndarray) -> None:
    if u.shape != (2, 2):
        raise ValueError("local operations are 2x2")
    if not np.allclose(u.conj().T @ u, np.eye(2), atol=ATOL):
        raise ValueError("operation is not unitary within 1e-9")


def _check_normalized(state: np.ndarray) -> None:
    norm = float(np.sum(np.abs(state) ** 2))
    if abs(norm - 1.0) > ATOL:
        raise ValueError(f"state norm {norm} drifted past 1e-9")


def apply_one_qubit(state: np.ndarray, u: np.ndarray, qubit: int) -> np.ndarray:
    """Apply a single-qubit unitary to one qubit of the register."""
    n = state.shape[0].bit_length() - 1
    if 1 << n != state.shape[0] or not 1 <= n <= 3:
        raise ValueError("state must hold 1-3 qubits")
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    _check_unitary(u)
    _check_normalized(state)
    reshaped = state.reshape([2] * n)
    moved = np.moveaxis(reshaped, qubit, -1)
    result = moved @ u.T
    out = np.moveaxis(result, -1, qubit).reshape(-1)
    _check_normalized(out)
    return out


def measurement_probs(state: np.ndarray) -> np.ndarray:
    """Standard-basis outcome probabilities."""
    _check_normalized(state)
    return np.abs(state) ** 2
