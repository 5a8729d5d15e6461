"""Small dense complex linear algebra: gates, statevectors, gadget actions.

Conventions used throughout the package:
  * a statevector on n qubits is a flat complex array of length 2**n,
  * qubit 0 is the most significant bit of the index, so the amplitude of
    the bitstring y is state[int(y, 2)],
  * all comparisons between operators are phase-insensitive unless stated.
"""
from __future__ import annotations

import cmath
import math
import os

import numpy as np

from .errors import CapabilityError

DEFAULT_DENSE_CAP = 16
DENSE_CAP_ENV = "CCCSIM_DENSE_CAP"

_SQ2 = 1.0 / math.sqrt(2.0)

GATES: dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "SDG": np.array([[1, 0], [0, -1j]], dtype=complex),
    "T": np.array([[1, 0], [0, cmath.exp(1j * math.pi / 4)]], dtype=complex),
    "TDG": np.array([[1, 0], [0, cmath.exp(-1j * math.pi / 4)]], dtype=complex),
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
}


def gate(name: str) -> np.ndarray:
    """Look up a named gate matrix (a copy, safe to mutate)."""
    try:
        return GATES[name].copy()
    except KeyError:
        raise ValueError(f"unknown gate name {name!r}") from None


def rz(theta: float) -> np.ndarray:
    """exp(-i*theta*Z/2)."""
    t = float(theta)
    return np.array([[cmath.exp(-0.5j * t), 0], [0, cmath.exp(0.5j * t)]])


def rx(theta: float) -> np.ndarray:
    """exp(-i*theta*X/2)."""
    t = float(theta)
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def dense_cap() -> int:
    """Largest qubit count dense simulation will accept (env-overridable)."""
    raw = os.environ.get(DENSE_CAP_ENV)
    return int(raw) if raw else DEFAULT_DENSE_CAP


def zero_state(n: int) -> np.ndarray:
    if n > dense_cap():
        raise CapabilityError(
            f"dense statevector on {n} qubits exceeds the cap of {dense_cap()} "
            f"(override with {DENSE_CAP_ENV})"
        )
    state = np.zeros(2**n, dtype=complex)
    state[0] = 1.0
    return state


def basis_state(n: int, bits: str) -> np.ndarray:
    state = zero_state(n)
    state[0] = 0.0
    state[int(bits, 2)] = 1.0
    return state


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def apply_gate(state: np.ndarray, g: np.ndarray, targets: tuple[int, ...] | list[int]) -> np.ndarray:
    """Apply a 2**t x 2**t gate to the target qubits of a statevector."""
    n = int(round(math.log2(state.size)))
    targets = tuple(targets)
    t = len(targets)
    if g.shape != (2**t, 2**t):
        raise ValueError(f"gate shape {g.shape} does not match {t} targets")
    if len(set(targets)) != t or any(q < 0 or q >= n for q in targets):
        raise ValueError(f"bad targets {targets} for {n} qubits")
    psi = np.moveaxis(state.reshape((2,) * n), targets, range(t))
    out = np.tensordot(
        g.reshape((2,) * (2 * t)),
        psi,
        axes=(tuple(range(t, 2 * t)), tuple(range(t))),
    )
    out = np.moveaxis(out, range(t), targets)
    return np.ascontiguousarray(out).reshape(-1)


def normalized_action(a: np.ndarray, l: int | None = None) -> np.ndarray:
    """Rescale a square matrix to unit determinant via the principal root.

    The result is canonical only up to a (dim)-th root of unity; every
    predicate downstream of this is phase-insensitive.
    """
    a = np.asarray(a, dtype=complex)
    d = a.shape[0]
    if l is not None and a.shape != (2**l, 2**l):
        raise ValueError(f"expected a {2**l}x{2**l} matrix, got {a.shape}")
    det = complex(np.linalg.det(a))
    if abs(det) < 1e-12:
        raise ValueError("normalized action does not exist: matrix is singular")
    return a / det ** (1.0 / d)


def proportional_up_to_phase(
    a: np.ndarray, b: np.ndarray, tol: float = 1e-8, unit_factor: bool = False
) -> bool:
    """True iff a = alpha*b entrywise within tol for some nonzero alpha.

    With unit_factor=True the factor must additionally satisfy |alpha| = 1,
    i.e. this becomes equality up to a global phase.
    """
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[idx]) <= tol:
        return bool(np.max(np.abs(a)) <= tol)
    alpha = a[idx] / b[idx]
    if abs(alpha) <= tol:
        return False
    if unit_factor and abs(abs(alpha) - 1.0) > tol:
        return False
    return bool(np.max(np.abs(a - alpha * b)) <= tol)


def is_unitary_up_to_scale(a: np.ndarray, tol: float = 1e-8) -> bool:
    """True iff a.conj().T @ a = gamma*I for some gamma > tol."""
    a = np.asarray(a, dtype=complex)
    if a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    m = a.conj().T @ a
    gamma = float(np.trace(m).real) / a.shape[0]
    if gamma <= tol:
        return False
    return bool(np.max(np.abs(m - gamma * np.eye(a.shape[0]))) <= tol * max(1.0, gamma))


def unitary_scale(a: np.ndarray) -> float:
    """The gamma in a.conj().T @ a = gamma*I (meaningful when unitary-up-to-scale)."""
    a = np.asarray(a, dtype=complex)
    return float(np.trace(a.conj().T @ a).real) / a.shape[0]


def is_unitary(a: np.ndarray, tol: float = 1e-8) -> bool:
    a = np.asarray(a, dtype=complex)
    return bool(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))) <= tol)


def is_signed_pauli(a: np.ndarray, tol: float = 1e-9) -> bool:
    """True iff a is +P or -P for a single-qubit Pauli P in {X, Y, Z}."""
    a = np.asarray(a, dtype=complex)
    for name in ("X", "Y", "Z"):
        p = GATES[name]
        if np.max(np.abs(a - p)) <= tol or np.max(np.abs(a + p)) <= tol:
            return True
    return False


def phase_invariant_distance(a: np.ndarray, b: np.ndarray) -> float:
    """min over unit phases of the operator norm ||a - exp(i*g)*b||.

    Both inputs must be unitary.  The minimum is taken in closed form from
    the eigenphases of b^dag a: the optimal phase sits at the center of the
    shortest arc containing all eigenphases.
    """
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ValueError("inputs must be square matrices of equal dimension")
    if not (is_unitary(a) and is_unitary(b)):
        raise ValueError("phase_invariant_distance requires unitary inputs")
    return float(phase_invariant_distance_batch(a[None, :, :], b)[0])


def phase_invariant_distance_batch(stack: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorized phase_invariant_distance of each matrix in stack against b."""
    m = b.conj().T[None, :, :] @ stack
    phases = np.sort(np.angle(np.linalg.eigvals(m)), axis=-1)
    gaps = np.diff(phases, axis=-1)
    wrap = (2 * math.pi + phases[..., 0] - phases[..., -1])[..., None]
    largest_gap = np.max(np.concatenate([gaps, wrap], axis=-1), axis=-1)
    arc = 2 * math.pi - largest_gap
    return 2.0 * np.sin(arc / 4.0)
