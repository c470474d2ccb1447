"""Dense complex linear algebra for one- and two-qubit objects.

States and operators are plain complex numpy arrays. This module fixes the
conventions used everywhere else: computational basis order |00>, |01>,
|10>, |11> with the LEFT tensor factor acting as the control qubit, and
seeded, reproducible Haar sampling backed by a counter-based bit generator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

ATOL = 1e-12

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_PLUS = (PAULI_X + 1j * PAULI_Y) / 2
SIGMA_MINUS = (PAULI_X - 1j * PAULI_Y) / 2

SUPPORTED_DIMS = (2, 4)

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """Deterministic random substream keyed by (master_seed, stream_index).

    Backed by the counter-based Philox generator with the 128-bit key
    (stream_index << 64) | master_seed, so every (seed, index) pair is an
    independent stream whose output never depends on what other streams
    were consumed, or in which order.
    """

    master_seed: int
    stream_index: int = 0

    def generator(self) -> np.random.Generator:
        key = ((self.stream_index & _MASK64) << 64) | (self.master_seed & _MASK64)
        return np.random.Generator(np.random.Philox(key=key))


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two 2x2 matrices, left factor = control qubit."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ValidationError(
            f"tensor expects two 2x2 matrices, got {a.shape} and {b.shape}"
        )
    return np.kron(a, b)


def basis_state(dim: int, index: int) -> np.ndarray:
    """Computational basis vector |index> of the given dimension."""
    if dim not in SUPPORTED_DIMS:
        raise ValidationError(f"unsupported dimension {dim}, expected one of {SUPPORTED_DIMS}")
    if not 0 <= index < dim:
        raise ValidationError(f"basis index {index} out of range for dim {dim}")
    psi = np.zeros(dim, dtype=complex)
    psi[index] = 1.0
    return psi


def plus_plus_state() -> np.ndarray:
    """The product state (|0> + |1>)(|0> + |1>)/2 in the two-qubit basis."""
    return np.full(4, 0.5, dtype=complex)


def check_pure_state(psi: np.ndarray, atol: float = ATOL) -> np.ndarray:
    """Validate normalization of a state vector; returns it as complex ndarray."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.size not in SUPPORTED_DIMS:
        raise ValidationError(f"expected a state vector of dimension 2 or 4, got shape {psi.shape}")
    norm_sq = float(np.sum(psi.real**2 + psi.imag**2))
    if abs(norm_sq - 1.0) > atol:
        raise ValidationError(f"state vector not normalized: sum |a_i|^2 = {norm_sq!r}")
    return psi


def check_density_matrix(rho: np.ndarray, atol: float = ATOL) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity of a density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in SUPPORTED_DIMS:
        raise ValidationError(f"expected a 2x2 or 4x4 density matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise ValidationError("density matrix is not Hermitian")
    trace = complex(np.trace(rho))
    if abs(trace - 1.0) > atol:
        raise ValidationError(f"density matrix trace is {trace!r}, expected 1")
    eigenvalues = np.linalg.eigvalsh(rho)
    if float(eigenvalues.min()) < -1e-10:
        raise ValidationError(f"density matrix has negative eigenvalue {eigenvalues.min()!r}")
    return rho


def dm_from_pure(psi: np.ndarray) -> np.ndarray:
    """Rank-1 projector |psi><psi| of a normalized state vector."""
    psi = check_pure_state(psi)
    return np.outer(psi, psi.conj())


def haar_pure_states(rng: RngStream, dim: int, n: int) -> np.ndarray:
    """Draw n Haar-random pure states as the rows of an (n, dim) array.

    Each row is an i.i.d. standard complex Gaussian vector normalized to
    unit length (the exact Haar construction). Rows are filled from the
    stream in order, so row 0 equals the single-state draw from the same
    stream and prefixes of a batch are batch-size independent.
    """
    if dim not in SUPPORTED_DIMS:
        raise ValidationError(f"unsupported dimension {dim}, expected one of {SUPPORTED_DIMS}")
    if n < 1:
        raise ValidationError(f"sample count must be >= 1, got {n}")
    gauss = rng.generator().standard_normal((n, 2 * dim))
    z = gauss[:, :dim] + 1j * gauss[:, dim:]
    norms = np.sqrt(np.sum(z.real**2 + z.imag**2, axis=1))
    return z / norms[:, None]


def haar_pure_state(rng: RngStream, dim: int) -> np.ndarray:
    """Draw one Haar-random pure state vector of the given dimension."""
    return haar_pure_states(rng, dim, 1)[0]


def haar_random_unitary(rng: RngStream, dim: int) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix.

    The R-diagonal phase fix makes the distribution exactly Haar rather
    than merely unitary.
    """
    if dim not in SUPPORTED_DIMS:
        raise ValidationError(f"unsupported dimension {dim}, expected one of {SUPPORTED_DIMS}")
    gen = rng.generator()
    z = (gen.standard_normal((dim, dim)) + 1j * gen.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def is_unitary(matrix: np.ndarray, atol: float = ATOL) -> bool:
    """True when matrix @ matrix^dagger is the identity within atol (max norm)."""
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    delta = matrix @ matrix.conj().T - np.eye(matrix.shape[0])
    return float(np.max(np.abs(delta))) <= atol
