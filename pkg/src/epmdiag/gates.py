"""Ideal controlled gates, coherent error unitaries and channel wrappers.

The single-qubit rotation is R(theta) = cos(2 theta) sz + sin(2 theta) sx,
a pi rotation about the Bloch axis n = (sin 2theta, 0, cos 2theta). The
two-qubit gate is G(theta) = s+ (x) I + s- (x) R(theta): it rotates the
target when the control starts in |0> while flipping the control. Two
coherent error families perturb the target block only:

  axis error   V_axis(theta, phi):  rotation axis tilted to
               n~ = (sin 2theta cos phi, sin phi, cos 2theta cos phi),
               block i * (-i)(n~ . sigma)
  angle error  V_angle(theta, phi): rotation angle perturbed through
               alpha = (phi + pi)/2, block i cos(alpha) I + sin(alpha) R(theta)

Both reduce exactly (bit for bit) to G(theta) at phi = 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .linalg import (
    IDENTITY_2,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    SIGMA_MINUS,
    SIGMA_PLUS,
    is_unitary,
)


def r_gate(theta: float) -> np.ndarray:
    """Single-qubit pi rotation cos(2 theta) sz + sin(2 theta) sx (Hermitian)."""
    return np.cos(2 * theta) * PAULI_Z + np.sin(2 * theta) * PAULI_X


def g_gate(theta: float) -> np.ndarray:
    """Ideal conditional two-qubit gate s+ (x) I + s- (x) R(theta)."""
    return np.kron(SIGMA_PLUS, IDENTITY_2) + np.kron(SIGMA_MINUS, r_gate(theta))


def v_axis(theta: float, phi: float) -> np.ndarray:
    """Rotation-axis error unitary: the target rotation axis is tilted by phi.

    Returns s+ (x) I + i s- (x) (-i)(n~ . sigma). Equals g_gate(theta)
    when phi = 0.
    """
    cos_phi = np.cos(phi)
    nx = np.sin(2 * theta) * cos_phi
    ny = np.sin(phi)
    nz = np.cos(2 * theta) * cos_phi
    tilted = -1j * (nx * PAULI_X + ny * PAULI_Y + nz * PAULI_Z)
    return np.kron(SIGMA_PLUS, IDENTITY_2) + 1j * np.kron(SIGMA_MINUS, tilted)


def v_angle(theta: float, phi: float) -> np.ndarray:
    """Rotation-angle error unitary with alpha = (phi + pi)/2.

    The target block is i cos(alpha) I + sin(alpha) R(theta); cos(alpha)
    and sin(alpha) are evaluated as -sin(phi/2) and cos(phi/2), which is
    the same quantity without cancellation, so phi = 0 reproduces
    g_gate(theta) exactly.
    """
    cos_alpha = -np.sin(phi / 2)
    sin_alpha = np.cos(phi / 2)
    block = 1j * cos_alpha * IDENTITY_2 + sin_alpha * r_gate(theta)
    return np.kron(SIGMA_PLUS, IDENTITY_2) + np.kron(SIGMA_MINUS, block)


@dataclass
class KrausChannel:
    """CPTP map given by Kraus operators; trace preservation is enforced."""

    dim: int
    kraus_ops: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        self.kraus_ops = [np.asarray(k, dtype=complex) for k in self.kraus_ops]
        if not self.kraus_ops:
            raise ValidationError("a Kraus channel needs at least one operator")
        for k in self.kraus_ops:
            if k.shape != (self.dim, self.dim):
                raise ValidationError(
                    f"Kraus operator of shape {k.shape} does not match dim {self.dim}"
                )
        total = sum(k.conj().T @ k for k in self.kraus_ops)
        if float(np.max(np.abs(total - np.eye(self.dim)))) > 1e-12:
            raise ValidationError("Kraus operators do not satisfy sum K^dag K = I")

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Apply the channel: rho -> sum_k K rho K^dagger."""
        rho = np.asarray(rho, dtype=complex)
        out = np.zeros_like(rho)
        for k in self.kraus_ops:
            out += k @ rho @ k.conj().T
        return out


def unitary_channel(v: np.ndarray) -> KrausChannel:
    """Wrap a unitary as the single-Kraus channel rho -> V rho V^dagger."""
    v = np.asarray(v, dtype=complex)
    if not is_unitary(v, atol=1e-10):
        raise ValidationError("matrix is not unitary within 1e-10")
    return KrausChannel(dim=v.shape[0], kraus_ops=[v])


@dataclass(frozen=True)
class WaveplateSettings:
    """Half- and quarter-waveplate angles realizing the axis-error gate."""

    hwp_s1: float
    hwp_s2: float
    qwp_s1: float
    qwp_s2: float


def waveplate_settings(theta: float, phi: float) -> WaveplateSettings:
    """Waveplate angles for (theta, phi): HWPs at theta/2 + phi/4, QWPs split by pi/2."""
    hwp = theta / 2 + phi / 4
    return WaveplateSettings(
        hwp_s1=hwp,
        hwp_s2=hwp,
        qwp_s1=phi / 2 + np.pi / 2,
        qwp_s2=phi / 2,
    )


def phase_insensitive_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Max-norm distance between a and b minimized over a global phase.

    Diagnostic comparator only; all identities in this package hold without
    any phase freedom, so tests compare entrywise instead.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    overlap = complex(np.trace(a.conj().T @ b))
    if overlap == 0:
        return float(np.max(np.abs(a - b)))
    phase = np.conj(overlap) / abs(overlap)
    return float(np.max(np.abs(a - phase * b)))
