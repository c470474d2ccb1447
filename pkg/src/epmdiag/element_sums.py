"""Explicit basis-element summations of every merit kernel.

These are deliberately slow, loop-based reference implementations that
expand each kernel into sums over computational-basis matrix elements.
They share no code with the vectorized kernels in `merit` and exist as an
independent route for cross-checking them.
"""
from __future__ import annotations

import numpy as np

from .energetics import LocalHamiltonian
from .errors import ValidationError
from .merit import MeritKind


def _rho_elements(psi0: np.ndarray) -> np.ndarray:
    psi0 = np.asarray(psi0, dtype=complex)
    return psi0[:, None] * psi0.conj()[None, :]


def element_sum_fidelity(psi0: np.ndarray, u_ideal: np.ndarray, v_noisy: np.ndarray) -> float:
    """Fidelity kernel as the full six-index element sum.

    The (n1, n2) density elements enter from the bra side and the (l1, l2)
    ones from the ket side, so the first factor is the transposed element
    rho[n2, n1]; with both factors read the same way the sum would couple
    the state to its complex conjugate instead.
    """
    rho = _rho_elements(psi0)
    dim = rho.shape[0]
    total = 0.0 + 0.0j
    for n1 in range(dim):
        for n2 in range(dim):
            for m1 in range(dim):
                for m2 in range(dim):
                    for l1 in range(dim):
                        for l2 in range(dim):
                            total += (
                                rho[n2, n1]
                                * rho[l1, l2]
                                * np.conj(u_ideal[m1, n1])
                                * v_noisy[m1, l1]
                                * np.conj(v_noisy[m2, l2])
                                * u_ideal[m2, n2]
                            )
    return float(total.real)


def element_sum_coherence_fid(psi0: np.ndarray, u_ideal: np.ndarray, v_noisy: np.ndarray) -> float:
    """Coherence mismatch kernel with both output matrices built element by element."""
    rho = _rho_elements(psi0)
    dim = rho.shape[0]

    def l1_of(gate: np.ndarray) -> float:
        total = 0.0
        for n in range(dim):
            for k in range(dim):
                if n == k:
                    continue
                entry = 0.0 + 0.0j
                for m1 in range(dim):
                    for m2 in range(dim):
                        entry += rho[m1, m2] * gate[n, m1] * np.conj(gate[k, m2])
                total += abs(entry)
        return total

    return abs(l1_of(v_noisy) - l1_of(u_ideal))


def coherence_fid_abs_inside(psi0: np.ndarray, u_ideal: np.ndarray, v_noisy: np.ndarray) -> float:
    """Variant placing the absolute values inside the (m1, m2) sums.

    Not algebraically equal to element_sum_coherence_fid, because here each
    basis-element product is rectified before the sums over m1, m2 run.
    Kept as a diagnostic comparator; the discrepancy against the canonical
    kernel is reported by callers, never silently absorbed.
    """
    rho = _rho_elements(psi0)
    dim = rho.shape[0]
    total = 0.0
    for n in range(dim):
        for k in range(dim):
            if n == k:
                continue
            for m1 in range(dim):
                for m2 in range(dim):
                    total += abs(rho[m1, m2] * v_noisy[n, m1] * np.conj(v_noisy[k, m2])) - abs(
                        rho[m1, m2] * u_ideal[n, m1] * np.conj(u_ideal[k, m2])
                    )
    return abs(total)


def _element_sum_eta_tpm(
    rho: np.ndarray, u_ideal: np.ndarray, v_noisy: np.ndarray, energies: np.ndarray
) -> float:
    dim = rho.shape[0]
    total = 0.0 + 0.0j
    for n in range(dim):
        for m in range(dim):
            total += (
                np.exp(-energies[n])
                * np.exp(energies[m])
                * rho[m, m]
                * (
                    v_noisy[n, m] * np.conj(v_noisy[n, m])
                    - u_ideal[n, m] * np.conj(u_ideal[n, m])
                )
            )
    return abs(total)


def element_sum_eta(
    psi0: np.ndarray,
    u_ideal: np.ndarray,
    v_noisy: np.ndarray,
    hamiltonian: LocalHamiltonian,
    kind: MeritKind,
) -> float:
    """Eta-family kernels as explicit double / triple element sums."""
    rho = _rho_elements(psi0)
    dim = rho.shape[0]
    energies = hamiltonian.energies
    if kind is MeritKind.ETA_TPM:
        return _element_sum_eta_tpm(rho, u_ideal, v_noisy, energies)

    mean_exp_h = sum(abs(psi0[m]) ** 2 * np.exp(energies[m]) for m in range(dim))
    total = 0.0 + 0.0j
    for n in range(dim):
        for m1 in range(dim):
            for m2 in range(dim):
                if kind is MeritKind.ETA_CHI and m1 == m2:
                    continue
                if kind is MeritKind.ETA_P and m1 != m2:
                    continue
                total += (
                    np.exp(-energies[n])
                    * rho[m1, m2]
                    * (
                        v_noisy[n, m1] * np.conj(v_noisy[n, m2])
                        - u_ideal[n, m1] * np.conj(u_ideal[n, m2])
                    )
                )
    if kind in (MeritKind.ETA_P, MeritKind.ETA_EPM, MeritKind.ETA_CHI):
        return float(mean_exp_h) * abs(total)
    raise ValidationError(f"element_sum_eta does not handle {kind!r}")


def element_sum_kernel(
    kind: MeritKind,
    psi0: np.ndarray,
    u_ideal: np.ndarray,
    v_noisy: np.ndarray,
    hamiltonian: LocalHamiltonian | None = None,
) -> float:
    """Dispatch to the element-sum reference for any merit kind."""
    if kind is MeritKind.FIDELITY:
        return element_sum_fidelity(psi0, u_ideal, v_noisy)
    if kind is MeritKind.COHERENCE_FIDELITY:
        return element_sum_coherence_fid(psi0, u_ideal, v_noisy)
    if hamiltonian is None:
        raise ValidationError(f"merit {kind.value} requires a Hamiltonian")
    return element_sum_eta(psi0, u_ideal, v_noisy, hamiltonian, kind)
