import numpy as np
import pytest

from epmdiag.element_sums import (
    coherence_fid_abs_inside,
    element_sum_coherence_fid,
    element_sum_kernel,
)
from epmdiag.energetics import local_hamiltonian_2q
from epmdiag.errors import ValidationError
from epmdiag.gates import g_gate, v_angle, v_axis
from epmdiag.linalg import (
    RngStream,
    basis_state,
    dm_from_pure,
    haar_pure_state,
    haar_pure_states,
    haar_random_unitary,
    plus_plus_state,
)
from epmdiag.merit import (
    ETA_KINDS,
    MeritKind,
    eta_signed_traces,
    haar_average,
    kernel_coherence_fid,
    kernel_eta,
    kernel_fidelity,
    kernel_values,
    l1_coherence,
)

H = local_hamiltonian_2q()


def random_tuple(index, gen):
    theta = gen.uniform(0, np.pi)
    phi = gen.uniform(0, 2 * np.pi)
    family = v_axis if gen.random() < 0.5 else v_angle
    psi = haar_pure_state(RngStream(7000, index), 4)
    return psi, g_gate(theta), family(theta, phi)


def test_l1_coherence_examples():
    assert l1_coherence(np.diag([0.25] * 4)) == 0.0
    plus = np.array([1, 1]) / np.sqrt(2)
    assert abs(l1_coherence(dm_from_pure(plus)) - 1.0) < 1e-12
    assert abs(l1_coherence(dm_from_pure(plus_plus_state())) - 3.0) < 1e-12


def test_coherence_kernel_zero_for_equal_gates():
    for i in range(10):
        psi = haar_pure_state(RngStream(71, i), 4)
        u = g_gate(0.1 * i)
        assert kernel_coherence_fid(psi, u, u) == 0.0


def test_coherence_kernel_analytic_point():
    value = kernel_coherence_fid(basis_state(4, 0), g_gate(np.pi / 8), v_axis(np.pi / 8, np.pi / 2))
    assert abs(value - 1.0) < 1e-12


def test_coherence_kernel_closed_form_grid():
    # for |00> input: ideal coherence |sin 4 theta|, axis-error coherence
    # 2 |cos 2t cos p| sqrt(sin^2 2t cos^2 p + sin^2 p); cross-checked by a
    # dense-matrix computation of the two output coherences.
    phi = np.pi / 9
    psi = basis_state(4, 0)
    for theta in np.linspace(0.0, np.pi / 4, 5):
        u, v = g_gate(theta), v_axis(theta, phi)
        closed = abs(
            2 * abs(np.cos(2 * theta) * np.cos(phi))
            * np.sqrt(np.sin(2 * theta) ** 2 * np.cos(phi) ** 2 + np.sin(phi) ** 2)
            - abs(np.sin(4 * theta))
        )
        brute = abs(
            l1_coherence(v @ dm_from_pure(psi) @ v.conj().T)
            - l1_coherence(u @ dm_from_pure(psi) @ u.conj().T)
        )
        value = kernel_coherence_fid(psi, u, v)
        assert abs(value - closed) < 1e-12
        assert abs(value - brute) < 1e-12


def test_fidelity_kernel_exact_one_for_equal_gates():
    for i in range(10):
        psi = haar_pure_state(RngStream(73, i), 4)
        u = v_angle(0.2 * i, 0.0)
        assert kernel_fidelity(psi, u, u) == 1.0


def test_fidelity_kernel_matches_trace_form():
    gen = np.random.default_rng(79)
    for i in range(30):
        psi, u, v = random_tuple(i, gen)
        rho = dm_from_pure(psi)
        trace_form = float(
            np.real(np.trace((v @ rho @ v.conj().T) @ (u @ rho @ u.conj().T)))
        )
        assert abs(kernel_fidelity(psi, u, v) - trace_form) < 1e-12


def test_fidelity_kernel_orthogonal_outputs():
    value = kernel_fidelity(basis_state(4, 0), g_gate(0.0), v_axis(0.0, np.pi / 2))
    assert value < 1e-12


def test_fidelity_kernel_range():
    gen = np.random.default_rng(83)
    for i in range(50):
        psi, u, v = random_tuple(i + 100, gen)
        value = kernel_fidelity(psi, u, v)
        assert 0.0 <= value <= 1.0


def test_eta_kernels_zero_for_equal_gates():
    for kind in ETA_KINDS:
        for i in range(5):
            psi = haar_pure_state(RngStream(89, i), 4)
            u = v_axis(0.3 * i, 0.0)
            assert kernel_eta(psi, u, u, H, kind) == 0.0


def test_eta_chi_zero_for_diagonal_input():
    psi = basis_state(4, 1)
    for theta in (0.0, 0.4, 1.1):
        for phi in (0.3, 1.0, 2.2):
            for family in (v_axis, v_angle):
                value = kernel_eta(psi, g_gate(theta), family(theta, phi), H, MeritKind.ETA_CHI)
                assert value < 1e-14


def test_eta_kernel_rejects_non_eta_kind():
    psi = basis_state(4, 0)
    with pytest.raises(ValidationError):
        kernel_eta(psi, g_gate(0.1), v_axis(0.1, 0.2), H, MeritKind.FIDELITY)


def test_eta_chi_against_element_sum_on_theta_grid():
    psi = plus_plus_state()
    for theta in (0.0, np.pi / 16, np.pi / 8, 3 * np.pi / 16, np.pi / 4):
        u, v = g_gate(theta), v_axis(theta, np.pi / 9)
        fast = kernel_eta(psi, u, v, H, MeritKind.ETA_CHI)
        slow = element_sum_kernel(MeritKind.ETA_CHI, psi, u, v, H)
        assert abs(fast - slow) < 1e-10


def test_all_kernels_match_element_sums():
    gen = np.random.default_rng(97)
    for i in range(60):
        psi, u, v = random_tuple(i + 200, gen)
        for kind in MeritKind:
            fast = float(kernel_values(kind, psi, u, v, H)[0])
            slow = element_sum_kernel(kind, psi, u, v, H)
            assert abs(fast - slow) < 1e-10, kind


def test_signed_traces_decompose_exactly():
    gen = np.random.default_rng(101)
    states = haar_pure_states(RngStream(103, 0), 4, 200)
    u, v = g_gate(0.77), v_axis(0.77, gen.uniform(0, np.pi))
    s_p, s_chi, s_epm = eta_signed_traces(states, u, v, H)
    assert np.max(np.abs(s_p + s_chi - s_epm)) < 1e-12


def test_haar_unitary_invariance_of_average():
    # averaging kernel(psi) and kernel(W psi) over independent Haar batches
    # must agree within Monte Carlo error
    n = 100_000
    w = haar_random_unitary(RngStream(107, 0), 4)
    u, v = g_gate(0.6), v_axis(0.6, 0.8)
    plain = haar_pure_states(RngStream(109, 0), 4, n)
    rotated = haar_pure_states(RngStream(113, 0), 4, n) @ w.T
    for kind in (MeritKind.COHERENCE_FIDELITY, MeritKind.ETA_CHI):
        x = kernel_values(kind, plain, u, v, H)
        y = kernel_values(kind, rotated, u, v, H)
        se = np.sqrt(np.var(x, ddof=1) / n + np.var(y, ddof=1) / n)
        assert abs(x.mean() - y.mean()) < 3 * se


def test_haar_average_null_cases():
    u = g_gate(0.9)
    for kind in (MeritKind.ETA_CHI, MeritKind.COHERENCE_FIDELITY):
        avg = haar_average(kind, u, v_axis(0.9, 0.0), H, n_samples=500, seed=3)
        assert avg.mean == 0.0 and avg.std_error == 0.0
    avg = haar_average(MeritKind.FIDELITY, u, u, H, n_samples=500, seed=3)
    assert avg.mean == 1.0 and avg.std_error == 0.0


def test_haar_average_deterministic():
    a = haar_average(MeritKind.ETA_CHI, g_gate(0.4), v_axis(0.4, 0.5), H, n_samples=400, seed=12)
    b = haar_average(MeritKind.ETA_CHI, g_gate(0.4), v_axis(0.4, 0.5), H, n_samples=400, seed=12)
    assert a == b
    c = haar_average(MeritKind.ETA_CHI, g_gate(0.4), v_axis(0.4, 0.5), H, n_samples=400, seed=13)
    assert a != c


def test_haar_average_mean_within_sample_range():
    u, v = g_gate(0.5), v_axis(0.5, 0.8)
    avg = haar_average(MeritKind.ETA_CHI, u, v, H, n_samples=300, seed=21)
    states = haar_pure_states(RngStream(21, 0), 4, 300)
    values = kernel_values(MeritKind.ETA_CHI, states, u, v, H)
    assert values.min() <= avg.mean <= values.max()


def test_haar_average_rejects_zero_samples():
    with pytest.raises(ValidationError):
        haar_average(MeritKind.FIDELITY, g_gate(0.1), g_gate(0.1), H, n_samples=0, seed=0)


def test_merit_kind_lookup():
    assert MeritKind.from_name("eta_chi") is MeritKind.ETA_CHI
    with pytest.raises(ValidationError):
        MeritKind.from_name("eta_zeta")


def test_abs_inside_variant_agrees_on_basis_inputs():
    # single-term input states leave nothing for the inner sums to cancel,
    # so the two coherence summation orders coincide there
    for i in range(4):
        psi = basis_state(4, i)
        u, v = g_gate(0.31), v_axis(0.31, 0.52)
        assert abs(coherence_fid_abs_inside(psi, u, v) - element_sum_coherence_fid(psi, u, v)) < 1e-12


def test_abs_inside_variant_differs_in_general():
    # the summation-order variant is NOT the coherence kernel for
    # superposed inputs; record the size of the discrepancy
    psi = plus_plus_state()
    u, v = g_gate(np.pi / 8), v_axis(np.pi / 8, np.pi / 9)
    canonical = element_sum_coherence_fid(psi, u, v)
    variant = coherence_fid_abs_inside(psi, u, v)
    assert abs(kernel_coherence_fid(psi, u, v) - canonical) < 1e-12
    discrepancy = abs(variant - canonical)
    print(f"abs-inside coherence variant discrepancy at (pi/8, pi/9), |++>: {discrepancy:.6f}")
    assert discrepancy > 1e-3
