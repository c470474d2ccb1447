"""Measurement-only reconstruction of coherence diagnostics.

Everything in this module consumes conditional outcome probabilities
p(kq | input state) of local computational-basis measurements after the
gate, the kind of data a counting experiment produces. From a handful of
input states these probabilities determine

  * the populations of the evolved coherence part chi (five-row tables),
  * the coherence contribution to the EPM characteristic function at u=i,
  * the full transition tensor <j| V^dag P_a V |i>, which allows the
    final-energy moment of ANY input state to be evaluated afterwards in
    post-processing.

Tables travel as CSV with header ``input,p00,p01,p10,p11``, one row per
input label, ``#`` comment lines allowed (used for ``# key = value``
metadata such as the sweep angle a table belongs to).
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .energetics import LocalHamiltonian
from .errors import ParseError, ValidationError
from .linalg import basis_state, plus_plus_state

BASIS_LABELS = ("00", "01", "10", "11")
OUTCOME_COLUMNS = ("p00", "p01", "p10", "p11")

# Off-diagonal entry order used by the tensor solver; x-vector layout is
# [T00, T11, T22, T33, Re/Im per pair in this order].
_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


@dataclass
class ProbabilityTable:
    """Measured or synthetic outcome probabilities keyed by input label.

    Rows may come from finite counting statistics, so mild violations of
    [0, 1] bounds and unit row sums are flagged in `flags` rather than
    rejected; `sum_tolerance` states how much slack the data is allowed.
    """

    rows: dict[str, np.ndarray]
    sum_tolerance: float = 0.02
    metadata: dict[str, float] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)

    def row(self, label: str) -> np.ndarray:
        if label not in self.rows:
            raise ValidationError(f"probability table is missing required row {label!r}")
        return self.rows[label]

    def missing(self, labels) -> list[str]:
        return [label for label in labels if label not in self.rows]


def outcome_probabilities(v: np.ndarray, input_state: np.ndarray) -> np.ndarray:
    """Probabilities p(kq | input) = |<kq| V |input>|^2 in basis order."""
    v = np.asarray(v, dtype=complex)
    if v.shape != (4, 4):
        raise ValidationError(f"expected a 4x4 unitary, got shape {v.shape}")
    out = v @ np.asarray(input_state, dtype=complex)
    return out.real**2 + out.imag**2


def gate_probability_table(v: np.ndarray, metadata: dict | None = None) -> ProbabilityTable:
    """Synthetic five-row table (four basis inputs plus |++>) for a gate."""
    rows = {label: outcome_probabilities(v, basis_state(4, i)) for i, label in enumerate(BASIS_LABELS)}
    rows["++"] = outcome_probabilities(v, plus_plus_state())
    return ProbabilityTable(rows=rows, sum_tolerance=1e-12, metadata=dict(metadata or {}))


def table_from_plan(v: np.ndarray, plan: "ProtocolPlan") -> ProbabilityTable:
    """Synthetic table with one row per protocol-plan state."""
    rows = {label: outcome_probabilities(v, state) for label, state in plan.states}
    return ProbabilityTable(rows=rows, sum_tolerance=1e-12)


def chi_populations(table: ProbabilityTable) -> np.ndarray:
    """Populations of the evolved coherence part from a five-row table.

    p(kq; chi) = p(kq | ++) - (1/4) sum_nm p(kq | nm); the four values sum
    to zero because chi is traceless.
    """
    missing = table.missing(BASIS_LABELS + ("++",))
    if missing:
        raise ValidationError(f"probability table is missing required row(s) {missing}")
    basis_mean = sum(table.rows[label] for label in BASIS_LABELS) / 4.0
    return table.rows["++"] - basis_mean


def initial_exp_moment(psi0: np.ndarray, hamiltonian: LocalHamiltonian) -> float:
    """Tr[e^H |psi0><psi0|] = sum_k e^{E_k} |a_k|^2."""
    psi0 = np.asarray(psi0, dtype=complex)
    return float(np.sum((psi0.real**2 + psi0.imag**2) * hamiltonian.exp_diag(1.0)))


def g_chi_from_table(
    table: ProbabilityTable,
    hamiltonian: LocalHamiltonian,
    initial_moment: float | None = None,
) -> float:
    """Coherence contribution to the characteristic function at u = i.

    Returns initial_moment * sum_kq e^{-E_kq} p(kq; chi). The default
    initial moment is the one of the |++> input, cosh(1)^2.
    """
    if initial_moment is None:
        initial_moment = initial_exp_moment(plus_plus_state(), hamiltonian)
    populations = chi_populations(table)
    return float(initial_moment * np.sum(hamiltonian.exp_diag(-1.0) * populations))


def eta_kernel_from_tables(
    measured: ProbabilityTable,
    ideal: ProbabilityTable,
    hamiltonian: LocalHamiltonian,
    initial_moment: float | None = None,
) -> float:
    """|G_chi(i; measured) - G_chi(i; ideal)| from two five-row tables."""
    return abs(
        g_chi_from_table(measured, hamiltonian, initial_moment)
        - g_chi_from_table(ideal, hamiltonian, initial_moment)
    )


def schmidt_rank(psi: np.ndarray, atol: float = 1e-12) -> int:
    """Schmidt rank of a two-qubit state vector."""
    singular = np.linalg.svd(np.asarray(psi, dtype=complex).reshape(2, 2), compute_uv=False)
    return int(np.sum(singular > atol))


@dataclass(frozen=True)
class ProtocolPlan:
    """Ordered list of labelled input states for tensor reconstruction."""

    kind: str
    states: tuple[tuple[str, np.ndarray], ...]
    phase_theta: float = math.pi / 2

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.states)


def _pair_state(i: int, j: int, coefficient: complex) -> np.ndarray:
    psi = np.zeros(4, dtype=complex)
    psi[i] = coefficient
    psi[j] = 1.0
    return psi / math.sqrt(2)


def protocol_plan(kind: str, phase_theta: float = math.pi / 2) -> ProtocolPlan:
    """Input-state plan for reconstructing the transition tensor.

    "straightforward": the 4 basis states plus, for every basis pair i < j,
    (|i> + |j>)/sqrt(2) and (i|i> + |j>)/sqrt(2); 16 states, some of them
    entangled across the two qubits.

    "separable": the 4 basis states, the 8 single-factor superpositions
    (|aa> + |ab>)/sqrt(2), (|aa> + |ba>)/sqrt(2), (|aa> - i|ab>)/sqrt(2),
    (|aa> - i|ba>)/sqrt(2), the |++> state and one product phase state
    (i|0> + |1>)(e^{i phase_theta}|0> + |1>)/2; 14 states, all separable.
    The default phase_theta = pi/2 makes the phase-state row read out the
    difference of the two real parts that |++> only provides the sum of.
    """
    states: list[tuple[str, np.ndarray]] = [
        (label, basis_state(4, i)) for i, label in enumerate(BASIS_LABELS)
    ]
    if kind == "straightforward":
        for i in range(4):
            for j in range(i + 1, 4):
                li, lj = BASIS_LABELS[i], BASIS_LABELS[j]
                states.append((f"{li}+{lj}", _pair_state(i, j, 1.0)))
                states.append((f"i{li}+{lj}", _pair_state(i, j, 1j)))
    elif kind == "separable":
        separable_pairs = ((0, 1), (0, 2), (3, 2), (3, 1))
        for i, j in separable_pairs:
            states.append((f"{BASIS_LABELS[i]}+{BASIS_LABELS[j]}", _pair_state(i, j, 1.0)))
        for i, j in separable_pairs:
            psi = np.zeros(4, dtype=complex)
            psi[i] = 1.0
            psi[j] = -1j
            states.append((f"{BASIS_LABELS[i]}-i{BASIS_LABELS[j]}", psi / math.sqrt(2)))
        states.append(("++", plus_plus_state()))
        phase = np.exp(1j * phase_theta)
        states.append(("phase", 0.5 * np.array([1j * phase, 1j, phase, 1.0])))
    else:
        raise ValidationError(f"unknown protocol kind {kind!r}")
    return ProtocolPlan(kind=kind, states=tuple(states), phase_theta=phase_theta)


@dataclass(frozen=True)
class TransitionTensor:
    """The 64 numbers <j| V^dag P_a V |i> for the four outcome projectors.

    entries[a, j, i] is Hermitian in (j, i) for each a, the diagonals are
    outcome probabilities of basis inputs and the tensor sums to the
    identity over a. `residual` is the worst least-squares residual norm
    of the reconstruction (zero for exact synthetic data).
    """

    entries: np.ndarray
    residual: float = 0.0


def transition_tensor_from_unitary(v: np.ndarray) -> TransitionTensor:
    """Direct tensor of a known unitary: entries[a, j, i] = conj(V[a, j]) V[a, i]."""
    v = np.asarray(v, dtype=complex)
    entries = v.conj()[:, :, None] * v[:, None, :]
    return TransitionTensor(entries=entries)


def _design_row(amplitudes: np.ndarray) -> np.ndarray:
    """Coefficients of <psi| M |psi> in the 16 real parameters of Hermitian M."""
    row = np.zeros(16)
    row[:4] = amplitudes.real**2 + amplitudes.imag**2
    for p, (i, j) in enumerate(_PAIRS):
        cross = np.conj(amplitudes[i]) * amplitudes[j]
        row[4 + 2 * p] = 2 * cross.real
        row[5 + 2 * p] = -2 * cross.imag
    return row


def _assemble(x: np.ndarray) -> np.ndarray:
    m = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        m[i, i] = x[i]
    for p, (i, j) in enumerate(_PAIRS):
        m[i, j] = x[4 + 2 * p] + 1j * x[5 + 2 * p]
        m[j, i] = np.conj(m[i, j])
    return m


def _complete_rank_one(m: np.ndarray, flags: list[str]) -> None:
    """Fill the two imaginary parts the separable plan cannot observe.

    For a unitary gate each outcome matrix is the rank-1 outer product of a
    row of V, so |u_p|^2 T[i, j] = T[i, p] T[p, j] for any pivot p. The
    separable input states determine everything except Im T[0, 3] and
    Im T[1, 2]; those follow from the pivot relation using the larger of
    the two admissible pivot diagonals.
    """
    for (i, j), pivots in (((0, 3), (1, 2)), ((1, 2), (0, 3))):
        p = max(pivots, key=lambda q: m[q, q].real)
        weight = m[p, p].real
        if weight <= 1e-12:
            flags.append(
                f"pivot populations vanish for entry ({i},{j}); imaginary part left at 0"
            )
            continue
        imag = (m[i, p] * m[p, j]).imag / weight
        m[i, j] = m[i, j].real + 1j * imag
        m[j, i] = np.conj(m[i, j])


def transition_tensor_from_tables(plan: ProtocolPlan, table: ProbabilityTable) -> TransitionTensor:
    """Solve the per-outcome linear systems relating plan states to probabilities.

    Basis rows pin the diagonals, the two-term superpositions pin real and
    imaginary parts of the off-diagonals, and (for the separable plan) the
    |++> and phase rows pin the sum and difference of the two remaining
    real parts; the matching imaginary parts are completed through the
    rank-1 structure of unitary dynamics. Overdetermined or inconsistent
    tables are resolved by least squares and the residual is reported.
    """
    missing = table.missing(plan.labels)
    if missing:
        raise ValidationError(f"probability table is missing required row(s) {missing}")
    design = np.vstack([_design_row(state) for _, state in plan.states])
    outcomes = np.vstack([table.rows[label] for label, _ in plan.states])

    entries = np.zeros((4, 4, 4), dtype=complex)
    worst_residual = 0.0
    flags: list[str] = []
    for alpha in range(4):
        x, _, _, _ = np.linalg.lstsq(design, outcomes[:, alpha], rcond=None)
        worst_residual = max(worst_residual, float(np.linalg.norm(design @ x - outcomes[:, alpha])))
        m = _assemble(x)
        if plan.kind == "separable":
            _complete_rank_one(m, flags)
        # entries[a, j, i] = <j| M |i> = M[j, i]
        entries[alpha] = m
    table.flags.extend(flags)
    return TransitionTensor(entries=entries, residual=worst_residual)


def char_fn_from_tensor(
    psi0: np.ndarray, tensor: TransitionTensor, hamiltonian: LocalHamiltonian
) -> float:
    """Final-energy moment sum_a e^{-E_a} <psi0| V^dag P_a V |psi0> by post-processing."""
    a = np.asarray(psi0, dtype=complex)
    weights = hamiltonian.exp_diag(-1.0)
    total = 0.0
    for alpha in range(4):
        total += weights[alpha] * float(np.real(a.conj() @ tensor.entries[alpha] @ a))
    return total


def load_probability_table(
    source,
    sum_tolerance: float = 0.02,
    renormalize: bool = False,
) -> ProbabilityTable:
    """Parse a probability-table CSV (header ``input,p00,p01,p10,p11``).

    ``#`` lines are comments; ``# key = value`` comments become table
    metadata. Rows with probabilities outside [0, 1] or sums off 1 beyond
    `sum_tolerance` are flagged (and renormalized when `renormalize` is
    set), never rejected: counting data is allowed to be noisy. Structural
    problems (bad header, wrong field count, non-numeric values) raise
    ParseError with the line number; duplicate labels raise ValidationError.
    """
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    elif isinstance(source, bytes):
        text = source.decode("utf-8")
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")

    rows: dict[str, np.ndarray] = {}
    metadata: dict[str, float] = {}
    flags: list[str] = []
    header_seen = False
    for line_no, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if "=" in body:
                key, _, value = body.partition("=")
                try:
                    metadata[key.strip()] = float(value.strip())
                except ValueError:
                    pass
            continue
        fields = [f.strip() for f in line.split(",")]
        if not header_seen:
            expected = ["input", *OUTCOME_COLUMNS]
            if fields != expected:
                raise ParseError(
                    f"bad header {fields!r}, expected {expected!r}", line=line_no
                )
            header_seen = True
            continue
        if len(fields) != 5:
            raise ParseError(f"expected 5 comma-separated fields, got {len(fields)}", line=line_no)
        label = fields[0]
        if label in rows:
            raise ValidationError(f"duplicate input label {label!r}")
        try:
            values = np.array([float(f) for f in fields[1:]])
        except ValueError as exc:
            raise ParseError(f"non-numeric probability: {exc}", line=line_no) from None
        if float(values.min()) < -1e-9 or float(values.max()) > 1 + 1e-9:
            flags.append(f"row {label!r} has probabilities outside [0, 1]")
        row_sum = float(values.sum())
        if abs(row_sum - 1.0) > sum_tolerance:
            flags.append(f"row {label!r} sums to {row_sum!r}, outside tolerance {sum_tolerance}")
        if renormalize and row_sum != 0 and abs(row_sum - 1.0) > 1e-12:
            values = values / row_sum
        rows[label] = values
    if not header_seen:
        raise ParseError("missing header line 'input,p00,p01,p10,p11'", line=1)
    return ProbabilityTable(
        rows=rows, sum_tolerance=sum_tolerance, metadata=metadata, flags=flags
    )


def write_probability_table(
    table: ProbabilityTable, path, metadata: dict | None = None
) -> None:
    """Write a table to CSV, metadata (and the table's own) as ``# key = value``."""
    lines = []
    merged = dict(table.metadata)
    merged.update(metadata or {})
    for key, value in merged.items():
        lines.append(f"# {key} = {value!r}")
    lines.append("input," + ",".join(OUTCOME_COLUMNS))
    for label, values in table.rows.items():
        lines.append(label + "," + ",".join(repr(float(v)) for v in values))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
