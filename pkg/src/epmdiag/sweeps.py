"""Parameter sweeps over (theta, phi) grids and the figure presets.

A sweep evaluates Haar-averaged merits on a rectangular grid of ideal gate
angle theta and error parameter phi. Randomness is derived per (grid
point, merit) from the master seed, so results are independent of worker
count and scheduling, and output files are byte-identical across runs.
"""
from __future__ import annotations

import concurrent.futures
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .energetics import local_hamiltonian_2q
from .errors import ValidationError
from .gates import g_gate, v_angle, v_axis
from .linalg import plus_plus_state
from .merit import MERIT_ORDINAL, MeritKind, haar_average, kernel_coherence_fid
from .reconstruct import (
    BASIS_LABELS,
    ProbabilityTable,
    eta_kernel_from_tables,
    chi_populations,
    g_chi_from_table,
    gate_probability_table,
    write_probability_table,
)
from .version import __version__

ERROR_FAMILIES = {"axis": v_axis, "angle": v_angle}

DEFAULT_SAMPLES = 5000
DEFAULT_RESOLUTION = 41

FIG1_PANELS = {
    "a": ("axis", MeritKind.COHERENCE_FIDELITY),
    "b": ("axis", MeritKind.ETA_CHI),
    "c": ("angle", MeritKind.COHERENCE_FIDELITY),
    "d": ("angle", MeritKind.ETA_CHI),
}


def default_phi_range(error_family: str) -> tuple[float, float]:
    """Sweep range of the error parameter: [0, pi] for axis, [0, 2 pi] for angle."""
    if error_family == "axis":
        return (0.0, math.pi)
    if error_family == "angle":
        return (0.0, 2 * math.pi)
    raise ValidationError(f"unknown error family {error_family!r}")


@dataclass(frozen=True)
class SweepConfig:
    """Full description of one sweep; everything needed to reproduce it."""

    error_family: str = "axis"
    theta_lo: float = 0.0
    theta_hi: float = math.pi
    theta_points: int = DEFAULT_RESOLUTION
    phi_lo: float | None = None
    phi_hi: float | None = None
    phi_points: int = DEFAULT_RESOLUTION
    merits: tuple[MeritKind, ...] = (MeritKind.COHERENCE_FIDELITY, MeritKind.ETA_CHI)
    n_samples: int = DEFAULT_SAMPLES
    master_seed: int = 0

    def validate(self) -> "SweepConfig":
        if self.error_family not in ERROR_FAMILIES:
            raise ValidationError(f"unknown error family {self.error_family!r}")
        if self.theta_points < 1 or self.phi_points < 1:
            raise ValidationError("grid point counts must be >= 1")
        if self.n_samples < 1:
            raise ValidationError("n_samples must be >= 1")
        if not self.merits:
            raise ValidationError("at least one merit must be requested")
        bounds = (self.theta_lo, self.theta_hi) + self.phi_bounds()
        if not all(math.isfinite(x) for x in bounds):
            raise ValidationError("sweep ranges must be finite")
        return self

    def phi_bounds(self) -> tuple[float, float]:
        if self.phi_lo is None or self.phi_hi is None:
            lo, hi = default_phi_range(self.error_family)
            return (self.phi_lo if self.phi_lo is not None else lo,
                    self.phi_hi if self.phi_hi is not None else hi)
        return (self.phi_lo, self.phi_hi)

    def thetas(self) -> np.ndarray:
        return np.linspace(self.theta_lo, self.theta_hi, self.theta_points)

    def phis(self) -> np.ndarray:
        lo, hi = self.phi_bounds()
        return np.linspace(lo, hi, self.phi_points)


@dataclass(frozen=True)
class SweepRecord:
    theta: float
    phi: float
    merit: str
    mean: float
    std_error: float
    n_samples: int


@dataclass
class SweepResult:
    """Grid of Haar averages plus the metadata to regenerate them."""

    config: SweepConfig
    records: list[SweepRecord] = field(default_factory=list)

    def surface(self, kind: MeritKind, which: str = "mean") -> np.ndarray:
        """(theta_points, phi_points) array of means or std errors for one merit."""
        values = [getattr(r, which) for r in self.records if r.merit == kind.value]
        if len(values) != self.config.theta_points * self.config.phi_points:
            raise ValidationError(f"sweep does not contain a full {kind.value} surface")
        return np.array(values).reshape(self.config.theta_points, self.config.phi_points)

    def metadata(self) -> dict:
        phi_lo, phi_hi = self.config.phi_bounds()
        return {
            "tool": "epmdiag",
            "version": __version__,
            "kind": "sweep",
            "error_family": self.config.error_family,
            "theta": {"lo": self.config.theta_lo, "hi": self.config.theta_hi,
                      "points": self.config.theta_points},
            "phi": {"lo": phi_lo, "hi": phi_hi, "points": self.config.phi_points},
            "merits": [m.value for m in self.config.merits],
            "n_samples": self.config.n_samples,
            "master_seed": self.config.master_seed,
            "grid_points": self.config.theta_points * self.config.phi_points,
        }


def point_seed(master_seed: int, grid_index: int, kind: MeritKind) -> int:
    """Derive the integer substream seed for one (grid point, merit) pair."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(grid_index, MERIT_ORDINAL[kind]))
    return int(seq.generate_state(1, np.uint64)[0])


def _evaluate_point(payload) -> list[tuple[float, float]]:
    family, theta, phi, merit_names, n_samples, seeds = payload
    u = g_gate(theta)
    v = ERROR_FAMILIES[family](theta, phi)
    hamiltonian = local_hamiltonian_2q()
    out = []
    for name, seed in zip(merit_names, seeds):
        avg = haar_average(MeritKind.from_name(name), u, v, hamiltonian,
                           n_samples=n_samples, seed=seed)
        out.append((avg.mean, avg.std_error))
    return out


def run_sweep(config: SweepConfig, workers: int = 1) -> SweepResult:
    """Evaluate every requested merit on the configured (theta, phi) grid.

    Workers > 1 fan grid points out to a process pool; per-point seeds make
    the result identical for any worker count.
    """
    config.validate()
    thetas = config.thetas()
    phis = config.phis()
    merit_names = [m.value for m in config.merits]

    payloads = []
    grid = []
    for i, theta in enumerate(thetas):
        for j, phi in enumerate(phis):
            gi = i * len(phis) + j
            seeds = [point_seed(config.master_seed, gi, m) for m in config.merits]
            payloads.append((config.error_family, float(theta), float(phi),
                             merit_names, config.n_samples, seeds))
            grid.append((float(theta), float(phi)))

    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate_point, payloads, chunksize=16))
    else:
        results = [_evaluate_point(p) for p in payloads]

    records = []
    for (theta, phi), point_values in zip(grid, results):
        for kind, (mean, std_error) in zip(config.merits, point_values):
            records.append(SweepRecord(theta=theta, phi=phi, merit=kind.value,
                                       mean=mean, std_error=std_error,
                                       n_samples=config.n_samples))
    return SweepResult(config=config, records=records)


def preset_fig1(
    panel: str,
    resolution: int = DEFAULT_RESOLUTION,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    workers: int = 1,
) -> SweepResult:
    """One of the four standard surfaces: coherence mismatch or eta_chi
    against (theta, phi) for the axis (panels a, b) or angle (c, d) error."""
    if panel not in FIG1_PANELS:
        raise ValidationError(f"unknown panel {panel!r}, expected one of {sorted(FIG1_PANELS)}")
    family, merit = FIG1_PANELS[panel]
    config = SweepConfig(
        error_family=family,
        theta_points=resolution,
        phi_points=resolution,
        merits=(merit,),
        n_samples=n_samples,
        master_seed=seed,
    )
    return run_sweep(config, workers=workers)


@dataclass
class Fig3Curves:
    """Theory curves of the single-state diagnostics at fixed phi.

    Conditional probabilities for the five standard inputs, plus the
    |++>-state eta_chi kernel and coherence-mismatch kernel (raw and
    max-normalized) as functions of theta.
    """

    thetas: np.ndarray
    phi: float
    probabilities: dict[str, np.ndarray]  # input label -> (n_theta, 4)
    eta_chi_kernel: np.ndarray
    coherence_kernel: np.ndarray
    eta_chi_kernel_norm: np.ndarray
    coherence_kernel_norm: np.ndarray


def max_normalize(values: np.ndarray) -> np.ndarray:
    """Scale a curve to unit maximum; an all-zero curve stays zero."""
    values = np.asarray(values, dtype=float)
    peak = float(np.max(np.abs(values))) if values.size else 0.0
    return values / peak if peak > 0 else values.copy()


def preset_fig3(theta_points: int = 50, phi: float = math.pi / 9) -> Fig3Curves:
    """Single-state diagnostics for the axis error on theta in [0, pi/4]."""
    thetas = np.linspace(0.0, math.pi / 4, theta_points)
    hamiltonian = local_hamiltonian_2q()
    psi_pp = plus_plus_state()
    labels = BASIS_LABELS + ("++",)
    probabilities = {label: np.zeros((theta_points, 4)) for label in labels}
    eta = np.zeros(theta_points)
    coh = np.zeros(theta_points)
    for i, theta in enumerate(thetas):
        u = g_gate(theta)
        v = v_axis(theta, phi)
        measured = gate_probability_table(v)
        ideal = gate_probability_table(u)
        for label in labels:
            probabilities[label][i] = measured.rows[label]
        eta[i] = eta_kernel_from_tables(measured, ideal, hamiltonian)
        coh[i] = kernel_coherence_fid(psi_pp, u, v)
    return Fig3Curves(
        thetas=thetas,
        phi=phi,
        probabilities=probabilities,
        eta_chi_kernel=eta,
        coherence_kernel=coh,
        eta_chi_kernel_norm=max_normalize(eta),
        coherence_kernel_norm=max_normalize(coh),
    )


@dataclass
class ReconstructionRow:
    theta: float
    chi_pops: np.ndarray
    g_chi_measured: float
    g_chi_ideal: float
    eta_kernel: float
    coherence_kernel: float | None
    max_row_sum_error: float


@dataclass
class ReconstructionReport:
    """Per-theta coherence diagnostics recovered from probability tables."""

    rows: list[ReconstructionRow]
    error_family: str
    phi: float | None
    flags: list[str] = field(default_factory=list)

    def eta_curve(self) -> np.ndarray:
        return np.array([r.eta_kernel for r in self.rows])

    def coherence_curve(self) -> np.ndarray:
        return np.array([math.nan if r.coherence_kernel is None else r.coherence_kernel
                         for r in self.rows])


def run_reconstruction(
    measured: list[tuple[float, ProbabilityTable]],
    ideal: list[tuple[float, ProbabilityTable]] | None = None,
    phi: float | None = None,
    error_family: str = "axis",
) -> ReconstructionReport:
    """Recover chi populations, G_chi and the eta_chi kernel per theta point.

    `measured` pairs each table with its theta. When `ideal` is None the
    ideal tables are synthesized from the perfect gate at each theta. A
    theory coherence-mismatch curve is included when phi is given.
    """
    if error_family not in ERROR_FAMILIES:
        raise ValidationError(f"unknown error family {error_family!r}")
    hamiltonian = local_hamiltonian_2q()
    psi_pp = plus_plus_state()
    measured = sorted(measured, key=lambda pair: pair[0])
    if ideal is None:
        ideal_map = {theta: gate_probability_table(g_gate(theta)) for theta, _ in measured}
    else:
        ideal_map = {theta: table for theta, table in ideal}
    rows = []
    flags: list[str] = []
    for theta, table in measured:
        if theta not in ideal_map:
            raise ValidationError(f"no ideal table for theta = {theta!r}")
        ideal_table = ideal_map[theta]
        pops = chi_populations(table)
        g_measured = g_chi_from_table(table, hamiltonian)
        g_ideal = g_chi_from_table(ideal_table, hamiltonian)
        coherence = None
        if phi is not None:
            noisy_gate = ERROR_FAMILIES[error_family](theta, phi)
            coherence = kernel_coherence_fid(psi_pp, g_gate(theta), noisy_gate)
        row_errors = [abs(float(np.sum(values)) - 1.0) for values in table.rows.values()]
        rows.append(ReconstructionRow(
            theta=theta,
            chi_pops=pops,
            g_chi_measured=g_measured,
            g_chi_ideal=g_ideal,
            eta_kernel=abs(g_measured - g_ideal),
            coherence_kernel=coherence,
            max_row_sum_error=max(row_errors),
        ))
        flags.extend(f"theta {theta!r}: {flag}" for flag in table.flags)
    return ReconstructionReport(rows=rows, error_family=error_family, phi=phi, flags=flags)


def write_synthetic_tables(directory, thetas, phi: float, error_family: str = "axis") -> list[Path]:
    """Write one five-row CSV per theta for the noisy gate; returns the paths.

    Each file carries ``# theta`` / ``# phi`` metadata comments so that the
    reconstruction runner can recover the sweep variable.
    """
    if error_family not in ERROR_FAMILIES:
        raise ValidationError(f"unknown error family {error_family!r}")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, theta in enumerate(thetas):
        table = gate_probability_table(ERROR_FAMILIES[error_family](theta, phi))
        path = directory / f"table_{i:03d}.csv"
        write_probability_table(table, path, metadata={"theta": float(theta), "phi": float(phi)})
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# Writers. Floats are rendered with repr() so identical results produce
# byte-identical files.
# ---------------------------------------------------------------------------

def _fmt(value: float) -> str:
    return repr(float(value))


def _write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".meta.json")


def sweep_records_json(result: SweepResult) -> dict:
    return {
        "metadata": result.metadata(),
        "records": [
            {"theta": r.theta, "phi": r.phi, "merit": r.merit, "mean": r.mean,
             "std_error": r.std_error, "n_samples": r.n_samples}
            for r in result.records
        ],
    }


def write_sweep(result: SweepResult, path, output_format: str = "csv") -> list[Path]:
    """Write a sweep as long-format CSV (+ JSON sidecar) or as one JSON file."""
    path = Path(path)
    if output_format == "json":
        _write_text(path, json.dumps(sweep_records_json(result), indent=2) + "\n")
        return [path]
    if output_format != "csv":
        raise ValidationError(f"unknown output format {output_format!r}")
    lines = ["theta,phi,merit,mean,std_error,n_samples"]
    for r in result.records:
        lines.append(
            f"{_fmt(r.theta)},{_fmt(r.phi)},{r.merit},{_fmt(r.mean)},"
            f"{_fmt(r.std_error)},{r.n_samples}"
        )
    _write_text(path, "\n".join(lines) + "\n")
    sidecar = _sidecar_path(path)
    _write_text(sidecar, json.dumps(result.metadata(), indent=2) + "\n")
    return [path, sidecar]


def fig3_series(curves: Fig3Curves) -> list[tuple[str, np.ndarray]]:
    """Flatten the fig3 curves into (series name, values) pairs."""
    series = []
    for label in (*BASIS_LABELS, "++"):
        for col, outcome in enumerate(BASIS_LABELS):
            series.append((f"p({outcome}|{label})", curves.probabilities[label][:, col]))
    series.append(("eta_chi_kernel", curves.eta_chi_kernel))
    series.append(("coherence_kernel", curves.coherence_kernel))
    series.append(("eta_chi_kernel_max_norm", curves.eta_chi_kernel_norm))
    series.append(("coherence_kernel_max_norm", curves.coherence_kernel_norm))
    return series


def write_fig3(curves: Fig3Curves, path, output_format: str = "csv") -> list[Path]:
    """Write the fig3 curves as long-format theta,series,value rows."""
    path = Path(path)
    metadata = {"tool": "epmdiag", "version": __version__, "kind": "fig3",
                "phi": curves.phi, "theta_points": int(curves.thetas.size)}
    series = fig3_series(curves)
    if output_format == "json":
        doc = {
            "metadata": metadata,
            "thetas": [float(t) for t in curves.thetas],
            "series": {name: [float(v) for v in values] for name, values in series},
        }
        _write_text(path, json.dumps(doc, indent=2) + "\n")
        return [path]
    if output_format != "csv":
        raise ValidationError(f"unknown output format {output_format!r}")
    lines = ["theta,series,value"]
    for i, theta in enumerate(curves.thetas):
        for name, values in series:
            lines.append(f"{_fmt(theta)},{name},{_fmt(values[i])}")
    _write_text(path, "\n".join(lines) + "\n")
    sidecar = _sidecar_path(path)
    _write_text(sidecar, json.dumps(metadata, indent=2) + "\n")
    return [path, sidecar]


def write_reconstruction(report: ReconstructionReport, path, output_format: str = "csv") -> list[Path]:
    """Write a reconstruction report; empty coherence column when phi unknown."""
    path = Path(path)
    metadata = {"tool": "epmdiag", "version": __version__, "kind": "reconstruction",
                "error_family": report.error_family, "phi": report.phi,
                "theta_points": len(report.rows), "flags": report.flags}
    eta_norm = max_normalize(report.eta_curve())
    coh_curve = report.coherence_curve()
    coh_norm = max_normalize(np.nan_to_num(coh_curve)) if report.phi is not None else coh_curve
    if output_format == "json":
        doc = {"metadata": metadata, "rows": []}
        for i, row in enumerate(report.rows):
            doc["rows"].append({
                "theta": row.theta,
                "chi_populations": [float(p) for p in row.chi_pops],
                "g_chi_measured": row.g_chi_measured,
                "g_chi_ideal": row.g_chi_ideal,
                "eta_chi_kernel": row.eta_kernel,
                "eta_chi_kernel_max_norm": float(eta_norm[i]),
                "coherence_kernel": row.coherence_kernel,
                "coherence_kernel_max_norm": None if report.phi is None else float(coh_norm[i]),
                "max_row_sum_error": row.max_row_sum_error,
            })
        _write_text(path, json.dumps(doc, indent=2) + "\n")
        return [path]
    if output_format != "csv":
        raise ValidationError(f"unknown output format {output_format!r}")
    lines = ["theta,p_chi_00,p_chi_01,p_chi_10,p_chi_11,g_chi_measured,g_chi_ideal,"
             "eta_chi_kernel,eta_chi_kernel_max_norm,coherence_kernel,"
             "coherence_kernel_max_norm,max_row_sum_error"]
    for i, row in enumerate(report.rows):
        coherence = "" if row.coherence_kernel is None else _fmt(row.coherence_kernel)
        coherence_n = "" if report.phi is None else _fmt(coh_norm[i])
        lines.append(",".join([
            _fmt(row.theta),
            *(_fmt(p) for p in row.chi_pops),
            _fmt(row.g_chi_measured),
            _fmt(row.g_chi_ideal),
            _fmt(row.eta_kernel),
            _fmt(eta_norm[i]),
            coherence,
            coherence_n,
            _fmt(row.max_row_sum_error),
        ]))
    _write_text(path, "\n".join(lines) + "\n")
    sidecar = _sidecar_path(path)
    _write_text(sidecar, json.dumps(metadata, indent=2) + "\n")
    return [path, sidecar]
