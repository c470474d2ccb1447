"""Command-line front end.

Subcommands: sweep, fig1, fig3, reconstruct, protocol, haar-avg.
Exit codes: 0 success, 2 validation error, 3 I/O error, 4 parse error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .energetics import local_hamiltonian_2q
from .errors import ParseError, ValidationError
from .gates import g_gate, waveplate_settings
from .merit import MeritKind, haar_average
from .reconstruct import load_probability_table, protocol_plan, schmidt_rank
from .sweeps import (
    DEFAULT_RESOLUTION,
    DEFAULT_SAMPLES,
    ERROR_FAMILIES,
    SweepConfig,
    preset_fig1,
    preset_fig3,
    run_reconstruction,
    run_sweep,
    write_fig3,
    write_reconstruction,
    write_sweep,
)
from .version import __version__

_MERIT_NAMES = [kind.value for kind in MeritKind]


def _add_common(parser: argparse.ArgumentParser, samples: bool = True) -> None:
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    if samples:
        parser.add_argument("--samples", type=int, default=DEFAULT_SAMPLES,
                            help="Haar samples per grid point")
    parser.add_argument("--out", default=None, help="output file path")
    parser.add_argument("--format", choices=("csv", "json"), default="csv",
                        dest="output_format", help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epmdiag",
        description="Diagnose coherent errors of two-qubit controlled gates "
                    "from end-point energy-measurement statistics.",
    )
    parser.add_argument("--version", action="version", version=f"epmdiag {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="Haar-averaged merits on a (theta, phi) grid")
    p.add_argument("--error", choices=sorted(ERROR_FAMILIES), default="axis")
    p.add_argument("--theta-range", type=float, nargs=2, default=(0.0, math.pi),
                   metavar=("LO", "HI"))
    p.add_argument("--phi-range", type=float, nargs=2, default=None, metavar=("LO", "HI"))
    p.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION,
                   help="points per grid axis")
    p.add_argument("--merit", action="append", choices=_MERIT_NAMES, default=None,
                   help="merit to average (repeatable)")
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("fig1", help="one of the four standard merit surfaces")
    p.add_argument("--panel", choices=("a", "b", "c", "d"), required=True)
    p.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("fig3", help="single-state theory curves at fixed phi")
    p.add_argument("--theta-points", type=int, default=50)
    p.add_argument("--phi", type=float, default=math.pi / 9)
    _add_common(p, samples=False)

    p = sub.add_parser("reconstruct", help="coherence diagnostics from probability tables")
    p.add_argument("--measured", nargs="+", required=True, metavar="CSV",
                   help="measured probability-table CSV files, one per theta")
    p.add_argument("--ideal", nargs="+", default=None, metavar="CSV",
                   help="ideal tables; omitted = synthesize from the perfect gate")
    p.add_argument("--thetas", type=float, nargs="+", default=None,
                   help="theta per measured file (else read '# theta =' metadata)")
    p.add_argument("--phi", type=float, default=None,
                   help="error parameter, enables the theory coherence curve")
    p.add_argument("--error", choices=sorted(ERROR_FAMILIES), default="axis")
    p.add_argument("--sum-tolerance", type=float, default=0.02)
    p.add_argument("--renormalize", action="store_true",
                   help="renormalize rows whose sum deviates from 1")
    _add_common(p, samples=False)

    p = sub.add_parser("protocol", help="export reconstruction input states as JSON")
    p.add_argument("--kind", choices=("straightforward", "separable"), required=True)
    p.add_argument("--phase-theta", type=float, default=math.pi / 2)
    p.add_argument("--theta", type=float, default=None,
                   help="gate angle for waveplate settings")
    p.add_argument("--phi", type=float, default=None,
                   help="error parameter for waveplate settings")
    p.add_argument("--out", default=None)

    p = sub.add_parser("haar-avg", help="Haar-averaged merits at a single (theta, phi)")
    p.add_argument("--error", choices=sorted(ERROR_FAMILIES), default="axis")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--merit", action="append", choices=_MERIT_NAMES, default=None)
    _add_common(p)

    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")


def _cmd_sweep(args) -> None:
    merits = tuple(MeritKind.from_name(m) for m in (args.merit or
                   ["coherence_fidelity", "eta_chi"]))
    phi_lo, phi_hi = (args.phi_range if args.phi_range is not None else (None, None))
    config = SweepConfig(
        error_family=args.error,
        theta_lo=args.theta_range[0], theta_hi=args.theta_range[1],
        theta_points=args.resolution,
        phi_lo=phi_lo, phi_hi=phi_hi, phi_points=args.resolution,
        merits=merits, n_samples=args.samples, master_seed=args.seed,
    )
    result = run_sweep(config, workers=args.workers)
    if args.out is None:
        raise ValidationError("sweep requires --out")
    for path in write_sweep(result, args.out, args.output_format):
        print(f"wrote {path}")


def _cmd_fig1(args) -> None:
    result = preset_fig1(args.panel, resolution=args.resolution,
                         n_samples=args.samples, seed=args.seed, workers=args.workers)
    if args.out is None:
        raise ValidationError("fig1 requires --out")
    for path in write_sweep(result, args.out, args.output_format):
        print(f"wrote {path}")


def _cmd_fig3(args) -> None:
    curves = preset_fig3(theta_points=args.theta_points, phi=args.phi)
    if args.out is None:
        raise ValidationError("fig3 requires --out")
    for path in write_fig3(curves, args.out, args.output_format):
        print(f"wrote {path}")


def _cmd_reconstruct(args) -> None:
    tables = [load_probability_table(path, sum_tolerance=args.sum_tolerance,
                                     renormalize=args.renormalize)
              for path in args.measured]
    if args.thetas is not None:
        if len(args.thetas) != len(tables):
            raise ValidationError(
                f"{len(args.measured)} measured files but {len(args.thetas)} --thetas values"
            )
        thetas = list(args.thetas)
    else:
        thetas = []
        for path, table in zip(args.measured, tables):
            if "theta" not in table.metadata:
                raise ValidationError(
                    f"{path} carries no '# theta =' metadata; pass --thetas explicitly"
                )
            thetas.append(table.metadata["theta"])
    measured = list(zip(thetas, tables))
    ideal = None
    if args.ideal is not None:
        if len(args.ideal) != len(args.measured):
            raise ValidationError("--ideal must list one file per measured file")
        ideal_tables = [load_probability_table(path, sum_tolerance=args.sum_tolerance,
                                               renormalize=args.renormalize)
                        for path in args.ideal]
        ideal = list(zip(thetas, ideal_tables))
    phi = args.phi
    if phi is None:
        phis = {t.metadata["phi"] for t in tables if "phi" in t.metadata}
        phi = phis.pop() if len(phis) == 1 else None
    report = run_reconstruction(measured, ideal=ideal, phi=phi, error_family=args.error)
    if args.out is None:
        raise ValidationError("reconstruct requires --out")
    for path in write_reconstruction(report, args.out, args.output_format):
        print(f"wrote {path}")
    for flag in report.flags:
        print(f"warning: {flag}", file=sys.stderr)


def _cmd_protocol(args) -> None:
    plan = protocol_plan(args.kind, phase_theta=args.phase_theta)
    doc = {
        "kind": plan.kind,
        "phase_theta": plan.phase_theta,
        "states": [
            {
                "label": label,
                "amplitudes": [[float(a.real), float(a.imag)] for a in state],
                "separable": schmidt_rank(state) == 1,
            }
            for label, state in plan.states
        ],
        "waveplate_settings": None,
    }
    if args.theta is not None and args.phi is not None:
        settings = waveplate_settings(args.theta, args.phi)
        doc["waveplate_settings"] = {
            "hwp_s1": settings.hwp_s1, "hwp_s2": settings.hwp_s2,
            "qwp_s1": settings.qwp_s1, "qwp_s2": settings.qwp_s2,
        }
    _emit(json.dumps(doc, indent=2) + "\n", args.out)


def _cmd_haar_avg(args) -> None:
    merits = [MeritKind.from_name(m) for m in (args.merit or ["coherence_fidelity", "eta_chi"])]
    u = g_gate(args.theta)
    v = ERROR_FAMILIES[args.error](args.theta, args.phi)
    hamiltonian = local_hamiltonian_2q()
    rows = []
    for kind in merits:
        avg = haar_average(kind, u, v, hamiltonian, n_samples=args.samples, seed=args.seed)
        rows.append({"merit": kind.value, "mean": avg.mean, "std_error": avg.std_error,
                     "n_samples": avg.n_samples, "seed": avg.master_seed})
    if args.output_format == "json":
        text = json.dumps({"theta": args.theta, "phi": args.phi, "error_family": args.error,
                           "results": rows}, indent=2) + "\n"
    else:
        lines = ["merit,mean,std_error,n_samples,seed"]
        for row in rows:
            lines.append(f"{row['merit']},{row['mean']!r},{row['std_error']!r},"
                         f"{row['n_samples']},{row['seed']}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)


_COMMANDS = {
    "sweep": _cmd_sweep,
    "fig1": _cmd_fig1,
    "fig3": _cmd_fig3,
    "reconstruct": _cmd_reconstruct,
    "protocol": _cmd_protocol,
    "haar-avg": _cmd_haar_avg,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
