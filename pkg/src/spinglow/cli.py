"""Command-line front end.

Atoms are numbered from 1 on the command line. Every command prints JSON (or
CSV for grids) to stdout, or writes it to ``--out`` together with a
``<out>.manifest.json`` sidecar recording the resolved parameters.

Exit codes: 0 success, 2 invalid input, 3 result undefined for the given data.
"""

from __future__ import annotations

import argparse
import csv
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .conformance import build_report
from .correlations import thermal_qc_report
from .io import atomic_write, dumps, grid_to_csv, grid_to_dict, manifest, manifest_path
from .linalg import ShapeError, ValidationError
from .model import MAX_ATOMS, SystemConfig, analytic_line_spectrum, diagonalize
from .radiation import (
    ObservationPoint,
    UndefinedCorrelationError,
    classify,
    g2_numeric,
    intensity_numeric,
    intensity_terms,
)
from .sweeps import AXES, OBSERVABLES, UnidentifiableError, estimate_distance, sweep
from .thermal import thermal_state

EXIT_USAGE = 2
EXIT_UNDEFINED = 3

_PI_RE = re.compile(r"^([+-]?)(\d*\.?\d*)\*?pi(?:/(\d*\.?\d+))?$")


class UsageError(Exception):
    pass


def parse_number(text: str) -> float:
    """Float literal, or a multiple of pi such as ``-pi``, ``0.5pi``, ``2*pi/3``."""
    s = text.strip().lower()
    try:
        return float(s)
    except ValueError:
        pass
    m = _PI_RE.match(s)
    if not m:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    sign, coeff, div = m.groups()
    value = (float(coeff) if coeff not in ("", ".") else 1.0) * math.pi
    if div:
        value /= float(div)
    return -value if sign == "-" else value


def _positive(text: str) -> float:
    v = parse_number(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
    return v


def _atoms(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 1 <= n <= MAX_ATOMS:
        raise argparse.ArgumentTypeError(f"atoms must be in [1, {MAX_ATOMS}], got {n}")
    return n


def parse_axis(text: str) -> tuple[str, np.ndarray]:
    """``name:start:stop:count`` (``name:value`` for a single point)."""
    parts = text.split(":")
    name = parts[0]
    if name not in AXES:
        raise argparse.ArgumentTypeError(f"unknown axis {name!r}; choose from {', '.join(AXES)}")
    if len(parts) == 2:
        return name, np.array([parse_number(parts[1])])
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"axis must look like name:start:stop:count, got {text!r}")
    start, stop = parse_number(parts[1]), parse_number(parts[2])
    try:
        count = int(parts[3])
    except ValueError:
        raise argparse.ArgumentTypeError(f"axis count must be an integer, got {parts[3]!r}") from None
    if count < 1:
        raise argparse.ArgumentTypeError("axis count must be >= 1")
    return name, np.linspace(start, stop, count)


def parse_fixed(text: str) -> tuple[str, float]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"--fixed expects name=value, got {text!r}")
    name, value = text.split("=", 1)
    if name not in AXES:
        raise argparse.ArgumentTypeError(f"unknown parameter {name!r}; choose from {', '.join(AXES)}")
    return name, parse_number(value)


def _emit(args, command: str, params: dict, text: str, fmt_name: str) -> None:
    if args.out is None:
        sys.stdout.write(text)
        return
    atomic_write(args.out, text)
    atomic_write(manifest_path(args.out), dumps(manifest(command, params, str(args.out), fmt_name)))


# --- commands -----------------------------------------------------------------------


def cmd_spectrum(args) -> int:
    cfg = SystemConfig.line(args.atoms, args.omega_ratio)
    _, _, eig = diagonalize(cfg)
    params = {"omega_over_Omega": args.omega_ratio, "atoms": args.atoms}
    result = {"version": __version__, **params, "eigenvalues": eig.eigenvalues}
    if args.atoms == 3:
        analytic = np.sort(analytic_line_spectrum(args.omega_ratio).energies)
        result["analytic_eigenvalues"] = analytic
        result["max_abs_deviation"] = float(np.max(np.abs(analytic - eig.eigenvalues)))
    if args.format == "csv":
        lines = ["index,numeric" + (",analytic" if args.atoms == 3 else "")]
        for k, e in enumerate(eig.eigenvalues):
            row = f"{k},{format(float(e), '.17g')}"
            if args.atoms == 3:
                row += f",{format(float(result['analytic_eigenvalues'][k]), '.17g')}"
            lines.append(row)
        text = "\n".join(lines) + "\n"
    else:
        text = dumps(result)
    _emit(args, "spectrum", params, text, args.format)
    return 0


def _state(args):
    cfg = SystemConfig.line(args.atoms, args.omega_ratio)
    ops, _, eig = diagonalize(cfg)
    return ops, thermal_state(eig, args.temperature)


def cmd_thermal(args) -> int:
    _, state = _state(args)
    params = {"omega_over_Omega": args.omega_ratio, "atoms": args.atoms, "temperature": args.temperature}
    result = {
        "version": __version__,
        **params,
        "beta": state.beta,
        "z_numeric": state.z_numeric,
        "log_z": state.log_z,
        "rho_real": state.rho.real,
        "rho_imag": state.rho.imag,
    }
    _emit(args, "thermal", params, dumps(result), "json")
    return 0


def _radiation_params(args) -> dict:
    return {
        "omega_over_Omega": args.omega_ratio,
        "atoms": args.atoms,
        "temperature": args.temperature,
        "theta": args.theta,
        "lambda_over_d": args.lambda_over_d,
    }


def cmd_intensity(args) -> int:
    ops, state = _state(args)
    obs = ObservationPoint.from_spacing(args.theta, args.lambda_over_d)
    value = intensity_numeric(state.rho, ops, obs)
    terms = intensity_terms(state.rho, ops, obs)
    params = _radiation_params(args)
    result = {
        "version": __version__,
        **params,
        "intensity": value,
        "incoherent": terms.incoherent,
        "dipole_term": terms.dipole,
        "correlation_term": terms.correlation,
        "classification": classify(value, state.rho, ops),
    }
    _emit(args, "intensity", params, dumps(result), "json")
    return 0


def cmd_g2(args) -> int:
    ops, state = _state(args)
    obs = ObservationPoint.from_spacing(args.theta, args.lambda_over_d)
    params = _radiation_params(args)
    value = g2_numeric(state.rho, ops, obs)
    result = {"version": __version__, **params, "g2": value,
              "intensity": intensity_numeric(state.rho, ops, obs)}
    _emit(args, "g2", params, dumps(result), "json")
    return 0


def cmd_qc(args) -> int:
    if args.atoms not in (2, 3):
        raise UsageError("qc supports 2 or 3 atoms")
    pair = tuple(sorted(i - 1 for i in args.pair))
    if args.atoms == 2:
        pair = (0, 1)
    cfg = SystemConfig.line(args.atoms, args.omega_ratio)
    report = thermal_qc_report(cfg, args.temperature, pair, args.measured_side)
    params = {"omega_over_Omega": args.omega_ratio, "atoms": args.atoms, "temperature": args.temperature,
              "pair": [i + 1 for i in pair], "measured_side": args.measured_side}
    result = {"version": __version__, **params, **report.to_dict()}
    result["pair"] = [i + 1 for i in report.pair]
    _emit(args, "qc", params, dumps(result), "json")
    return 0


def cmd_sweep(args) -> int:
    fixed = dict(args.fixed or [])
    if args.x[0] == args.y[0]:
        raise UsageError(f"--x and --y must name different axes (both {args.x[0]!r})")
    grid = sweep(args.observable, args.x, args.y, fixed, n_atoms=args.atoms)
    params = {
        "observable": args.observable,
        "atoms": args.atoms,
        "x": {"name": args.x[0], "values": args.x[1]},
        "y": {"name": args.y[0], "values": args.y[1]},
        "fixed": grid.metadata,
    }
    text = grid_to_csv(grid) if args.format == "csv" else dumps(grid_to_dict(grid))
    _emit(args, "sweep", params, text, args.format)
    return 0


def cmd_conformance(args) -> int:
    temps = args.temperature or [5e-3, 1.0]
    report = build_report(args.omega_ratio, temps, args.lambda_over_d, args.theta_points)
    params = {"omega_over_Omega": args.omega_ratio, "temperatures": temps,
              "lambda_over_d": args.lambda_over_d, "theta_points": args.theta_points}
    _emit(args, "conformance", params, dumps(report), "json")
    return 0


def read_samples(path) -> list[tuple[float, float]]:
    """(theta, intensity) rows; an optional non-numeric header line is skipped."""
    path = Path(path)
    try:
        handle = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    rows = []
    with handle:
        for lineno, row in enumerate(csv.reader(handle), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise UsageError(f"{path}:{lineno}: expected 2 columns (theta,intensity), got {len(row)}")
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                if lineno == 1 and not rows:
                    continue
                raise UsageError(f"{path}:{lineno}: non-numeric value in {row!r}") from None
    if not rows:
        raise UsageError(f"{path}: no data rows")
    return rows


def cmd_estimate(args) -> int:
    samples = read_samples(args.data)
    result = estimate_distance(samples, args.wavelength, args.omega_ratio, args.temperature, args.atoms)
    params = {"data": str(args.data), "wavelength": args.wavelength, "omega_over_Omega": args.omega_ratio,
              "temperature": args.temperature, "atoms": args.atoms}
    _emit(args, "estimate", params, dumps({"version": __version__, **params, **result.to_dict()}), "json")
    return 0


# --- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinglow", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, atoms=True, temperature=True):
        p.add_argument("--omega-ratio", type=parse_number, default=1.0, help="omega/Omega (default 1)")
        if atoms:
            p.add_argument("--atoms", type=_atoms, default=3, help="number of atoms, 1-5 (default 3)")
        if temperature:
            p.add_argument("--temperature", type=_positive, default=5e-3,
                           help="k_B T in units of hbar*Omega (default 5e-3; 'inf' allowed)")
        p.add_argument("--out", type=Path, help="output file (stdout if omitted)")

    def observation(p):
        p.add_argument("--theta", type=parse_number, default=math.pi / 2, help="angle in radians, e.g. pi/2")
        p.add_argument("--lambda-over-d", type=_positive, default=2.0)

    p = sub.add_parser("spectrum", help="eigenvalues of the line Hamiltonian")
    common(p, temperature=False)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("thermal", help="Gibbs density matrix")
    common(p)
    p.set_defaults(func=cmd_thermal)

    p = sub.add_parser("intensity", help="far-field intensity at one angle")
    common(p)
    observation(p)
    p.set_defaults(func=cmd_intensity)

    p = sub.add_parser("g2", help="zero-delay photon correlation at one angle")
    common(p)
    observation(p)
    p.set_defaults(func=cmd_g2)

    p = sub.add_parser("qc", help="concurrence, discord, negativities, monogamy score")
    common(p)
    p.add_argument("--pair", type=int, nargs=2, default=[1, 2], metavar=("I", "J"),
                   help="atoms (1-based) for the two-qubit measures (default 1 2)")
    p.add_argument("--measured-side", choices=("A", "B"), default="A")
    p.set_defaults(func=cmd_qc)

    p = sub.add_parser("sweep", help="observable on a two-parameter grid")
    p.add_argument("--observable", choices=OBSERVABLES, required=True)
    p.add_argument("--x", type=parse_axis, required=True, help="name:start:stop:count")
    p.add_argument("--y", type=parse_axis, required=True, help="name:start:stop:count")
    p.add_argument("--fixed", type=parse_fixed, action="append", metavar="NAME=VALUE")
    p.add_argument("--atoms", type=_atoms, default=3)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("conformance", help="published closed forms versus numerics")
    p.add_argument("--omega-ratio", type=parse_number, default=1.0)
    p.add_argument("--temperature", type=_positive, action="append",
                   help="repeatable; default 5e-3 and 1")
    p.add_argument("--lambda-over-d", type=_positive, default=2.0)
    p.add_argument("--theta-points", type=int, default=25)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_conformance)

    p = sub.add_parser("estimate", help="fit the inter-atomic spacing to (theta, intensity) data")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--lambda", dest="wavelength", type=_positive, default=1.0,
                   help="emission wavelength; the distance is reported in the same unit")
    common(p)
    p.set_defaults(func=cmd_estimate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValidationError, ShapeError) as exc:
        parser.print_usage(sys.stderr)
        print(f"spinglow {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UnidentifiableError, UndefinedCorrelationError) as exc:
        print(f"spinglow {args.command}: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED


if __name__ == "__main__":
    sys.exit(main())
