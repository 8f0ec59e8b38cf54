"""Command-line experiment runner.

Subcommands: convergence, energy, validate, order-reduction.  Flags
mirror the ExperimentConfig fields in kebab-case; --config reads a flat
``key = value`` file whose entries are overridden by explicit flags.
The report subcommands write CSV to --output (default stdout) and can
additionally render a figure with --figure.  Exit codes: 0 success,
1 validation-suite failure, 2 configuration or I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields, replace
from pathlib import Path

from .experiments import (
    ExperimentConfig,
    run_convergence,
    run_energy,
    run_order_reduction,
    run_validate,
    write_convergence_csv,
    write_energy_csv,
    write_probe_csv,
)

_INT_FIELDS = {
    "degree",
    "dim",
    "points_per_dim",
    "substeps",
    "seed",
    "workers",
    "num_steps",
    "samples",
}
_FLOAT_FIELDS = {"theta", "half_width", "final_time", "probe_u0", "probe_horizon"}
_STR_FIELDS = {"equation", "strategy", "reference", "variant"}

# per-subcommand defaults applied beneath config-file and flag values
_COMMAND_DEFAULTS = {
    "convergence": {},
    "energy": {"methods": ("chin_modified",), "final_time": 10.0, "theta": 1.0},
    "validate": {"theta": 0.0},
    "order-reduction": {},
}


def _coerce(name: str, raw: str):
    value = raw.strip()
    if name in _INT_FIELDS:
        return int(value)
    if name in _FLOAT_FIELDS:
        return float(value)
    if name in _STR_FIELDS:
        return value
    if name == "amplitude":
        return None if value.lower() in ("none", "matched") else float(value)
    if name == "taus":
        if value.lower() == "none":
            return None
        return tuple(float(v) for v in value.split(",") if v.strip())
    if name == "methods":
        return tuple(v.strip() for v in value.split(",") if v.strip())
    raise ValueError(f"unknown config key {name!r}")


def _read_config_file(path: str) -> dict:
    values = {}
    text = Path(path).read_text(encoding="utf-8")
    known = {f.name for f in fields(ExperimentConfig)}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in known:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = _coerce(key, raw)
    return values


def _add_experiment_flags(parser: argparse.ArgumentParser) -> None:
    # all values default to None so file/defaults can fill the gaps
    parser.add_argument("--config", metavar="PATH", help="flat key = value file")
    parser.add_argument("--equation", choices=("schrodinger", "parabolic"))
    parser.add_argument("--degree", type=int, choices=(2, 4))
    parser.add_argument(
        "--amplitude",
        help="potential amplitude; 'matched' selects the kind default",
    )
    parser.add_argument("--theta", type=float)
    parser.add_argument("--dim", type=int, choices=(1, 2, 3))
    parser.add_argument("--points-per-dim", type=int)
    parser.add_argument("--half-width", type=float)
    parser.add_argument("--final-time", type=float)
    parser.add_argument(
        "--taus",
        help="comma-separated step sizes; each is snapped to an exact "
        "divisor of the final time",
    )
    parser.add_argument("--methods", help="comma-separated scheme names")
    parser.add_argument(
        "--strategy",
        choices=("default", "closed_form_invariance", "strang_composite", "rk4_combined"),
    )
    parser.add_argument("--substeps", type=int)
    parser.add_argument("--reference", choices=("refined", "exact"))
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--num-steps", type=int)
    parser.add_argument("--samples", type=int)
    parser.add_argument(
        "--variant", choices=("naive", "holomorphic", "real_coefficients")
    )
    parser.add_argument("--probe-u0", type=float)
    parser.add_argument("--probe-horizon", type=float)
    parser.add_argument("--output", metavar="PATH", help="output file (default stdout)")
    parser.add_argument(
        "--figure",
        metavar="PATH",
        help="also render the report as a figure (format from the "
        "extension); ignored by validate",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitflow",
        description="Spectral splitting experiments for dispersive and "
        "diffusive cubic equations",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command, help_text in (
        ("convergence", "global error vs step size for each method"),
        ("energy", "energy trace of a long dispersive run"),
        ("validate", "exact-solution error and runtime invariant suite"),
        ("order-reduction", "scalar probe for complex-coefficient order loss"),
    ):
        _add_experiment_flags(sub.add_parser(command, help=help_text))
    return parser


def _build_config(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig()
    config = replace(config, **_COMMAND_DEFAULTS[args.command])
    if args.config:
        config = replace(config, **_read_config_file(args.config))
    overrides = {}
    for f in fields(ExperimentConfig):
        value = getattr(args, f.name, None)
        if value is None:
            continue
        if isinstance(value, str) and f.name in ("amplitude", "taus", "methods"):
            value = _coerce(f.name, value)
        overrides[f.name] = value
    return replace(config, **overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _build_config(args)
        if args.command == "convergence":
            report = run_convergence(config)
            _emit(args.output, lambda out: write_convergence_csv(report, out))
            if args.figure:
                from .figures import render_convergence_figure

                render_convergence_figure(report, args.figure)
        elif args.command == "energy":
            report = run_energy(config)
            _emit(args.output, lambda out: write_energy_csv(report, out))
            if args.figure:
                from .figures import render_energy_figure

                render_energy_figure(report, args.figure)
        elif args.command == "order-reduction":
            report = run_order_reduction(config)
            _emit(args.output, lambda out: write_probe_csv(report, out))
            if args.figure:
                from .figures import render_probe_figure

                render_probe_figure(report, args.figure)
        else:
            report = run_validate(config)
            for check in report.checks:
                verdict = "PASS" if check.passed else "FAIL"
                print(
                    f"{verdict} {check.name}: measured={check.measured:.3e} "
                    f"tolerance={check.tolerance:.1e} ({check.detail})"
                )
            if not report.passed:
                failed = ", ".join(c.name for c in report.checks if not c.passed)
                print(f"validation failed: {failed}", file=sys.stderr)
                return 1
        return 0
    except (ValueError, OSError, RuntimeError) as err:
        print(f"splitflow: error: {err}", file=sys.stderr)
        return 2


def _emit(output: str | None, writer) -> None:
    if output is None:
        writer(sys.stdout)
        return
    path = Path(output)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as out:
        writer(out)


if __name__ == "__main__":
    sys.exit(main())
