"""Command-line interface: single-point reports, grid sweeps, random samples,
and the verification suite.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .analysis import RESIDUAL_TOLERANCES, build_report
from .ensemble import EnsembleSpec, coefficient_family
from .sweep import (
    CSV_COLUMNS,
    config_from_mapping,
    format_rows,
    load_config_file,
    report_row,
    run_sample,
    run_sweep,
    write_csv,
)
from .verify import format_report, run_verify

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_IO = 3

__all__ = ["console", "main"]


class _CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        raise _CliError(message)


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as error:
        raise _CliError(f"expected a comma-separated list of numbers: {error}")


def _parse_family(text: str) -> tuple[float, float]:
    values = {}
    for part in text.split(","):
        key, separator, value = part.partition("=")
        if not separator or key.strip() not in ("a0", "amin"):
            raise _CliError(f"family syntax is a0=<value>,amin=<value>, got {text!r}")
        try:
            values[key.strip()] = float(value)
        except ValueError:
            raise _CliError(f"family value {value!r} is not a number")
    if set(values) != {"a0", "amin"}:
        raise _CliError(f"family syntax is a0=<value>,amin=<value>, got {text!r}")
    return values["a0"], values["amin"]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="friocoherence",
        description=(
            "Coherence, correlation, and private-randomness accounting for the "
            "discrimination of equiprobable symmetric states with a fixed "
            "inconclusive rate."
        ),
    )
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (64-bit)")
    common.add_argument("--out", default=None, help="output CSV path")
    common.add_argument("--config", default=None, help="key = value configuration file")
    common.add_argument(
        "--with-discord",
        action="store_true",
        default=None,
        help="include the (slow) discord maximization per point",
    )
    common.add_argument(
        "--tolerance-scale",
        type=float,
        default=1.0,
        help="multiply every identity tolerance by this factor",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    point = subparsers.add_parser(
        "point", parents=[common], help="report every scalar for one (ensemble, xi)"
    )
    point.add_argument("--coeffs", default=None, help="comma-separated coefficients (renormalized)")
    point.add_argument("--family", default=None, help="a0=<value>,amin=<value> family member")
    point.add_argument("--uniform", action="store_true", help="uniform ensemble over N entries")
    point.add_argument("--N", type=int, default=None, help="number of states")
    point.add_argument("--xi", type=float, required=True, help="separation parameter in [0, 1]")
    point.set_defaults(handler=_cmd_point)

    sweep = subparsers.add_parser(
        "sweep", parents=[common], help="family curves and random clouds to CSV"
    )
    sweep.add_argument("--N", type=int, default=None, help="number of states")
    sweep.add_argument("--n", type=int, default=None, help="support dimension of random draws")
    sweep.add_argument("--xi", default=None, help="comma-separated xi values")
    sweep.add_argument("--a0", default=None, help="comma-separated family a0 values")
    sweep.add_argument("--amin-points", type=int, default=None, help="a_min grid size per family")
    sweep.add_argument("--random-count", type=int, default=None, help="random ensembles to draw")
    sweep.add_argument("--columns", default=None, help="comma-separated subset of output columns")
    sweep.add_argument("--plot", action="store_true", help="render a figure next to the CSV")
    sweep.set_defaults(handler=_cmd_sweep)

    sample = subparsers.add_parser(
        "sample", parents=[common], help="random ensembles with all report columns"
    )
    sample.add_argument("--N", type=int, required=True, help="number of states")
    sample.add_argument("--n", type=int, required=True, help="support dimension")
    sample.add_argument("--count", type=int, required=True, help="how many ensembles to draw")
    sample.add_argument("--xi", default="0.5", help="comma-separated xi values (default 0.5)")
    sample.add_argument("--plot", action="store_true", help="render a figure next to the CSV")
    sample.set_defaults(handler=_cmd_sample)

    verify = subparsers.add_parser(
        "verify", parents=[common], help="run the identity self-check suite"
    )
    verify.add_argument(
        "--level", choices=("quick", "full"), default="quick", help="point budget"
    )
    verify.set_defaults(handler=_cmd_verify)
    return parser


def _point_spec(args) -> EnsembleSpec:
    chosen = [value for value in (args.coeffs, args.family, True if args.uniform else None) if value]
    if len(chosen) != 1:
        raise _CliError("choose exactly one of --coeffs, --family, --uniform")
    if args.coeffs is not None:
        values = _parse_floats(args.coeffs)
        if len(values) < 2:
            raise _CliError("need at least two coefficients")
        try:
            return EnsembleSpec.from_raw(values, normalize=True)
        except ValueError as error:
            raise _CliError(str(error))
    if args.family is not None:
        if args.N is None:
            raise _CliError("--family needs --N")
        a0, a_min = _parse_family(args.family)
        try:
            return coefficient_family(a0, a_min, args.N)
        except ValueError as error:
            raise _CliError(str(error))
    if args.N is None:
        raise _CliError("--uniform needs --N")
    if args.N < 2:
        raise _CliError("need at least two states")
    return EnsembleSpec(np.full(args.N, 1.0 / np.sqrt(args.N)))


def _format_scalar(value) -> str:
    if value is None:
        return "-"
    return f"{value:.12g}"


def _cmd_point(args) -> int:
    spec = _point_spec(args)
    if not 0.0 <= args.xi <= 1.0:
        raise _CliError(f"xi {args.xi!r} outside [0, 1]")
    report = build_report(spec, args.xi, with_discord=True, with_residuals=True)
    pairs = [
        ("N", report.num_states),
        ("n", report.support_dim),
        ("coeffs", ";".join(f"{c:.12g}" for c in report.coefficients)),
        ("a_min", report.a_min),
        ("mu", report.multiplicity),
        ("xi", report.xi),
        ("D", report.distinguishability),
        ("P", report.p_success),
        ("Q", report.p_failure),
        ("S_rho", report.entropy_input),
        ("S_rhoS", report.entropy_success),
        ("S_rhoF", report.entropy_failure),
        ("C_sep", report.coherence_separation),
        ("C_ancilla", report.coherence_ancilla),
        ("discord", report.discord),
        ("C_me", report.coherence_me),
        ("C_meS", report.coherence_me_success),
        ("C_meF", report.coherence_me_failure),
        ("C_frio", report.coherence_frio),
        ("C_conc", report.coherence_concatenated),
        ("C_extra", report.coherence_extra),
    ]
    residual_keys = [f"residual {name}" for name in sorted(report.residuals)]
    width = max(len(key) for key, _ in pairs)
    width = max([width, *(len(key) for key in residual_keys)]) + 2
    for key, value in pairs:
        text = value if isinstance(value, str) else _format_scalar(value)
        print(f"{key:<{width}}{text}")
    exceeded = []
    for name, residual in sorted(report.residuals.items()):
        tolerance = RESIDUAL_TOLERANCES[name] * args.tolerance_scale
        marker = "ok" if residual <= tolerance else "EXCEEDED"
        print(f"{'residual ' + name:<{width}}{residual:.3e}  (tol {tolerance:.1e}, {marker})")
        if residual > tolerance:
            exceeded.append(name)
    if "coherence_split" in exceeded:
        print(
            "note: the coherence_split excess equals the margin by which an optimized\n"
            "      ancilla measurement beats the natural readout basis; the split into\n"
            "      ancilla coherence plus discord holds only for the natural basis\n"
            "      (see residual coherence_split_basis, which must stay tiny)."
        )
    if args.out:
        write_csv(args.out, [report_row("point", report)])
    return EXIT_VERIFY if exceeded else EXIT_OK


def _merge_sweep_settings(args) -> dict:
    mapping: dict = {}
    if args.config:
        mapping.update(load_config_file(args.config))
    overrides = {
        "N": args.N,
        "n": args.n,
        "xi": _parse_floats(args.xi) if args.xi is not None else None,
        "a0": _parse_floats(args.a0) if args.a0 is not None else None,
        "amin_points": args.amin_points,
        "random_count": args.random_count,
        "seed": args.seed,
        "columns": tuple(args.columns.split(",")) if args.columns is not None else None,
        "with_discord": args.with_discord,
        "out": args.out,
    }
    mapping.update({key: value for key, value in overrides.items() if value is not None})
    return mapping


def _emit_rows(rows, columns, out, plot) -> None:
    if plot and not out:
        raise _CliError("--plot needs --out to name the figure")
    if out:
        write_csv(out, rows, columns)
        if plot:
            from . import plotting  # matplotlib stays optional at import time

            base = out[: -len(".csv")] if out.endswith(".csv") else out
            plotting.render_rows(rows, base + ".png", columns=columns)
    else:
        sys.stdout.write(format_rows(rows, columns))


def _cmd_sweep(args) -> int:
    try:
        config = config_from_mapping(_merge_sweep_settings(args))
    except ValueError as error:
        raise _CliError(str(error))
    rows = run_sweep(config)
    if not rows:
        raise _CliError("nothing to sweep: no families and random_count = 0")
    _emit_rows(rows, config.columns, config.output_path, args.plot)
    return EXIT_OK


def _cmd_sample(args) -> int:
    xi_values = _parse_floats(args.xi)
    if not xi_values:
        raise _CliError("need at least one xi value")
    for xi in xi_values:
        if not 0.0 <= xi <= 1.0:
            raise _CliError(f"xi value {xi!r} outside [0, 1]")
    try:
        rows = run_sample(
            args.N,
            args.n,
            args.count,
            args.seed if args.seed is not None else 0,
            xi_values=xi_values,
            with_discord=bool(args.with_discord),
        )
    except ValueError as error:
        raise _CliError(str(error))
    _emit_rows(rows, CSV_COLUMNS, args.out, args.plot)
    return EXIT_OK


def _cmd_verify(args) -> int:
    report = run_verify(
        level=args.level,
        seed=args.seed if args.seed is not None else 7,
        tolerance_scale=args.tolerance_scale,
    )
    print(format_report(report))
    return EXIT_OK if report.passed else EXIT_VERIFY


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _CliError as error:
        print(f"error: {error}", file=sys.stderr)
        return error.code
    except SystemExit as exit_request:  # --help
        return int(exit_request.code or 0)
    try:
        return args.handler(args)
    except _CliError as error:
        print(f"error: {error}", file=sys.stderr)
        return error.code
    except OSError as error:
        print(f"i/o error: {error}", file=sys.stderr)
        return EXIT_IO


def console() -> None:
    sys.exit(main())
