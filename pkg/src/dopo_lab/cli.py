"""Command line front end.

Subcommands map one-to-one onto the library: ``sweep`` and ``point`` for
steady states, ``dynamics`` for relaxation runs, ``marginals`` for the
exact adiabatic distribution, ``spectrum`` for quadrature noise spectra.
No physics lives here, only argument marshalling and serialization.

Exit codes: 0 success, 1 numerical failure, 2 no answer within the model,
3 usage error.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import correlators, dynamics, io, positive_p
from .drummond import perturbative_predictions
from .errors import DopoError, NumericalError, PhysicsError, UsageError
from .params import Branch, Method, NormalizedParams
from .selfconsistent import classical_solve, find_branch, solve_branches

_SWEEP_COLUMNS = [
    "sigma", "method", "branch",
    "pump_intensity", "signal_intensity",
    "var_x", "var_y", "signal_photons_norm",
    "max_re_eig", "residual", "error",
]

_NAN = float("nan")


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; route through the usage
    # exception instead so the exit-code contract holds
    def error(self, message):
        raise UsageError(message)


def _parse_drive_spec(text: str) -> list[float]:
    """Either one drive value or an inclusive range ``start:stop:step``."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"bad drive range {text!r}, expected start:stop:step")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError as exc:
            raise UsageError(f"bad drive range {text!r}: {exc}") from None
        if step <= 0 or stop < start:
            raise UsageError("drive range needs step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(count)]
    try:
        return [float(text)]
    except ValueError:
        raise UsageError(f"bad drive value {text!r}") from None


def _params(drive: float, args) -> NormalizedParams:
    return NormalizedParams(drive=drive, decay_ratio=args.kappa, coupling=args.g)


def _thread_count() -> int:
    raw = os.environ.get("DOPO_LAB_THREADS", "")
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"DOPO_LAB_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise UsageError("DOPO_LAB_THREADS must be at least 1")
    return n


def _solution_row(sol) -> list:
    return [
        sol.params.drive, sol.method.value, sol.branch.value,
        sol.mean_field.pump_intensity, sol.mean_field.signal_intensity,
        sol.variances.var_x, sol.variances.var_y,
        sol.signal_photons_normalized,
        sol.max_real_eigenvalue, sol.residual, "",
    ]


def _drummond_row(drive: float, args) -> list:
    pred = perturbative_predictions(_params(drive, args))
    photons_norm = args.g**2 * (pred.var_x + pred.var_y - 2.0) / 4.0
    return [
        drive, Method.DRUMMOND.value, Branch.BELOW.value,
        pred.pump_mean**2, 0.0,
        pred.var_x, pred.var_y, photons_norm,
        _NAN, _NAN, "",
    ]


def _sweep_rows_at(drive: float, args) -> list[list]:
    method = Method(args.method)
    try:
        if method == Method.CLASSICAL:
            return [_solution_row(s) for s in classical_solve(_params(drive, args))]
        if method == Method.SELF_CONSISTENT:
            return [_solution_row(s) for s in solve_branches(_params(drive, args))]
        return [_drummond_row(drive, args)]
    except UsageError:
        raise
    except DopoError as exc:
        return [[
            drive, method.value, "",
            _NAN, _NAN, _NAN, _NAN, _NAN, _NAN, _NAN,
            exc.code,
        ]]


def cmd_sweep(args) -> int:
    drives = _parse_drive_spec(args.sigma)
    for drive in drives:
        _params(drive, args)  # reject bad parameters before any work
    workers = _thread_count()
    if workers == 1:
        chunks = [_sweep_rows_at(d, args) for d in drives]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda d: _sweep_rows_at(d, args), drives))
    rows = [row for chunk in chunks for row in chunk]
    comment = io.params_comment(args.sigma, args.kappa, args.g, args.method)
    with io.open_output(args.output) as fh:
        io.write_table(fh, [comment], _SWEEP_COLUMNS, rows)
    return 0


def _point_record(sol) -> dict:
    mf, m = sol.mean_field, sol.moments
    p = sol.params
    return {
        "method": sol.method.value,
        "branch": sol.branch.value,
        "params": {"sigma": p.drive, "kappa": p.decay_ratio, "g": p.coupling},
        "mean_field": {
            "pump_re": mf.pump.real, "pump_im": mf.pump.imag,
            "signal_re": mf.signal.real, "signal_im": mf.signal.imag,
        },
        "intensities": {
            "pump": mf.pump_intensity, "signal": mf.signal_intensity,
        },
        "moments": {
            "pump_pair_re": m.pump_pair.real, "pump_pair_im": m.pump_pair.imag,
            "pump_occupation": m.pump_occupation,
            "cross_pair_re": m.cross_pair.real, "cross_pair_im": m.cross_pair.imag,
            "cross_conj_pair_re": m.cross_conj_pair.real,
            "cross_conj_pair_im": m.cross_conj_pair.imag,
            "signal_pair_re": m.signal_pair.real,
            "signal_pair_im": m.signal_pair.imag,
            "signal_occupation": m.signal_occupation,
        },
        "variances": {"var_x": sol.variances.var_x, "var_y": sol.variances.var_y},
        "photons": {
            "signal_normalized": sol.signal_photons_normalized,
            "pump_normalized": sol.pump_photons_normalized,
            "signal": p.signal_photons(sol.signal_photons_normalized),
            "pump": p.pump_photons(sol.pump_photons_normalized),
        },
        "stability": {
            "eigenvalues_re": [e.real for e in sol.eigenvalues],
            "eigenvalues_im": [e.imag for e in sol.eigenvalues],
            "max_re": sol.max_real_eigenvalue,
            "stable": sol.stable,
        },
        "residual": sol.residual,
        "version": io.tool_version(),
    }


def cmd_point(args) -> int:
    drives = _parse_drive_spec(args.sigma)
    if len(drives) != 1:
        raise UsageError("point takes a single drive value, not a range")
    drive = drives[0]
    method = Method(args.method)
    branch = Branch(args.branch)

    if method == Method.DRUMMOND:
        pred = perturbative_predictions(_params(drive, args))
        record = {
            "method": method.value,
            "params": {"sigma": drive, "kappa": args.kappa, "g": args.g},
            "pump_mean": pred.pump_mean,
            "var_x": pred.var_x,
            "var_y": pred.var_y,
            "slow_moment": pred.slow_moment,
            "validity_halfwidth": pred.validity_halfwidth,
            "in_validity_window": pred.in_validity_window,
            "version": io.tool_version(),
        }
        row = _drummond_row(drive, args)
    else:
        solve = classical_solve if method == Method.CLASSICAL else solve_branches
        sol = find_branch(solve(_params(drive, args)), branch)
        record = _point_record(sol)
        row = _solution_row(sol)

    with io.open_output(args.output) as fh:
        if args.format == "json":
            io.write_json(fh, record)
        else:
            comment = io.params_comment(drive, args.kappa, args.g, args.method)
            io.write_table(fh, [comment], _SWEEP_COLUMNS, [row])
    return 0


def cmd_dynamics(args) -> int:
    drives = _parse_drive_spec(args.sigma)
    if len(drives) != 1:
        raise UsageError("dynamics takes a single drive value, not a range")
    params = _params(drives[0], args)
    result = dynamics.integrate_to_steady_state(
        params, seed_signal=args.seed_signal, t_max=args.tmax
    )
    names, rows = dynamics.trajectory_table(result)
    branch = result.nearest_branch.value if result.nearest_branch else ""
    comments = [
        io.params_comment(params.drive, args.kappa, args.g, "self-consistent"),
        "# result: converged={} stop_reason={} nearest_branch={} "
        "branch_distance={} final_rhs_norm={}".format(
            "true" if result.converged else "false",
            result.stop_reason,
            branch,
            io.format_value(result.branch_distance),
            io.format_value(result.final_rhs_norm),
        ),
    ]
    with io.open_output(args.output) as fh:
        io.write_table(fh, comments, names, rows.tolist())
    return 0


def _default_marginal_drives(g: float) -> list[float]:
    return [1.0 - g, 1.0 - g * g / 4.0, 1.0 + g * g / 4.0, 1.0 + g, 1.0 + 2.0 * g]


def _drive_tag(drive: float) -> str:
    return f"{drive:.6g}".replace("-", "m").replace(".", "p")


def _marginal_grid(args) -> np.ndarray | None:
    given = [args.grid_min is not None, args.grid_max is not None]
    if any(given) and not all(given):
        raise UsageError("grid-min and grid-max must be given together")
    if not any(given):
        return None
    if args.grid_max <= args.grid_min:
        raise UsageError("grid-max must exceed grid-min")
    return np.linspace(args.grid_min, args.grid_max, args.grid_n)


def _gaussian_overlays(
    params: NormalizedParams, axis: str, grid: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian-theory columns for one marginal file; nan when absent."""
    solutions = solve_branches(params)
    below = find_branch(solutions, Branch.BELOW)
    nan_col = np.full(grid.size, _NAN)
    try:
        below_curve = positive_p.gaussian_marginal_curve(
            axis, grid, below.variances.var_x, below.variances.var_y,
            0.0, params.coupling, broken=False,
        ).density
    except DopoError:
        below_curve = nan_col
    above_curve = nan_col
    try:
        above = find_branch(solutions, Branch.ABOVE_PLUS)
        above_curve = positive_p.gaussian_marginal_curve(
            axis, grid, above.variances.var_x, above.variances.var_y,
            above.mean_field.signal_intensity, params.coupling, broken=True,
        ).density
    except DopoError:
        pass
    return below_curve, above_curve


def _write_marginal_file(
    directory: str, params: NormalizedParams, axis: str, grid: np.ndarray | None
) -> str:
    curve = positive_p.marginal_curve(params, axis=axis, grid=grid)
    below_col, above_col = _gaussian_overlays(params, axis, curve.grid)
    name = f"marginal_{axis}_sigma_{_drive_tag(params.drive)}.csv"
    path = os.path.join(directory, name)
    comments = [
        io.params_comment(params.drive, params.decay_ratio, params.coupling, "exact"),
        f"# axis: {axis}",
    ]
    rows = zip(curve.grid, curve.density, below_col, above_col)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        io.write_table(
            fh, comments, ["x", "exact", "gauss_below", "gauss_above"], rows
        )
    return path


def cmd_marginals(args) -> int:
    directory = args.output or "marginals"
    os.makedirs(directory, exist_ok=True)
    grid = _marginal_grid(args)
    written = []
    if args.sigma is None:
        drives = _default_marginal_drives(args.g)
        minus_drives = [1.0 + args.g]
    else:
        drives = _parse_drive_spec(args.sigma)
        minus_drives = drives
    for drive in drives:
        written.append(
            _write_marginal_file(directory, _params(drive, args), "x_plus", grid)
        )
    for drive in minus_drives:
        written.append(
            _write_marginal_file(directory, _params(drive, args), "x_minus", grid)
        )
    for path in written:
        print(path)
    return 0


def cmd_spectrum(args) -> int:
    drives = _parse_drive_spec(args.sigma)
    if len(drives) != 1:
        raise UsageError("spectrum takes a single drive value, not a range")
    params = _params(drives[0], args)
    sol = find_branch(solve_branches(params), Branch(args.branch))
    if args.grid_max <= args.grid_min:
        raise UsageError("grid-max must exceed grid-min")
    omega = np.linspace(args.grid_min, args.grid_max, args.grid_n)
    curve = correlators.quadrature_spectrum(sol, omega)
    comments = [
        io.params_comment(params.drive, args.kappa, args.g, "self-consistent"),
        f"# branch: {args.branch}",
    ]
    rows = zip(curve.omega, curve.spectrum_x, curve.spectrum_y)
    with io.open_output(args.output) as fh:
        io.write_table(fh, comments, ["omega", "s_x", "s_y"], rows)
    return 0


def _add_common(parser: argparse.ArgumentParser, kappa_default: float = 1.0) -> None:
    parser.add_argument("--kappa", type=float, default=kappa_default,
                        help="pump to signal damping ratio")
    parser.add_argument("--g", type=float, default=0.01,
                        help="scaled nonlinear coupling")
    parser.add_argument("--output", default=None,
                        help="output path ('-' or omitted: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dopo-lab",
                     description="Parametric oscillator steady states, "
                                 "fluctuations, spectra and exact marginals")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="steady-state branches over a drive range")
    p.add_argument("--method", choices=[m.value for m in Method],
                   default=Method.SELF_CONSISTENT.value)
    p.add_argument("--sigma", required=True,
                   help="drive value or inclusive range start:stop:step")
    p.add_argument("--format", choices=["csv"], default="csv")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("point", help="one steady state in full detail")
    p.add_argument("--method", choices=[m.value for m in Method],
                   default=Method.SELF_CONSISTENT.value)
    p.add_argument("--sigma", required=True)
    p.add_argument("--branch", choices=[b.value for b in Branch],
                   default=Branch.BELOW.value)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    _add_common(p)
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("dynamics", help="relax the coupled equations in time")
    p.add_argument("--sigma", required=True)
    p.add_argument("--seed-signal", type=float, default=1e-3,
                   help="initial coherent signal amplitude")
    p.add_argument("--tmax", type=float, default=200.0,
                   help="time budget in signal lifetimes")
    _add_common(p)
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("marginals",
                       help="exact adiabatic marginals with Gaussian overlays")
    p.add_argument("--sigma", default=None,
                   help="drive value or range; default is a fixed set "
                        "bracketing threshold")
    p.add_argument("--grid-min", type=float, default=None)
    p.add_argument("--grid-max", type=float, default=None)
    p.add_argument("--grid-n", type=int, default=1025)
    _add_common(p, kappa_default=1000.0)
    p.set_defaults(func=cmd_marginals)

    p = sub.add_parser("spectrum", help="quadrature noise spectra")
    p.add_argument("--sigma", required=True)
    p.add_argument("--branch", choices=[b.value for b in Branch],
                   default=Branch.BELOW.value)
    p.add_argument("--grid-min", type=float, default=-50.0)
    p.add_argument("--grid-max", type=float, default=50.0)
    p.add_argument("--grid-n", type=int, default=4001)
    _add_common(p)
    p.set_defaults(func=cmd_spectrum)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 3
    except PhysicsError as exc:
        print(f"physics error [{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error [{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except DopoError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
