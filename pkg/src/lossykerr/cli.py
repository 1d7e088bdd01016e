"""Command-line front end.

Subcommands reproduce the library's figure data as deterministic CSV/JSON
sweeps with sidecar metadata, rendering a matplotlib figure next to each
data file unless --no-plot is given. Stdout carries human-readable
progress only; data goes to files; failures emit a machine-readable error
JSON on stderr with a distinct exit code.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channel import (
    ConvergenceError,
    decoherence_exponent,
    decoherence_exponent_quadratic,
    exact_output_state,
    integrate_master_equation,
    make_channel,
)
from .fock import DimensionTooSmallError, truncation_dimension
from .metrics import (
    gaussian_approximation_infidelity,
    holevo_ring,
    husimi_q,
    q_grid_axes,
)
from .squeezing import squeezing_curve
from .sweep import SweepResult, parallel_map, sweep_metadata, write_sweep

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_MISMATCH = 4

ORACLE_TOL = 1e-8
ORACLE_TAU_NBAR_CAP = 50.0


class UsageError(ValueError):
    """Invalid command-line parameter combination."""


def _error_json(kind: str, message: str, code: int) -> None:
    print(json.dumps({"error": {"type": kind, "message": message,
                                "exit_code": code}}), file=sys.stderr)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - argparse hook
        _error_json("UsageError", message, EXIT_USAGE)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_axis(tokens) -> list[float]:
    """Expand axis tokens: plain numbers, a:b:n (linear), log:a:b:n (geometric)."""
    values: list[float] = []
    for tok in tokens:
        tok = str(tok)
        if tok.startswith("log:"):
            a, b, n = tok[4:].split(":")
            values.extend(np.geomspace(float(a), float(b), int(n)).tolist())
        elif tok.count(":") == 2:
            a, b, n = tok.split(":")
            values.extend(np.linspace(float(a), float(b), int(n)).tolist())
        else:
            values.append(float(tok))
    if not values:
        raise UsageError("empty axis")
    return values


def _token(x: float) -> str:
    """Filename-safe rendering of a parameter value."""
    return format(float(x), "g").replace(".", "p").replace("-", "m").replace("+", "")


def _write(result: SweepResult, prefix: Path, fmt: str) -> Path:
    paths = write_sweep(result, prefix, fmt)
    print(f"wrote {paths['data']}")
    return paths["data"]


def _maybe_plot(enabled: bool, renderer: str, payload, prefix: Path,
                title: str | None = None) -> None:
    if not enabled:
        return
    from . import plotting

    path = getattr(plotting, renderer)(payload, Path(str(prefix) + ".png"), title)
    print(f"wrote {path}")


def _add_common(p: argparse.ArgumentParser, *, log_base: bool = False) -> None:
    p.add_argument("--out", required=True, help="output path prefix (no extension)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=int, default=1, help="worker pool size")
    p.add_argument("--tail-tol", type=float, default=1e-12,
                   help="Poisson tail tolerance fixing Fock cutoffs")
    p.add_argument("--dim-cap", type=int, default=4096,
                   help="largest allowed Fock cutoff")
    p.add_argument("--plot", default=True, action=argparse.BooleanOptionalAction,
                   help="render a PNG figure next to each data file")
    if log_base:
        p.add_argument("--log-base", choices=("2", "e"), default="2")


def _validate_common(args) -> None:
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    if not (0.0 < args.tail_tol <= 1e-3):
        raise UsageError("--tail-tol must lie in (0, 1e-3]")
    if args.dim_cap < 30:
        raise UsageError("--dim-cap must be >= 30")


def _check_tau(tau: float) -> float:
    if not (0.0 < tau <= 1.0):
        raise UsageError(f"--tau must lie in (0, 1], got {tau}")
    return tau


# ---------------------------------------------------------------- qfunc


def _qfunc_point(task):
    tau, kappa, tau_nbar, points, radius, tail_tol, dim_cap = task
    medium, geom = make_channel(tau, kappa)
    dim = truncation_dimension(tau_nbar, tail_tol, cap=dim_cap)
    rho = exact_output_state(medium, geom, math.sqrt(tau_nbar / tau), dim, tail_tol)
    re_axis, im_axis = q_grid_axes(radius, points)
    grid = husimi_q(rho, re_axis, im_axis)
    return grid.re_axis, grid.im_axis, grid.values


def cmd_qfunc(args) -> int:
    _validate_common(args)
    tau = _check_tau(args.tau)
    tau_nbars = parse_axis(args.tau_nbar)
    spec = str(args.grid).split(":")
    points = int(spec[0])
    radius_override = float(spec[1]) if len(spec) > 1 else None
    tasks = []
    for tn in tau_nbars:
        if tn < 0:
            raise UsageError("--tau-nbar values must be >= 0")
        radius = radius_override if radius_override is not None \
            else math.sqrt(tn) + 5.0
        tasks.append((tau, args.kappa, tn, points, radius,
                      args.tail_tol, args.dim_cap))
    results = parallel_map(_qfunc_point, tasks, args.jobs)
    for tn, task, (re_axis, im_axis, values) in zip(tau_nbars, tasks, results):
        rows = tuple(
            (float(re_axis[i]), float(im_axis[j]), float(values[j, i]))
            for i in range(re_axis.size) for j in range(im_axis.size)
        )
        result = SweepResult(
            inputs={"tau": tau, "kappa": args.kappa, "tau_nbar": tn,
                    "grid_points": points, "grid_radius": task[4]},
            columns=("re", "im", "q"),
            rows=rows,
            metadata=sweep_metadata(kind="qfunc", tail_tol=args.tail_tol,
                                    dim_cap=args.dim_cap),
        )
        prefix = Path(f"{args.out}_tn{_token(tn)}")
        _write(result, prefix, args.format)
        from .metrics import QGrid

        _maybe_plot(args.plot, "plot_qfunc",
                    QGrid(re_axis, im_axis, values), prefix,
                    title=rf"$\tau\bar{{n}}={tn:g}$")
    return EXIT_OK


# ---------------------------------------------------------------- ffunc


def cmd_ffunc(args) -> int:
    _validate_common(args)
    taus = [_check_tau(t) for t in parse_axis(args.tau)]
    kappas = parse_axis(args.kappa)
    for tau in taus:
        f = np.asarray(decoherence_exponent(tau, np.array(kappas)))
        fq = np.asarray(decoherence_exponent_quadratic(tau, np.array(kappas)))
        rows = tuple(
            (k, float(f[i].real), float(f[i].imag),
             float(fq[i].real), float(fq[i].imag))
            for i, k in enumerate(kappas)
        )
        result = SweepResult(
            inputs={"tau": tau, "kappa": kappas},
            columns=("kappa", "re_f", "im_f", "re_f_quad", "im_f_quad"),
            rows=rows,
            metadata=sweep_metadata(kind="ffunc"),
        )
        prefix = Path(f"{args.out}_tau{_token(tau)}")
        _write(result, prefix, args.format)
        _maybe_plot(args.plot, "plot_ffunc", result, prefix,
                    title=rf"$\tau={tau:g}$")
    return EXIT_OK


# ------------------------------------------------------------ infidelity


def _infidelity_point(task):
    tau, kappa, tau_nbar, tail_tol, dim_cap = task
    try:
        val = gaussian_approximation_infidelity(tau, kappa, tau_nbar,
                                                tail_tol, dim_cap)
        return (kappa, tau_nbar, val, "")
    except Exception as exc:  # noqa: BLE001 - per-point error records
        return (kappa, tau_nbar, math.nan, f"{type(exc).__name__}: {exc}")


def cmd_infidelity(args) -> int:
    _validate_common(args)
    tau = _check_tau(args.tau)
    kappas = parse_axis(args.kappa)
    tau_nbars = parse_axis(args.tau_nbar)
    tasks = [(tau, k, tn, args.tail_tol, args.dim_cap)
             for k in kappas for tn in tau_nbars]
    rows = tuple(parallel_map(_infidelity_point, tasks, args.jobs))
    result = SweepResult(
        inputs={"tau": tau, "kappa": kappas, "tau_nbar": tau_nbars},
        columns=("kappa", "tau_nbar", "one_minus_f", "error"),
        rows=rows,
        metadata=sweep_metadata(kind="infidelity", tail_tol=args.tail_tol,
                                dim_cap=args.dim_cap),
    )
    prefix = Path(args.out)
    _write(result, prefix, args.format)
    _maybe_plot(args.plot, "plot_infidelity", result, prefix,
                title=rf"$\tau={tau:g}$")
    return EXIT_OK


# ---------------------------------------------------------------- holevo


def _holevo_point(task):
    tau, kappa, tau_nbar, variant, log_base, tail_tol, dim_cap = task
    medium, geom = make_channel(tau, kappa)
    point = holevo_ring(medium, geom, tau_nbar, variant=variant,
                        log_base=log_base, tail_tol=tail_tol, dim_cap=dim_cap)
    return (kappa, tau_nbar, point.chi, point.entropy_avg_state,
            point.entropy_member_state)


def cmd_holevo(args) -> int:
    _validate_common(args)
    tau = _check_tau(args.tau)
    kappas = parse_axis(args.kappa)
    tau_nbars = parse_axis(args.tau_nbar)
    tasks = [(tau, k, tn, args.variant, args.log_base,
              args.tail_tol, args.dim_cap)
             for k in kappas for tn in tau_nbars]
    rows = tuple(parallel_map(_holevo_point, tasks, args.jobs))
    result = SweepResult(
        inputs={"tau": tau, "kappa": kappas, "tau_nbar": tau_nbars,
                "variant": args.variant, "log_base": args.log_base},
        columns=("kappa", "tau_nbar", "chi_bits", "S_avg", "S_member"),
        rows=rows,
        metadata=sweep_metadata(kind="holevo", tail_tol=args.tail_tol,
                                dim_cap=args.dim_cap, log_base=args.log_base,
                                variant=args.variant),
    )
    prefix = Path(args.out)
    _write(result, prefix, args.format)
    _maybe_plot(args.plot, "plot_holevo", result, prefix,
                title=rf"$\tau={tau:g}$, {args.variant}")
    return EXIT_OK


# ------------------------------------------------------------- squeezing


def cmd_squeezing(args) -> int:
    _validate_common(args)
    taus = parse_axis(args.tau)
    for t in taus:
        if not (0.0 < t < 1.0):
            raise UsageError(f"--tau values must lie in (0, 1), got {t}")
    kappas = parse_axis(args.kappa)
    if any(k <= 0 for k in kappas):
        raise UsageError("--kappa values must be > 0 for the squeezing sweep")
    if args.nbar <= 0:
        raise UsageError("--nbar must be > 0")
    result = squeezing_curve(args.nbar, taus, kappas)
    prefix = Path(args.out)
    _write(result, prefix, args.format)
    _maybe_plot(args.plot, "plot_squeezing", result, prefix,
                title=rf"$\bar{{n}}={args.nbar:g}$")
    return EXIT_OK


# ---------------------------------------------------------- oracle-check


def cmd_oracle_check(args) -> int:
    _validate_common(args)
    tau = _check_tau(args.tau)
    if tau >= 1.0:
        raise UsageError("--tau must be < 1 for a finite propagation length")
    tau_nbar = tau * args.nbar
    if tau_nbar > ORACLE_TAU_NBAR_CAP:
        raise UsageError(
            f"tau*nbar = {tau_nbar:g} exceeds the oracle desk scale "
            f"{ORACLE_TAU_NBAR_CAP:g}")
    medium, geom = make_channel(tau, args.kappa)
    dim = truncation_dimension(args.nbar, args.tail_tol, cap=args.dim_cap)
    zeta0 = math.sqrt(args.nbar)
    print(f"oracle check: tau={tau:g} kappa={args.kappa:g} nbar={args.nbar:g} "
          f"(n_max={dim.n_max})")
    integrated, info = integrate_master_equation(
        medium, geom.z, zeta0, dim, steps=args.steps,
        tol=args.ode_tol, max_doublings=args.max_doublings,
        tail_tol=args.tail_tol, full_output=True)
    exact = exact_output_state(medium, geom, zeta0, dim, args.tail_tol)
    deviation = float(np.max(np.abs(exact.elements - integrated.elements)))
    passed = deviation < ORACLE_TOL
    print(f"RK4 steps: {info.steps} (doublings: {info.doublings}, "
          f"last change {info.max_change:.3e})")
    print(f"max elementwise deviation: {deviation:.3e}")
    print(f"{'PASS' if passed else 'FAIL'} (tolerance {ORACLE_TOL:.1e})")
    if args.out:
        report = {
            "schema_version": "1",
            "inputs": {"tau": tau, "kappa": args.kappa, "nbar": args.nbar,
                       "n_max": dim.n_max},
            "rk4_steps": info.steps,
            "rk4_doublings": info.doublings,
            "rk4_last_change": info.max_change,
            "max_deviation": deviation,
            "tolerance": ORACLE_TOL,
            "passed": passed,
        }
        path = Path(str(args.out) + ".json")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")
        print(f"wrote {path}")
    if not passed:
        _error_json("OracleMismatch",
                    f"deviation {deviation:.3e} >= {ORACLE_TOL:.1e}",
                    EXIT_MISMATCH)
        return EXIT_MISMATCH
    return EXIT_OK


# ------------------------------------------------------------------ main


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lossykerr",
                     description="Lossy Kerr channel: exact output states, "
                                 "phase-diffusion model, phase-keying Holevo "
                                 "quantity, attainable squeezing.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qfunc", help="Husimi Q grids of the channel output")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--tau-nbar", nargs="+", required=True,
                   help="output mean photon numbers (one grid file each)")
    p.add_argument("--grid", default="201",
                   help="points per axis, optionally points:radius")
    _add_common(p)
    p.set_defaults(func=cmd_qfunc)

    p = sub.add_parser("ffunc", help="decoherence exponent vs kappa")
    p.add_argument("--tau", nargs="+", required=True)
    p.add_argument("--kappa", nargs="+", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_ffunc)

    p = sub.add_parser("infidelity",
                       help="Gaussian-model infidelity over (kappa, tau_nbar)")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--kappa", nargs="+", required=True)
    p.add_argument("--tau-nbar", nargs="+", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_infidelity)

    p = sub.add_parser("holevo", help="phase-keying Holevo quantity")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--kappa", nargs="+", required=True)
    p.add_argument("--tau-nbar", nargs="+", required=True)
    p.add_argument("--variant", choices=("gaussian", "exact"), default="gaussian")
    _add_common(p, log_base=True)
    p.set_defaults(func=cmd_holevo)

    p = sub.add_parser("squeezing", help="attainable squeezing vs nonlinearity")
    p.add_argument("--nbar", type=float, required=True)
    p.add_argument("--tau", nargs="+", required=True)
    p.add_argument("--kappa", nargs="+", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_squeezing)

    p = sub.add_parser("oracle-check",
                       help="RK4 master-equation integration vs closed form")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--nbar", type=float, required=True)
    p.add_argument("--steps", type=int, default=None,
                   help="initial RK4 step count (doubled until converged)")
    p.add_argument("--max-doublings", type=int, default=12)
    p.add_argument("--ode-tol", type=float, default=1e-9)
    p.add_argument("--out", default=None, help="optional JSON report prefix")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--tail-tol", type=float, default=1e-12)
    p.add_argument("--dim-cap", type=int, default=4096)
    p.add_argument("--plot", default=False, action=argparse.BooleanOptionalAction)
    p.set_defaults(func=cmd_oracle_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        _error_json("UsageError", str(exc), EXIT_USAGE)
        return EXIT_USAGE
    except ConvergenceError as exc:
        _error_json("ConvergenceError", str(exc), EXIT_NUMERICAL)
        return EXIT_NUMERICAL
    except (DimensionTooSmallError, np.linalg.LinAlgError,
            FloatingPointError, OverflowError) as exc:
        _error_json(type(exc).__name__, str(exc), EXIT_NUMERICAL)
        return EXIT_NUMERICAL
    except ValueError as exc:
        _error_json("UsageError", str(exc), EXIT_USAGE)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
