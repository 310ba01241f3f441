"""``zeno-sense``: figure sweeps, oracle validation and spin-system calculators.

Exit codes: 0 success, 1 a validation or spot check failed, 2 bad
configuration or parameters.
"""

import argparse
import configparser
import csv
import json
import math
from pathlib import Path
import sys

import numpy as np

from . import bloch, figures, qfi, spins, validation
from .bloch import PrecessionFrequency, TWO_PI
from .specfun import DomainError, phi, xi

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2

FIGURE_DEFAULTS = {
    "fig2": {"theta": "0.1:1.4:131", "t": "1:400:400:log"},
    "fig3": {"tau": "0.01:0.99:99", "trace_t": "0:10:1001"},
    "fig4": {"tau": "0.02:0.9:45", "t": "0.05:30:600"},
    "fig5": {"theta": "0.01:1.56:156", "t": "0.1:100:200:log"},
}


class ConfigError(ValueError):
    pass


def format_float(x):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def write_csv(path, header, columns):
    """Write equal-length columns with a header, LF endings, 17 digits."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([format_float(v) for v in row])


def _companion(out, suffix):
    p = Path(out)
    return p.with_name(f"{p.stem}_{suffix}{p.suffix or '.csv'}")


def _axis(text):
    try:
        return figures.Axis.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _mesh(a, b):
    A, B = np.meshgrid(a, b, indexing="ij")
    return A.ravel(), B.ravel()


def _require(cond, message):
    if not cond:
        raise ConfigError(message)


# --- figure commands ---------------------------------------------------------


def cmd_fig2(args):
    thetas, ts = args.theta.values(), args.t.values()
    _require(thetas[0] >= 0 and thetas[-1] < math.pi / 2, "theta must lie in [0, pi/2)")
    _require(ts[0] >= 0, "t must be non-negative")
    grid = figures.fig2_grid(thetas, ts, args.mu0, args.omega)
    th, t = _mesh(thetas, ts)
    write_csv(args.out, ["theta", "t", "qfi_coh"], [th, t, grid.ravel()])
    try:
        fits = figures.fig2_contour_fit(thetas, ts, grid)
        contours = [{"level": f.level, "t_cos2_theta": f.constant, "residual": f.residual} for f in fits]
    except ValueError as exc:
        contours = {"error": str(exc)}
    return {"contours": contours}, (thetas, ts)


def cmd_fig3(args):
    taus, times = args.tau.values(), args.trace_t.values()
    _require(taus[0] >= 0 and taus[-1] < TWO_PI / args.omega, "tau must lie in [0, 2 pi / omega)")
    _require(times[0] >= 0, "trace times must be non-negative")
    tc = figures.fig3_characteristic_times(taus, args.theta, args.omega)
    write_csv(args.out, ["tau", "t_c"], [taus, tc])
    traces, az = figures.fig3_traces(times, args.theta, args.omega, args.mu0, args.zeno_tau)
    write_csv(
        _companion(args.out, "traces"),
        ["t", "mu_z_coherent", "mu_z_zeno", "mu_z_anti_zeno"],
        [times, traces["coherent"], traces["zeno"], traces["anti_zeno"]],
    )
    return {"grid_argmin_tau": float(taus[np.argmin(tc)]), "anti_zeno_tau": az, "zeno_tau": args.zeno_tau}, (times,)


def cmd_fig4(args):
    taus, ts = args.tau.values(), args.t.values()
    _require(taus[0] > 0, "tau must be positive")
    _require(ts[0] >= 0, "t must be non-negative")
    smooth, full = figures.fig4_grid(taus, ts, args.theta, args.omega, args.mu0)
    tau_col, t_col = _mesh(taus, ts)
    write_csv(args.out, ["tau", "t", "qfi_proj", "qfi_proj_full"], [tau_col, t_col, smooth.ravel(), full.ravel()])
    ridge = figures.fig4_ridge(taus, args.theta, args.omega, args.mu0)
    write_csv(
        _companion(args.out, "ridge"),
        ["tau", "t_c", "t_max", "qfi_proj_max"],
        [taus, ridge["t_c"], ridge["t_max"], ridge["qfi_max"]],
    )
    om = PrecessionFrequency.from_theta(args.theta, args.omega)
    finite = np.isfinite(ridge["t_c"])
    ident = float(np.max(np.abs(ridge["t_max"][finite] / ridge["t_c"][finite] - xi(args.mu0)), initial=0.0))
    summary = {
        "ridge_argmax_offset_cells": figures.fig4_ridge_agreement(ts, smooth, ridge),
        "t_max_over_t_c_minus_xi": ident,
        "smallest_tau_peak_over_zeno_plateau": float(ridge["qfi_max"][0] / (4.0 * phi(args.mu0) / om.wx**2)),
    }
    return summary, (taus, ts)


def cmd_fig5(args):
    thetas, ts = args.theta.values(), args.t.values()
    _require(thetas[0] > 0 and thetas[-1] < math.pi / 2, "theta must lie in (0, pi/2)")
    _require(ts[0] > 0, "t must be positive")
    grid = figures.fig5_grid(thetas, ts, args.omega, args.mu0)
    th, t = _mesh(thetas, ts)
    write_csv(args.out, ["theta", "t", "ratio"], [th, t, grid.ravel()])
    summary = {}
    try:
        fit = figures.fig5_boundary_fit(thetas, ts, grid, args.omega, args.mu0, args.theta_ref, args.tau)
        write_csv(_companion(args.out, "boundary"), ["t", "omega_x", "omega_z"], [fit.t, fit.wx, fit.wz])
        summary["boundary"] = {"c": fit.constant, "residual": fit.residual, "points": len(fit.t), "t_min": fit.t_min}
    except ValueError as exc:
        summary["boundary"] = {"error": str(exc)}
    try:
        t_grid, t_bound, cells = figures.fig5_crossover(thetas, ts, grid, args.theta_ref, args.omega, args.mu0)
        summary["crossover"] = {"t_grid": t_grid, "t_bound": t_bound, "offset_cells": cells}
    except ValueError as exc:
        summary["crossover"] = {"error": str(exc)}
    return summary, (thetas, ts)


FIGURES = {"fig2": cmd_fig2, "fig3": cmd_fig3, "fig4": cmd_fig4, "fig5": cmd_fig5}


def run_figure(args):
    _require(0.0 <= args.mu0 <= 1.0, "mu0 must lie in [0, 1]")
    _require(args.omega > 0, "omega must be positive")
    _require(args.oracle_spotcheck >= 0, "oracle-spotcheck must be non-negative")
    summary, axes = FIGURES[args.command](args)
    summary = {"command": args.command, "out": str(args.out), **summary}
    status = EXIT_OK
    if args.oracle_spotcheck:
        theta = args.theta if args.command in ("fig3", "fig4") else figures.FIGURE_THETA
        checks = figures.spotcheck(
            args.command, axes, args.oracle_spotcheck, args.seed, args.omega, args.mu0, theta
        )
        failed = [c for c in checks if not c.passed]
        summary["spotcheck"] = {
            "cells": len(checks),
            "max_deviation": max(c.deviation for c in checks),
            "failed": [{"cell": list(c.cell), "closed_form": c.closed_form, "oracle": c.oracle} for c in failed],
        }
        if failed:
            print(f"oracle spot check FAILED on {len(failed)} of {len(checks)} cells", file=sys.stderr)
            status = EXIT_FAILED
    print(json.dumps(summary, indent=2, default=float))
    return status


# --- validate ----------------------------------------------------------------


def run_validate(args):
    results = validation.run_checks(args.check or None, seed=args.seed)
    if args.json:
        print(json.dumps([r.__dict__ for r in results], indent=2, default=float))
    else:
        for r in results:
            print(r.line())
        stats = next((r.details for r in results if r.name == "bloch_eigen_equivalence"), None)
        if stats:
            print(
                f"Bloch-vector versus eigenbasis QFI over {stats['samples']} states: "
                f"max {stats['max']:.3e}, mean {stats['mean']:.3e}, median {stats['median']:.3e}"
            )
        print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


# --- spins -------------------------------------------------------------------


def _probe_report(om, mu0):
    """Zeno and anti-Zeno recommendations for an effective probe."""
    zeno_tau = 0.01 * TWO_PI / om.w
    out = {
        "omega_x": om.wx,
        "omega_z": om.wz,
        "mu0": mu0,
        "zeno_tau": zeno_tau,
        "zeno_t_max": qfi.t_max(om, mu0, zeno_tau),
        "zeno_qfi_max": qfi.qfi_projected_max(om, mu0, zeno_tau),
    }
    if abs(om.wz) > abs(om.wx):
        az = bloch.anti_zeno_tau(om)
        out.update(anti_zeno_tau=az, anti_zeno_t_max=qfi.t_max(om, mu0, az), anti_zeno_qfi_max=qfi.qfi_projected_max(om, mu0, az))
    else:
        out["anti_zeno_tau"] = "n/a (needs |omega_z| > |omega_x|)"
    return out


def _print_report(report):
    for key, value in report.items():
        print(f"{key} = {format_float(value) if isinstance(value, (float, np.floating)) else value}")


def run_spins(args):
    if args.system == "two":
        spec = spins.TwoSpinSpec(args.b, args.delta, args.omega0_I, args.kT)
        init = spins.two_spin_initial_mu0(spec)
        mu0 = abs(args.mu0 if args.mu0 is not None else init.exact)
        om = spins.two_spin_effective_omega(spec)
        report = {"condition": "Hartmann-Hahn (on resonance)" if spec.delta == 0 else "off resonance"}
        report.update(mu0_exact=init.exact, mu0_high_temperature=init.high_temperature)
        report["projective_bound"] = spins.two_spin_projective_bound(spec)
        report.update(_probe_report(om, mu0))
    elif args.system == "three":
        spec = spins.ThreeSpinSpec(args.b1, args.b2, args.d, args.delta, args.sigma)
        om = spins.three_spin_effective_omega(spec)
        report = {"projective_bound": spins.three_spin_projective_bound(spec)}
        report.update(_probe_report(om, args.mu0))
    else:
        b = np.array([[float(x) for x in row.split(",")] for row in args.couplings.split(";")])
        offsets = [float(x) for x in args.offsets.split(",")] if args.offsets else [0.0] * len(b)
        spec = spins.ManySpinSpec(offsets, b)
        b_eff = spins.many_spin_effective_coupling(spec, args.spin)
        t_max, q_max = spins.many_spin_zeno_optimum(b_eff, args.mu0, args.tau)
        report = {"n_spins": spec.n_spins, "b_eff": b_eff, "mu0": args.mu0, "tau": args.tau, "t_max": t_max, "qfi_max": q_max}
    _print_report(report)
    return EXIT_OK


# --- parsing -----------------------------------------------------------------


def _figure_parser(sub, name, help_text):
    p = sub.add_parser(name, help=help_text)
    p.add_argument("--config", help="key = value file; [DEFAULT] or [%s] section" % name)
    p.add_argument("--out", default=f"{name}.csv", help="main CSV path (default %(default)s)")
    p.add_argument("--oracle-spotcheck", type=int, default=0, metavar="K", help="re-verify K random cells")
    p.add_argument("--seed", type=int, default=0, help="seed for spot-check cell selection")
    p.add_argument("--mu0", type=float, default=1.0)
    p.add_argument("--omega", type=float, default=TWO_PI, help="precession magnitude (default 2 pi)")
    for axis, spec in FIGURE_DEFAULTS[name].items():
        p.add_argument("--" + axis.replace("_", "-"), type=_axis, default=spec, metavar="MIN:MAX:COUNT[:log]")
    return p


def build_parser():
    parser = argparse.ArgumentParser(prog="zeno-sense", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    _figure_parser(sub, "fig2", "coherent QFI over (theta, t)")
    p = _figure_parser(sub, "fig3", "characteristic decay time and mu_z traces")
    p.add_argument("--theta", type=float, default=figures.FIGURE_THETA)
    p.add_argument("--zeno-tau", type=float, default=figures.ZENO_TRACE_TAU)
    p = _figure_parser(sub, "fig4", "projected QFI over (tau, t) and its ridge")
    p.add_argument("--theta", type=float, default=figures.FIGURE_THETA)
    p = _figure_parser(sub, "fig5", "projected-to-coherent QFI quotient")
    p.add_argument("--theta-ref", type=float, default=figures.FIGURE_THETA, help="probe for t_max and the crossover")
    p.add_argument("--tau", type=float, default=0.3, help="spacing that sets the fit's t_max threshold")

    p = sub.add_parser("validate", help="closed forms against the oracle")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check", action="append", choices=sorted(validation.CHECKS), help="run only this check")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("spins", help="spin-system calculators")
    systems = p.add_subparsers(dest="system", required=True)
    q = systems.add_parser("two", help="cross-polarization pair")
    q.add_argument("--b", type=float, required=True)
    q.add_argument("--delta", type=float, default=0.0)
    q.add_argument("--omega0-I", dest="omega0_I", type=float, default=0.0)
    q.add_argument("--kT", type=float, default=1.0)
    q.add_argument("--mu0", type=float, default=None, help="override the thermal polarization")
    q = systems.add_parser("three", help="S spin with two I spins")
    for name in ("b1", "b2"):
        q.add_argument("--" + name, type=float, required=True)
    for name in ("d", "delta", "sigma"):
        q.add_argument("--" + name, type=float, default=0.0)
    q.add_argument("--mu0", type=float, default=1.0)
    q = systems.add_parser("many", help="central spin among up to four")
    q.add_argument("--couplings", required=True, help="rows separated by ';', entries by ','")
    q.add_argument("--offsets", default=None, help="comma-separated offsets (default zeros)")
    q.add_argument("--spin", type=int, default=0)
    q.add_argument("--mu0", type=float, default=1.0)
    q.add_argument("--tau", type=float, default=0.01)
    return parser


def _subparser(parser, path):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[path]
    raise KeyError(path)


def apply_config(parser, argv):
    """Load ``--config`` into the command's defaults; the command line still wins."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    command = next((a for a in argv if not a.startswith("-")), None)
    if command not in ("fig2", "fig3", "fig4", "fig5", "validate"):
        raise ConfigError("--config applies to the figure and validate commands")
    text = Path(known.config).read_text(encoding="utf-8")
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"), inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    cp.read_string("[DEFAULT]\n" + text)
    values = dict(cp[command]) if cp.has_section(command) else dict(cp.defaults())
    sub = _subparser(parser, command)
    dests = {a.dest for a in sub._actions}
    overrides = {}
    for key, value in values.items():
        dest = key.replace("-", "_")
        if dest not in dests or dest == "config":
            raise ConfigError(f"unknown config key {key!r} for {command}")
        action = next(a for a in sub._actions if a.dest == dest)
        overrides[dest] = action.type(value) if action.type else value
    sub.set_defaults(**overrides)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        apply_config(parser, argv)
    except (ConfigError, OSError, configparser.Error, argparse.ArgumentTypeError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if args.command in FIGURES:
            return run_figure(args)
        if args.command == "validate":
            return run_validate(args)
        return run_spins(args)
    except (ConfigError, DomainError, ValueError) as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
