"""Command-line interface.

Subcommands
-----------
steady-state   solve and print the classical mean field
stability      print the drift-matrix spectrum and verdict
entangle       print the three entanglement measures at one point
sweep          run a sweep described in the config file
reproduce      run one of the pre-baked figure sweeps (fig2a ... fig10)

Exit codes: 0 success, 1 configuration/validation error, 2 numerical
failure (non-convergence or an unstable operating point).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import meanfield
from .dynamics import build_diffusion, build_drift, stability
from .entanglement import ModePair, extract_pair, log_negativity
from .errors import (
    Diverged,
    NonConvergence,
    NonPhysicalState,
    ParameterError,
    SingularSolve,
    UnstableSystem,
)
from .lyapunov import solve_lyapunov
from .params import (
    DEFAULTS,
    SystemParams,
    apply_overrides,
    derived_couplings,
    load_config,
    parse_override,
    to_canonical_json,
    validate,
)
from .sweep import SweepAxis, SweepSpec, emit_csv, run_sweep

FIGURES = (
    "fig2a",
    "fig2b",
    "fig3",
    "fig4",
    "fig5",
    "fig6",
    "fig7",
    "fig8",
    "fig9",
    "fig10",
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


def reproduce(figure_id: str, base: SystemParams = DEFAULTS, mode: str = "paper") -> SweepSpec:
    """Pre-baked sweep spec for one of the published figures.

    Figures that show curves with and without the amplifier are encoded
    as a two-point lambda_opa axis, so one CSV holds both runs.
    """
    both = ("E_cB2", "E_B1B2")
    lam_onoff = SweepAxis("lambda_opa", 0.0, 0.2, 2)
    if figure_id == "fig2a":
        return SweepSpec(
            base=base,
            axis_1=SweepAxis("drive", 0.0, 60.0, 61),
            axis_2=SweepAxis("lambda_opa", 0.0, 0.5, 61),
            observables=("stability", "max_real_part"),
            mode=mode,
        )
    if figure_id == "fig2b":
        # N starts at the fixed collective split M = 50 so every grid
        # point is a valid molecule partition
        return SweepSpec(
            base=apply_overrides(base, {"lambda_opa": 0.2}),
            axis_1=SweepAxis("drive", 0.0, 60.0, 61),
            axis_2=SweepAxis("n_total", 50, 200, 61),
            observables=("stability", "max_real_part"),
            mode=mode,
        )
    if figure_id == "fig3":
        return SweepSpec(
            base=base,
            axis_1=SweepAxis("drive", 0.0, 60.0, 61),
            axis_2=SweepAxis("lambda_opa", 0.0, 0.5, 61),
            observables=both,
            mode=mode,
        )
    if figure_id == "fig4":
        return SweepSpec(
            base=apply_overrides(base, {"m_split": 0, "drive": 16.0}),
            axis_1=lam_onoff,
            axis_2=SweepAxis("n_total", 1, 100, 100),
            observables=both,
            mode=mode,
        )
    if figure_id == "fig5":
        return SweepSpec(
            base=apply_overrides(base, {"drive": 50.0}),
            axis_1=SweepAxis("m_split", 0, 100, 101),
            observables=both,
            mode=mode,
        )
    if figure_id == "fig6":
        return SweepSpec(
            base=apply_overrides(base, {"drive": 16.0}),
            axis_1=lam_onoff,
            axis_2=SweepAxis("delta_a", 0.0, 2.5, 101),
            observables=both,
            mode=mode,
        )
    if figure_id == "fig7":
        return SweepSpec(
            base=apply_overrides(base, {"drive": 16.0}),
            axis_1=lam_onoff,
            axis_2=SweepAxis("delta_c_eff", 0.05, 3.0, 101),
            observables=both,
            mode=mode,
        )
    if figure_id == "fig8":
        return SweepSpec(
            base=apply_overrides(base, {"drive": 16.0}),
            axis_1=lam_onoff,
            axis_2=SweepAxis("temperature", 1.0, 2000.0, 101, scale="log"),
            observables=both,
            mode=mode,
        )
    if figure_id == "fig9":
        return SweepSpec(
            base=apply_overrides(base, {"drive": 16.0}),
            axis_1=SweepAxis("theta", 0.0, 4.0 * math.pi, 201),
            observables=both,
            mode=mode,
        )
    if figure_id == "fig10":
        return SweepSpec(
            base=apply_overrides(base, {"drive": 16.0, "lambda_opa": 0.2}),
            axis_1=SweepAxis("j_1", 0.0, 1.2, 61),
            axis_2=SweepAxis("j_2", 0.0, 1.2, 61),
            observables=both,
            mode=mode,
        )
    raise ParameterError("figure", f"unknown figure id {figure_id!r}; expected one of {FIGURES}")


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; missing keys take the defaults")
    common.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="FIELD=VALUE",
        help="override one parameter (repeatable); 'drive' sets both drive amplitudes",
    )
    common.add_argument("--mode", choices=("paper", "exact"), default="paper",
                        help="mean-field treatment of the parametric term")
    common.add_argument("--out", help="output file (CSV for sweeps, JSON otherwise)")

    parser = argparse.ArgumentParser(prog="mcomsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("steady-state", parents=[common], help="solve the classical mean field")
    sub.add_parser("stability", parents=[common], help="drift-matrix spectrum and verdict")
    sub.add_parser("entangle", parents=[common], help="entanglement measures at one point")
    p_sweep = sub.add_parser("sweep", parents=[common], help="run the sweep in the config file")
    p_sweep.add_argument("--workers", type=int, default=None, help="parallel worker processes")
    p_rep = sub.add_parser("reproduce", parents=[common], help="reproduce a published figure as CSV")
    p_rep.add_argument("figure", help="one of: " + ", ".join(FIGURES))
    p_rep.add_argument("--workers", type=int, default=None, help="parallel worker processes")
    return parser


def _load_params(args) -> SystemParams:
    params = load_config(args.config) if args.config else DEFAULTS
    overrides = dict(parse_override(item) for item in args.set)
    return validate(apply_overrides(params, overrides))


def _dump(args, payload: dict) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _cmd_steady_state(args) -> int:
    params = _load_params(args)
    ss = meanfield.solve_mean_field(params, mode=args.mode)
    print(f"alpha_a      = {ss.alpha_a:.12g}")
    print(f"alpha_c      = {ss.alpha_c:.12g}")
    print(f"|alpha_c|^2  = {abs(ss.alpha_c) ** 2:.12g}")
    print(f"beta_1       = {ss.beta_1:.12g}")
    print(f"beta_2       = {ss.beta_2:.12g}")
    print(f"delta_c_eff  = {ss.delta_c_eff:.12g}")
    print(f"G_1, G_2     = {ss.g_cap_1:.12g}, {ss.g_cap_2:.12g}")
    print(f"iterations   = {ss.iterations}  (residual {ss.residual:.3e})")
    _dump(args, {
        "alpha_a": [ss.alpha_a.real, ss.alpha_a.imag],
        "alpha_c": [ss.alpha_c.real, ss.alpha_c.imag],
        "beta_1": [ss.beta_1.real, ss.beta_1.imag],
        "beta_2": [ss.beta_2.real, ss.beta_2.imag],
        "delta_c_eff": ss.delta_c_eff,
        "g_cap_1": ss.g_cap_1,
        "g_cap_2": ss.g_cap_2,
        "iterations": ss.iterations,
        "residual": ss.residual,
    })
    return EXIT_OK


def _cmd_stability(args) -> int:
    params = _load_params(args)
    ss = meanfield.solve_mean_field(params, mode=args.mode)
    report = stability(build_drift(ss, params))
    verdict = "stable" if report.stable else "UNSTABLE"
    print(f"max Re lambda = {report.max_real_part:.6e}  ->  {verdict}")
    for ev in sorted(report.eigenvalues, key=lambda z: z.real, reverse=True):
        print(f"  {ev.real:+.6e} {ev.imag:+.6e}i")
    _dump(args, {
        "stable": report.stable,
        "max_real_part": report.max_real_part,
        "eigenvalues": [[ev.real, ev.imag] for ev in report.eigenvalues],
    })
    return EXIT_OK


def _cmd_entangle(args) -> int:
    params = _load_params(args)
    ss = meanfield.solve_mean_field(params, mode=args.mode)
    drift = build_drift(ss, params)
    report = stability(drift)
    if not report.stable:
        raise UnstableSystem(f"system unstable (max Re lambda = {report.max_real_part:.6e})")
    diffusion = build_diffusion(params, derived_couplings(params).n_th)
    v = solve_lyapunov(drift, diffusion)
    results = {}
    for name, (first, second) in (
        ("E_cB1", ("cavity_c", "vib_1")),
        ("E_cB2", ("cavity_c", "vib_2")),
        ("E_B1B2", ("vib_1", "vib_2")),
    ):
        results[name] = log_negativity(extract_pair(v, ModePair(first, second)))
        print(f"{name:7s} = {results[name]:.12g}")
    print(f"stability margin: max Re lambda = {report.max_real_part:.6e}")
    results["max_real_part"] = report.max_real_part
    _dump(args, results)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    if not args.config:
        raise ParameterError("config", "sweep requires --config with axis definitions")
    with open(args.config, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    axis_1 = config.pop("axis1", None)
    axis_2 = config.pop("axis2", None)
    observables = tuple(config.pop("observables", ["stability", "max_real_part"]))
    if axis_1 is None:
        raise ParameterError("axis1", "sweep config must define axis1")
    params = validate(apply_overrides(DEFAULTS, config))
    overrides = dict(parse_override(item) for item in args.set)
    params = validate(apply_overrides(params, overrides))
    spec = SweepSpec(
        base=params,
        axis_1=SweepAxis(**axis_1),
        axis_2=SweepAxis(**axis_2) if axis_2 else None,
        observables=observables,
        mode=args.mode,
    )
    table = run_sweep(spec, workers=args.workers)
    destination = args.out or "sweep.csv"
    emit_csv(table, destination)
    stable_points = sum(row.stable for row in table.rows)
    print(f"{len(table.rows)} points ({stable_points} stable) -> {destination}")
    return EXIT_OK


def _cmd_reproduce(args) -> int:
    params = _load_params(args)
    spec = reproduce(args.figure, params, mode=args.mode)
    table = run_sweep(spec, workers=args.workers)
    destination = args.out or f"{args.figure}.csv"
    emit_csv(table, destination)
    stable_points = sum(row.stable for row in table.rows)
    print(f"{args.figure}: {len(table.rows)} points ({stable_points} stable) -> {destination}")
    print(f"base params: {to_canonical_json(spec.base)}")
    return EXIT_OK


_COMMANDS = {
    "steady-state": _cmd_steady_state,
    "stability": _cmd_stability,
    "entangle": _cmd_entangle,
    "sweep": _cmd_sweep,
    "reproduce": _cmd_reproduce,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (NonConvergence, UnstableSystem, Diverged, SingularSolve, NonPhysicalState) as exc:
        # numerical failures first: NonPhysicalState is a ValueError subclass
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ParameterError, json.JSONDecodeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
