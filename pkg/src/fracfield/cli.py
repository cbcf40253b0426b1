"""Command-line front end: ``fracfield <command> [--config FILE] [--out DIR] ...``.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from .calculus import conf_deriv, conf_deriv_limit, conf_integral, conf_integral_multi
from .config import ScenarioConfig, load_config
from .csvio import coordinate_header, write_csv
from .errors import ConfigurationError, NumericFailure
from .noether import NoetherAnalysis, action_variation, amt_from_emt
from .oscillator import analytic_solution, analytic_trajectory, energy_trace, fit_constants, integrate
from .suites import SUITES, run_suites
from .sweep import map_points
from .variational import CompositeLagrangian, action

logger = logging.getLogger("fracfield")

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------
def cmd_deriv(cfg: ScenarioConfig, args: argparse.Namespace) -> int:
    point = cfg.point if args.point is None else tuple(float(v) for v in args.point.split(","))
    if len(point) != cfg.space.dimension:
        raise ConfigurationError(f"point needs {cfg.space.dimension} coordinates, got {len(point)}")
    for axis in range(cfg.space.dimension):
        closed = conf_deriv(cfg.field, axis, point, cfg.space)
        limit, est = conf_deriv_limit(cfg.field, axis, point, cfg.space)
        print(f"axis={axis + 1} conf_deriv={closed!r} limit={limit!r} est_error={est:.3e}")
    return EXIT_OK


def cmd_integrate(cfg: ScenarioConfig, args: argparse.Namespace) -> int:
    if cfg.space.dimension == 1:
        lo, hi = (cfg.bounds or cfg.space.box())[0]
        value = conf_integral(cfg.field, 0, lo, hi, cfg.space)
    else:
        value = conf_integral_multi(cfg.field, cfg.space, cfg.grid, cfg.bounds)
    print(f"integral={value!r}")
    return EXIT_OK


def cmd_action(cfg: ScenarioConfig, args: argparse.Namespace) -> int:
    value = action(cfg.lagrangian, cfg.field, cfg.space, cfg.grid, cfg.bounds)
    print(f"action={value!r}")
    return EXIT_OK


def cmd_el(cfg: ScenarioConfig, args: argparse.Namespace) -> int:
    composite = CompositeLagrangian(cfg.lagrangian, cfg.space)
    points = cfg.space.check_points(cfg.grid.points(cfg.space))
    residual = map_points(lambda pts: cfg.field.evaluate(composite.el_residual, pts), points, args.threads)
    path = write_csv(
        cfg.output_path("el"),
        coordinate_header(cfg.space.dimension) + ["residual"],
        (tuple(p) + (r,) for p, r in zip(points, residual)),
    )
    print(f"max_abs_residual={float(np.max(np.abs(residual)))!r} rows={points.shape[0]} file={path}")
    return EXIT_OK


def write_noether_outputs(cfg: ScenarioConfig, threads: int = 1) -> Dict[str, float]:
    space, gen = cfg.space, cfg.generator
    if not gen.anchored:
        logger.warning("generator %s is not anchored at the sector endpoint", ", ".join(gen.labels))
    analysis = NoetherAnalysis(space, cfg.lagrangian, gen)
    points = space.check_points(cfg.grid.points(space))
    D, M = space.dimension, gen.M

    def evaluate(pts: np.ndarray) -> np.ndarray:
        theta = analysis.evaluate(analysis.current_exprs, cfg.field, pts).reshape(pts.shape[0], -1)
        B = analysis.evaluate(analysis.breaking_exprs, cfg.field, pts)
        div = analysis.evaluate(analysis.divergence_exprs, cfg.field, pts)
        T = analysis.evaluate(analysis.emt_exprs, cfg.field, pts).reshape(pts.shape[0], -1)
        return np.concatenate([theta, B, div, T], axis=1)

    table = map_points(evaluate, points, threads)
    theta = table[:, : M * D].reshape(-1, M, D)
    B = table[:, M * D : M * D + M]
    div = table[:, M * D + M : M * D + 2 * M]
    T = table[:, M * D + 2 * M :].reshape(-1, D, D)
    angular = amt_from_emt(points, T)

    coords = coordinate_header(D)
    write_csv(
        cfg.output_path("noether"),
        coords + ["sigma", "i", "theta", "B", "div_theta"],
        (
            tuple(points[n]) + (s + 1, i + 1, theta[n, s, i], B[n, s], div[n, s])
            for n in range(points.shape[0])
            for s in range(M)
            for i in range(D)
        ),
    )
    write_csv(
        cfg.output_path("emt"),
        coords + ["i", "j", "T"],
        (tuple(points[n]) + (i + 1, j + 1, T[n, i, j]) for n in range(points.shape[0]) for i in range(D) for j in range(D)),
    )
    write_csv(
        cfg.output_path("amt"),
        coords + ["i", "k", "j", "M"],
        (
            tuple(points[n]) + (i + 1, k + 1, j + 1, angular[n, i, k, j])
            for n in range(points.shape[0])
            for i in range(D)
            for k in range(D)
            for j in range(D)
        ),
    )
    return {"max_abs_B": float(np.max(np.abs(B))), "max_abs_div_theta": float(np.max(np.abs(div)))}


def cmd_noether(cfg: ScenarioConfig, args: argparse.Namespace) -> int:
    summary = write_noether_outputs(cfg, args.threads)
    direct, formula = action_variation(cfg.generator, cfg.lagrangian, cfg.field, cfg.space, cfg.grid, cfg.beta, cfg.bounds)
    summary.update(dS_direct=direct, dS_formula=formula)
    print(" ".join(f"{k}={v!r}" for k, v in summary.items()) + f" directory={cfg.output_dir}")
    return EXIT_OK


def write_oscillator_outputs(cfg: ScenarioConfig) -> Dict[str, float]:
    osc = cfg.oscillator
    alpha = cfg.space.alpha
    p = osc.params(alpha)
    t0, t_end = osc.start(alpha), osc.end(alpha)
    if osc.mode == "integrated":
        traj = integrate(p, t0, osc.phi0, osc.v0, t_end, osc.tolerance, osc.samples)
    else:
        if not p.has_constants:
            p = fit_constants(p, t0, osc.phi0, osc.v0)
        traj = analytic_trajectory(p, min(t0, t_end), max(t0, t_end), osc.samples)
    phi_analytic, _ = analytic_solution(traj.params, traj.t)
    abs_err = np.abs(traj.phi - phi_analytic)
    write_csv(
        cfg.output_path("trajectory"),
        ["t", "phi", "dphi_dt", "phi_analytic", "abs_err"],
        zip(traj.t, traj.phi, traj.dphi_dt, phi_analytic, abs_err),
    )
    trace = energy_trace(traj)
    write_csv(
        cfg.output_path("energy"),
        ["t", "E", "E_tilde", "drift_pred", "drift_meas"],
        zip(trace.t, trace.E, trace.E_tilde, trace.drift_pred, trace.drift_meas),
    )
    return {"max_abs_err": float(np.max(abs_err)), "max_abs_E_tilde": float(np.max(np.abs(trace.E_tilde)))}


def cmd_oscillator(cfg: ScenarioConfig, args: argparse.Namespace) -> int:
    summary = write_oscillator_outputs(cfg)
    print(" ".join(f"{k}={v!r}" for k, v in summary.items()) + f" directory={cfg.output_dir}")
    return EXIT_OK


def cmd_verify(cfg: ScenarioConfig, args: argparse.Namespace) -> int:
    results = run_suites(cfg.verify.suites, cfg.verify.seed)
    for result in results:
        print(result.summary_line())
    write_csv(
        cfg.output_path("verify"),
        ["suite", "status", "max_err"],
        ((r.name, r.status, r.max_err) for r in results),
    )
    write_oscillator_outputs(cfg)
    write_noether_outputs(cfg, args.threads)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY_FAILED


COMMANDS: Dict[str, Callable[[ScenarioConfig, argparse.Namespace], int]] = {
    "deriv": cmd_deriv,
    "integrate": cmd_integrate,
    "action": cmd_action,
    "el": cmd_el,
    "noether": cmd_noether,
    "oscillator": cmd_oscillator,
    "verify": cmd_verify,
}

HELP = {
    "deriv": "conformable derivative at [point] x: closed form and limit ladder",
    "integrate": "alpha-integral of the field over [integrate] bounds",
    "action": "fractional action of the Lagrangian along the field",
    "el": "Euler-Lagrange residual over the grid (el.csv)",
    "noether": "Noether currents, breaking terms, EMT and AMT over the grid; first-order action variation",
    "oscillator": "fractional oscillator trajectory and energy trace",
    "verify": f"property suites ({', '.join(SUITES)})",
}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="scenario INI file (default: built-in scenario)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory (overrides [output] directory)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads for grid sweeps")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for randomized suites")
    common.add_argument(
        "--log-level",
        default=argparse.SUPPRESS,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="stderr log level (default WARNING)",
    )

    parser = argparse.ArgumentParser(
        prog="fracfield", description="Conformable fractional field theory toolkit", parents=[common]
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name, help=HELP[name], parents=[common])
        if name == "deriv":
            cmd.add_argument("--point", default=None, help="comma-separated point (overrides [point] x)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    threads = getattr(args, "threads", 1)
    args.threads = max(1, threads)
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(args, "log_level", "WARNING"),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = load_config(getattr(args, "config", None))
        cfg = cfg.with_overrides(out=getattr(args, "out", None), seed=getattr(args, "seed", None))
        return COMMANDS[args.command](cfg, args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericFailure as exc:
        print(f"numeric failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
