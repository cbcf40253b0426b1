#!/usr/bin/env python3
"""
Delayed Oscillator Comparison
Integrates the fractional oscillator for several orders from the common anchor
phase (phi = 1, dphi/dt = 1 at m t^alpha / alpha = 2 pi) and writes one
trajectory and energy CSV per order, next to a per-order summary line.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

REPO_ROOT = Path(__file__).resolve().parent.parent
if str(REPO_ROOT / "src") not in sys.path:
    sys.path.insert(0, str(REPO_ROOT / "src"))

from fracfield.csvio import write_csv
from fracfield.errors import FracFieldError
from fracfield.oscillator import (
    OscillatorParams,
    analytic_solution,
    anchor_time,
    energy_trace,
    integrate,
    zero_crossings,
)


def run_order(alpha: float, args: argparse.Namespace) -> None:
    p = OscillatorParams(args.m, args.xi_d, alpha)
    t0 = anchor_time(alpha, args.m)
    traj = integrate(p, t0, 1.0, 1.0, t0 + args.span, args.tolerance, args.samples)
    phi_analytic, _ = analytic_solution(traj.params, traj.t)
    abs_err = np.abs(traj.phi - phi_analytic)
    trace = energy_trace(traj)

    out = args.out / f"alpha_{alpha:g}"
    write_csv(
        out / "trajectory.csv",
        ["t", "phi", "dphi_dt", "phi_analytic", "abs_err"],
        zip(traj.t, traj.phi, traj.dphi_dt, phi_analytic, abs_err),
    )
    write_csv(
        out / "energy.csv",
        ["t", "E", "E_tilde", "drift_pred", "drift_meas"],
        zip(trace.t, trace.E, trace.E_tilde, trace.drift_pred, trace.drift_meas),
    )
    roots = zero_crossings(traj)
    gaps = np.diff(roots)
    print(
        f"alpha={alpha:g} t0={t0:.6g} max_abs_err={float(np.max(abs_err)):.3e} "
        f"max_abs_E_tilde={float(np.max(np.abs(trace.E_tilde))):.3e} "
        f"zero_crossings={roots.size} mean_gap={float(np.mean(gaps)) if gaps.size else float('nan'):.4g}"
    )


def main():
    parser = argparse.ArgumentParser(description="Delayed fractional oscillator for several orders")
    parser.add_argument("--alphas", type=float, nargs="+", default=[1.0, 0.9, 0.5], help="Fractional orders")
    parser.add_argument("--span", type=float, default=10.0, help="Integration length after the anchor time")
    parser.add_argument("--m", type=float, default=1.0, help="Mass coefficient")
    parser.add_argument("--xi-d", type=float, default=1.0, help="Kinetic coefficient")
    parser.add_argument("--tolerance", type=float, default=1e-12, help="Integrator tolerance")
    parser.add_argument("--samples", type=int, default=401, help="Output samples per order")
    parser.add_argument("--out", type=Path, default=Path("out/oscillator"), help="Output directory")
    args = parser.parse_args()

    for alpha in args.alphas:
        try:
            run_order(alpha, args)
        except FracFieldError as exc:
            print(f"❌ alpha={alpha:g}: {type(exc).__name__}: {exc}")
            return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
