#!/usr/bin/env python3
"""FracField MCP Server – conformable fractional calculus and field theory tools.

Exposes the fracfield library to MCP clients. Fields, Lagrangians and
generators are passed as expression text (``x_1``, ``phi``, ``g_1`` ...,
``^`` for powers); every tool answers with a short human-readable report.

Tools exposed (7 total):
  Calculus:
    • conformable_derivative   – closed form and limit-ladder value at a point
    • alpha_integral           – weighted α-integral along one axis

  Variational:
    • euler_lagrange_residual  – EL residual of a field under a Lagrangian

  Noether:
    • noether_current_at       – Θ^{α,i}_(σ) for a generator at a point
    • breaking_term_at         – B_(σ) and its five term groups at a point

  Oscillator & verification:
    • oscillator_energy        – energy, drift and regularized energy on the analytic family
    • run_verification         – property suites with PASS/FAIL lines
"""

from __future__ import annotations

import os
import sys
from pathlib import Path
from typing import Annotated, List

from pydantic import Field

# ---------------------------------------------------------------------------
# Bootstrap – ensure the src/ layout is importable from a checkout
# ---------------------------------------------------------------------------
REPO_ROOT = Path(__file__).resolve().parent
_SRC_DIR = REPO_ROOT / "src"
if _SRC_DIR.exists() and str(_SRC_DIR) not in sys.path:
    sys.path.insert(0, str(_SRC_DIR))

from mcp.server.fastmcp import FastMCP

from fracfield.calculus import conf_deriv, conf_deriv_limit, conf_integral
from fracfield.errors import ConfigurationError, FracFieldError, NumericFailure
from fracfield.field import ClosedForm
from fracfield.noether import BREAKING_TERM_NAMES, SymmetryGenerator, breaking_term, noether_current
from fracfield.oscillator import (
    OscillatorParams,
    analytic_solution,
    energy,
    energy_drift_predicted,
    regularized_energy,
)
from fracfield.space import SpaceSpec
from fracfield.suites import SUITES, run_suites
from fracfield.variational import LagrangianSpec, el_residual

mcp = FastMCP("FracField")

DEFAULT_SEED = int(os.environ.get("FRACFIELD_SEED", "0"))


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------
def _space(dimension: int, alpha: float, side: str, endpoint: float) -> SpaceSpec:
    return SpaceSpec.uniform(dimension, alpha, side, endpoint)


def _point(point: List[float], dimension: int) -> tuple:
    if len(point) != dimension:
        raise ConfigurationError(f"point needs {dimension} coordinates, got {len(point)}")
    return tuple(float(v) for v in point)


def _failure(exc: FracFieldError) -> str:
    kind = "configuration" if isinstance(exc, ConfigurationError) else "numeric"
    return f"❌ {kind} error ({type(exc).__name__}): {exc}"


def _generator(kind: str, space: SpaceSpec, f_texts: List[str], c_texts: List[str]) -> SymmetryGenerator:
    if kind == "custom":
        rows = [[part.strip() for part in text.split(";")] for text in f_texts]
        shifts = c_texts or ["0"] * len(rows)
        return SymmetryGenerator.custom(space, rows, shifts)
    if kind not in ("translation", "rotation", "scaling", "field_shift"):
        raise ConfigurationError(f"unknown generator kind '{kind}'")
    return getattr(SymmetryGenerator, kind)(space)


_Alpha = Annotated[float, Field(description="Fractional order α in (0, 1]")]
_Side = Annotated[str, Field(description="Sector: 'right' (x > a) or 'left' (x < b)")]
_Endpoint = Annotated[float, Field(description="Sector endpoint a (right) or b (left), same on every axis")]


# ===================================================================
# TOOL: conformable_derivative
# ===================================================================
@mcp.tool()
def conformable_derivative(
    field: Annotated[str, Field(description="Closed-form field, e.g. 'sin(x_1)'")],
    point: Annotated[List[float], Field(description="Evaluation point (D coordinates)")],
    alpha: _Alpha,
    axis: Annotated[int, Field(description="Axis index, 1-based")] = 1,
    side: _Side = "right",
    endpoint: _Endpoint = 0.0,
) -> str:
    """Conformable partial derivative: closed form vs. the difference-quotient ladder."""
    try:
        space = _space(len(point), alpha, side, endpoint)
        f = ClosedForm.parse(field, space.dimension)
        x = _point(point, space.dimension)
        closed = conf_deriv(f, axis - 1, x, space)
        limit, est = conf_deriv_limit(f, axis - 1, x, space)
    except FracFieldError as exc:
        return _failure(exc)
    return (
        f"✅ ∂^{alpha}_{axis} of {field} at {list(x)} ({side} sector)\n"
        f"  Closed form     : {closed!r}\n"
        f"  Limit ladder    : {limit!r}\n"
        f"  Ladder estimate : {est:.3e}"
    )


# ===================================================================
# TOOL: alpha_integral
# ===================================================================
@mcp.tool()
def alpha_integral(
    field: Annotated[str, Field(description="Closed-form integrand in x_1 (1D)")],
    lower: Annotated[float, Field(description="Lower limit (inside the sector closure)")],
    upper: Annotated[float, Field(description="Upper limit (inside the sector closure)")],
    alpha: _Alpha,
    side: _Side = "right",
    endpoint: _Endpoint = 0.0,
) -> str:
    """Weighted integral ∫ ρ^(α-1) f dx, computed in u = ρ^α."""
    try:
        space = _space(1, alpha, side, endpoint)
        value = conf_integral(ClosedForm.parse(field, 1), 0, lower, upper, space)
    except FracFieldError as exc:
        return _failure(exc)
    return f"✅ I^{alpha} of {field} from {lower} to {upper} ({side} sector)\n  Value : {value!r}"


# ===================================================================
# TOOL: euler_lagrange_residual
# ===================================================================
@mcp.tool()
def euler_lagrange_residual(
    lagrangian: Annotated[str, Field(description="Density in phi and g_1..g_D, e.g. '0.5*g_1^2 - 0.5*phi^2'")],
    field: Annotated[str, Field(description="Closed-form field in x_1..x_D")],
    points: Annotated[List[List[float]], Field(description="Evaluation points, each with D coordinates")],
    alpha: _Alpha,
    side: _Side = "right",
    endpoint: _Endpoint = 0.0,
    tolerance: Annotated[float, Field(description="On-shell threshold for |residual|")] = 1e-8,
) -> str:
    """Euler–Lagrange residual ∂L/∂φ - Σ ∂^α_i(∂L/∂g_i) along the field."""
    if not points:
        return "❌ No points given."
    try:
        D = len(points[0])
        space = _space(D, alpha, side, endpoint)
        L = LagrangianSpec.parse(lagrangian, side, D)
        values = el_residual(L, ClosedForm.parse(field, D), [_point(p, D) for p in points], space)
    except FracFieldError as exc:
        return _failure(exc)
    worst = max(abs(float(v)) for v in values)
    marker = "✅ on-shell" if worst < tolerance else "❌ off-shell"
    lines = [f"{marker}: max |residual| = {worst:.3e} over {len(points)} point(s)"]
    lines += [f"  {list(p)} → {float(v)!r}" for p, v in zip(points, values)]
    return "\n".join(lines)


# ===================================================================
# TOOL: noether_current_at
# ===================================================================
@mcp.tool()
def noether_current_at(
    lagrangian: Annotated[str, Field(description="Density in phi and g_1..g_D")],
    field: Annotated[str, Field(description="Closed-form field in x_1..x_D")],
    point: Annotated[List[float], Field(description="Evaluation point (D coordinates)")],
    alpha: _Alpha,
    generator: Annotated[
        str, Field(description="translation | rotation | scaling | field_shift | custom")
    ] = "translation",
    f_components: Annotated[
        List[str], Field(description="Custom generators: one 'f^1; ...; f^D' text per σ")
    ] = [],
    c_components: Annotated[List[str], Field(description="Custom generators: one C text per σ")] = [],
    side: _Side = "right",
    endpoint: _Endpoint = 0.0,
) -> str:
    """Noether current Θ^{α,i}_(σ) = C P_i + Σ_k f^k ∂_kφ P_i - w_i f^i L."""
    try:
        space = _space(len(point), alpha, side, endpoint)
        D = space.dimension
        L = LagrangianSpec.parse(lagrangian, side, D)
        gen = _generator(generator, space, f_components, c_components)
        sample = noether_current(gen, L, ClosedForm.parse(field, D), _point(point, D), space)
    except FracFieldError as exc:
        return _failure(exc)
    lines = [f"✅ Noether current at {list(sample.point)} ({gen.M} generator(s), anchored={gen.anchored})"]
    for s, label in enumerate(gen.labels):
        comps = ", ".join(f"{v!r}" for v in sample.theta[s])
        lines.append(f"  {label:<16}: [{comps}]")
    return "\n".join(lines)


# ===================================================================
# TOOL: breaking_term_at
# ===================================================================
@mcp.tool()
def breaking_term_at(
    lagrangian: Annotated[str, Field(description="Density in phi and g_1..g_D")],
    field: Annotated[str, Field(description="Closed-form field in x_1..x_D")],
    point: Annotated[List[float], Field(description="Evaluation point (D coordinates)")],
    alpha: _Alpha,
    generator: Annotated[
        str, Field(description="translation | rotation | scaling | field_shift | custom")
    ] = "translation",
    f_components: Annotated[
        List[str], Field(description="Custom generators: one 'f^1; ...; f^D' text per σ")
    ] = [],
    c_components: Annotated[List[str], Field(description="Custom generators: one C text per σ")] = [],
    side: _Side = "right",
    endpoint: _Endpoint = 0.0,
    tolerance: Annotated[float, Field(description="Threshold for reporting B as cancelled")] = 1e-6,
) -> str:
    """Breaking term B_(σ), which vanishes on-shell, with its term groups."""
    try:
        space = _space(len(point), alpha, side, endpoint)
        D = space.dimension
        L = LagrangianSpec.parse(lagrangian, side, D)
        gen = _generator(generator, space, f_components, c_components)
        sample = breaking_term(gen, L, ClosedForm.parse(field, D), _point(point, D), space)
    except FracFieldError as exc:
        return _failure(exc)
    lines = []
    for s, label in enumerate(gen.labels):
        B = float(sample.B[s])
        marker = "✅" if abs(B) < tolerance else "❌"
        lines.append(f"{marker} {label}: B = {B!r}")
        for name, value in zip(BREAKING_TERM_NAMES, sample.terms[s]):
            lines.append(f"    {name:<18}: {float(value)!r}")
    return "\n".join(lines)


# ===================================================================
# TOOL: oscillator_energy
# ===================================================================
@mcp.tool()
def oscillator_energy(
    t: Annotated[List[float], Field(description="Positive times")],
    alpha: _Alpha,
    m: Annotated[float, Field(description="Mass coefficient m > 0")] = 1.0,
    xi_d: Annotated[float, Field(description="Kinetic coefficient ξ_d > 0")] = 1.0,
    A: Annotated[float, Field(description="cos amplitude of the analytic solution")] = 1.0,
    B: Annotated[float, Field(description="sin amplitude of the analytic solution")] = 0.0,
) -> str:
    """Energy E, predicted drift dE/dt and regularized energy on the analytic family."""
    try:
        p = OscillatorParams(m, xi_d, alpha, A, B)
        lines = [f"✅ Oscillator α={alpha}, m̃={p.m_tilde:.6g}, A={A}, B={B}"]
        for time in t:
            phi, v = analytic_solution(p, time)
            lines.append(
                f"  t={time!r}: E={energy(p, time, phi, v)!r} "
                f"dE/dt={energy_drift_predicted(p, time)!r} "
                f"E_tilde={regularized_energy(p, time, phi, v)!r}"
            )
    except FracFieldError as exc:
        return _failure(exc)
    return "\n".join(lines)


# ===================================================================
# TOOL: run_verification
# ===================================================================
@mcp.tool()
def run_verification(
    suites: Annotated[
        List[str], Field(description=f"Suites to run (empty = all): {', '.join(SUITES)}")
    ] = [],
    seed: Annotated[int, Field(description="Seed for randomized suites")] = DEFAULT_SEED,
) -> str:
    """Run property suites and report `SUITE <name> PASS|FAIL max_err=<v>` lines."""
    try:
        results = run_suites(suites, seed)
    except (ConfigurationError, NumericFailure) as exc:
        return _failure(exc)
    passed = sum(r.passed for r in results)
    header = "✅" if passed == len(results) else "❌"
    lines = [f"{header} {passed}/{len(results)} suites passed"]
    lines += [r.summary_line() for r in results]
    return "\n".join(lines)


def main():
    print("🚀 FracField MCP Server started – conformable calculus tools ready.", file=sys.stderr)
    mcp.run()


if __name__ == "__main__":
    main()
