#!/usr/bin/env python3
"""FracField MCP Server – tool validation suite.

Tests every tool exposed by mcp_server.py (7 tools total), verifying:
  - Correct output structure and ✅/❌ markers
  - Values against closed forms of the fractional oscillator
  - Configuration and numeric failures reported instead of raised

Tool inventory (must match @mcp.tool() decorators in mcp_server.py):
  Calculus:                   conformable_derivative, alpha_integral
  Variational:                euler_lagrange_residual
  Noether:                    noether_current_at, breaking_term_at
  Oscillator & verification:  oscillator_energy, run_verification
"""

from __future__ import annotations

import math
import re
import sys
from pathlib import Path

import pytest

# ---------------------------------------------------------------------------
# Bootstrap imports
# ---------------------------------------------------------------------------
REPO_ROOT = Path(__file__).resolve().parent.parent
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from mcp_server import (
    alpha_integral,
    breaking_term_at,
    conformable_derivative,
    euler_lagrange_residual,
    noether_current_at,
    oscillator_energy,
    run_verification,
)

# ---------------------------------------------------------------------------
# Shared constants & test data
# ---------------------------------------------------------------------------
TOOL_COUNT = 7  # Must match the number of @mcp.tool() decorators

OSCILLATOR = "0.5*g_1^2 - 0.5*phi^2"
HALF_SOLUTION = "cos(2*x_1^0.5)"
WAVE_2D = "0.5*(g_1^2 + g_2^2) - 0.5*phi^2"
PLANE_WAVE = "cos(0.7648421872844885*x_1^0.6/0.6 + 0.644217687237691*x_2^0.6/0.6)"


def _number(label: str, text: str) -> float:
    match = re.search(rf"{label}\s*[:=]\s*(\S+)", text)
    assert match, f"{label} missing from:\n{text}"
    return float(match.group(1))


# ═══════════════════════════════════════════════════════════════════════════
# Calculus
# ═══════════════════════════════════════════════════════════════════════════
class TestCalculus:
    """conformable_derivative, alpha_integral"""

    def test_derivative_closed_form_matches_ladder(self):
        result = conformable_derivative(field="sin(x_1)", point=[1.0], alpha=0.5)
        assert "✅" in result
        closed = _number("Closed form", result)
        limit = _number("Limit ladder", result)
        assert closed == pytest.approx(math.cos(1.0), rel=1e-14)
        assert abs(closed - limit) < 1e-6

    def test_derivative_second_axis(self):
        result = conformable_derivative(field="x_1 * x_2^2", point=[2.0, 3.0], alpha=1.0, axis=2)
        assert _number("Closed form", result) == pytest.approx(12.0)

    def test_derivative_left_sector(self):
        # Left sector: ∂^α(-x) = (-x)^(1-α) for x < 0
        result = conformable_derivative(field="-x_1", point=[-4.0], alpha=0.5, side="left")
        assert "✅" in result
        assert _number("Closed form", result) == pytest.approx(2.0)

    def test_derivative_at_endpoint_is_numeric_failure(self):
        result = conformable_derivative(field="sin(x_1)", point=[0.0], alpha=0.5)
        assert "❌ numeric error" in result
        assert "SectorError" in result

    def test_invalid_alpha_is_configuration_error(self):
        result = conformable_derivative(field="sin(x_1)", point=[1.0], alpha=1.5)
        assert "❌ configuration error" in result

    def test_unparsable_field(self):
        result = conformable_derivative(field="sin(x_1", point=[1.0], alpha=0.5)
        assert "❌ configuration error (ExprSyntaxError)" in result

    def test_integral_of_one(self):
        result = alpha_integral(field="1", lower=0.0, upper=4.0, alpha=0.5)
        assert "✅" in result
        assert _number("Value", result) == pytest.approx(4.0, rel=1e-12)

    def test_integral_outside_sector(self):
        result = alpha_integral(field="1", lower=-1.0, upper=1.0, alpha=0.5)
        assert "❌ numeric error (SectorError)" in result


# ═══════════════════════════════════════════════════════════════════════════
# Variational
# ═══════════════════════════════════════════════════════════════════════════
class TestVariational:
    """euler_lagrange_residual"""

    def test_oscillator_solution_on_shell(self):
        result = euler_lagrange_residual(
            lagrangian=OSCILLATOR, field=HALF_SOLUTION, points=[[0.5], [1.0], [4.0]], alpha=0.5
        )
        assert result.startswith("✅ on-shell")
        assert result.count("→") == 3

    def test_off_shell_field(self):
        result = euler_lagrange_residual(lagrangian=OSCILLATOR, field="x_1", points=[[2.0]], alpha=0.5)
        assert result.startswith("❌ off-shell")
        assert "-2.5" in result

    def test_plane_wave_on_shell(self):
        result = euler_lagrange_residual(
            lagrangian=WAVE_2D, field=PLANE_WAVE, points=[[1.0, 2.0], [0.5, 3.0]], alpha=0.6, tolerance=1e-6
        )
        assert result.startswith("✅ on-shell")

    def test_no_points(self):
        assert euler_lagrange_residual(lagrangian=OSCILLATOR, field="x_1", points=[], alpha=0.5).startswith("❌")

    def test_explicit_coordinates_rejected(self):
        result = euler_lagrange_residual(lagrangian="x_1*phi^2", field="x_1", points=[[1.0]], alpha=0.5)
        assert "❌ configuration error" in result


# ═══════════════════════════════════════════════════════════════════════════
# Noether
# ═══════════════════════════════════════════════════════════════════════════
class TestNoether:
    """noether_current_at, breaking_term_at"""

    def test_translation_current_is_minus_energy(self):
        result = noether_current_at(lagrangian=OSCILLATOR, field=HALF_SOLUTION, point=[1.0], alpha=0.5)
        assert "✅" in result
        assert "anchored=True" in result
        value = float(re.search(r"translation_1\s*: \[(\S+)\]", result).group(1))
        assert value == pytest.approx(-0.5, rel=1e-12)

    def test_custom_generator(self):
        result = noether_current_at(
            lagrangian=OSCILLATOR,
            field=HALF_SOLUTION,
            point=[1.0],
            alpha=0.5,
            generator="custom",
            f_components=["0"],
            c_components=["1"],
        )
        # field shift: Θ = P_1 = g_1 = sin(2)·(-1)
        value = float(re.search(r": \[(\S+)\]", result).group(1))
        assert value == pytest.approx(-math.sin(2.0), rel=1e-12)

    def test_rotation_needs_two_axes(self):
        result = noether_current_at(
            lagrangian=OSCILLATOR, field=HALF_SOLUTION, point=[1.0], alpha=0.5, generator="rotation"
        )
        assert "❌ configuration error" in result

    def test_unknown_generator(self):
        result = noether_current_at(
            lagrangian=OSCILLATOR, field=HALF_SOLUTION, point=[1.0], alpha=0.5, generator="boost"
        )
        assert "❌ configuration error" in result
        assert "boost" in result

    @pytest.mark.parametrize("generator", ["translation", "scaling"])
    def test_breaking_term_cancels_on_shell(self, generator):
        result = breaking_term_at(
            lagrangian=OSCILLATOR, field=HALF_SOLUTION, point=[2.0], alpha=0.5, generator=generator
        )
        assert result.startswith("✅")
        for name in ("transport", "delta_correction", "weight", "weight_derivative", "el"):
            assert name in result

    def test_breaking_term_rotation_plane_wave(self):
        result = breaking_term_at(
            lagrangian=WAVE_2D, field=PLANE_WAVE, point=[1.0, 2.0], alpha=0.6, generator="rotation"
        )
        assert result.startswith("✅ rotation_12")

    def test_breaking_term_off_shell(self):
        result = breaking_term_at(lagrangian=OSCILLATOR, field="x_1^3", point=[2.0], alpha=0.5, generator="scaling")
        assert result.startswith("❌ scaling")


# ═══════════════════════════════════════════════════════════════════════════
# Oscillator & verification
# ═══════════════════════════════════════════════════════════════════════════
class TestOscillatorAndVerification:
    """oscillator_energy, run_verification"""

    def test_energy_examples(self):
        result = oscillator_energy(t=[1.0], alpha=0.5)
        assert "✅" in result
        assert _number("E", result) == pytest.approx(0.5, rel=1e-12)
        assert _number("dE/dt", result) == pytest.approx(-0.25, rel=1e-12)
        assert abs(_number("E_tilde", result)) < 1e-12

    def test_classical_energy_constant(self):
        result = oscillator_energy(t=[0.5, 3.0, 7.0], alpha=1.0, A=1.0, B=2.0)
        energies = [float(v) for v in re.findall(r" E=(\S+)", result)]
        assert energies == pytest.approx([2.5] * 3, rel=1e-12)
        assert "dE/dt=0.0" in result

    def test_non_positive_time(self):
        assert "❌ numeric error (SectorError)" in oscillator_energy(t=[0.0], alpha=0.5)

    def test_invalid_mass(self):
        assert "❌ configuration error" in oscillator_energy(t=[1.0], alpha=0.5, m=-1.0)

    def test_run_subset(self):
        result = run_verification(suites=["axioms", "commutation"], seed=0)
        assert result.startswith("✅ 2/2 suites passed")
        assert "SUITE axioms PASS" in result
        assert "SUITE commutation PASS" in result

    def test_unknown_suite(self):
        result = run_verification(suites=["nonsense"])
        assert "❌ configuration error" in result
        assert "nonsense" in result


# ═══════════════════════════════════════════════════════════════════════════
# Inventory
# ═══════════════════════════════════════════════════════════════════════════
class TestToolInventory:
    def test_tool_count(self):
        """Exactly TOOL_COUNT tools are importable from mcp_server."""
        imported_tools = [
            alpha_integral,
            breaking_term_at,
            conformable_derivative,
            euler_lagrange_residual,
            noether_current_at,
            oscillator_energy,
            run_verification,
        ]
        assert len(imported_tools) == TOOL_COUNT, (
            f"Expected {TOOL_COUNT} tools, got {len(imported_tools)}. "
            "Update TOOL_COUNT or imports if tools were added/removed."
        )
        assert all(callable(tool) for tool in imported_tools)

    def test_module_docstring_lists_every_tool(self):
        import mcp_server

        assert f"({TOOL_COUNT} total)" in mcp_server.__doc__
        for name in (
            "conformable_derivative",
            "alpha_integral",
            "euler_lagrange_residual",
            "noether_current_at",
            "breaking_term_at",
            "oscillator_energy",
            "run_verification",
        ):
            assert name in mcp_server.__doc__
