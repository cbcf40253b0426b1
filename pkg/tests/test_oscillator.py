from __future__ import annotations

import numpy as np
import pytest

from fracfield.errors import ConfigurationError, SectorError
from fracfield.field import ClosedForm
from fracfield.oscillator import (
    OscillatorParams,
    Provenance,
    Trajectory,
    analytic_solution,
    analytic_trajectory,
    anchor_time,
    energy,
    energy_drift_predicted,
    energy_trace,
    fit_constants,
    integrate,
    measured_drift,
    ode_rhs,
    ode_rhs_left,
    oscillator_lagrangian,
    oscillator_space,
    phase,
    regularized_energy,
    solution_expr,
    zero_crossings,
)
from fracfield.variational import el_residual

HALF = OscillatorParams(m=1.0, xi_d=1.0, alpha=0.5, A=1.0, B=0.0)


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------
def test_params_validation():
    with pytest.raises(ConfigurationError):
        OscillatorParams(alpha=1.5)
    with pytest.raises(ConfigurationError):
        OscillatorParams(m=0.0)
    with pytest.raises(ConfigurationError):
        OscillatorParams(xi_d=-1.0)
    with pytest.raises(ConfigurationError):
        OscillatorParams().constants()


def test_m_tilde_and_dict():
    p = OscillatorParams(m=2.0, xi_d=4.0, alpha=0.7, A=1.0, B=2.0)
    assert p.m_tilde == pytest.approx(1.0)
    assert p.amplitude_sq == 5.0
    assert p.to_dict()["m_tilde"] == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------
def test_analytic_solution_examples():
    phi, _ = analytic_solution(HALF, 1.0)
    assert phi == pytest.approx(np.cos(2.0))
    assert phi == pytest.approx(-0.416147, abs=1e-6)

    classical = OscillatorParams(alpha=1.0, A=1.0, B=0.0)
    t = np.linspace(0.1, 10.0, 50)
    phi, v = analytic_solution(classical, t)
    np.testing.assert_allclose(phi, np.cos(t), atol=1e-14)
    np.testing.assert_allclose(v, -np.sin(t), atol=1e-14)


def test_analytic_solution_rejects_non_positive_time():
    with pytest.raises(SectorError):
        analytic_solution(HALF, 0.0)
    with pytest.raises(SectorError):
        phase(HALF, -1.0)


@pytest.mark.parametrize("alpha", [0.3, 0.6, 1.0])
def test_solution_satisfies_euler_lagrange(alpha):
    p = OscillatorParams(m=1.3, xi_d=0.8, alpha=alpha, A=0.4, B=-0.9)
    residual = el_residual(
        oscillator_lagrangian(p), ClosedForm(solution_expr(p), 1), np.linspace(0.05, 9.5, 40), oscillator_space(p)
    )
    assert np.max(np.abs(residual)) < 1e-8


def test_ode_rhs_matches_second_derivative():
    p = OscillatorParams(m=1.0, xi_d=1.0, alpha=0.6, A=0.7, B=0.2)
    f = ClosedForm(solution_expr(p), 1)
    t = np.linspace(0.2, 8.0, 30)
    phi, v = analytic_solution(p, t)
    exact = f.partial(t, (0, 0))
    np.testing.assert_allclose(ode_rhs(p, t, phi, v), exact, rtol=1e-9, atol=1e-12)


def test_ode_rhs_trivial_cases():
    classical = OscillatorParams(m=2.0, alpha=1.0)
    assert ode_rhs(classical, 1.3, 0.5, 7.0) == pytest.approx(-2.0)
    assert ode_rhs(HALF, 2.0, 0.0, 0.0) == 0.0
    with pytest.raises(SectorError):
        ode_rhs(HALF, 0.0, 1.0, 1.0)


def test_left_ode_accepts_reversed_solution():
    p = OscillatorParams(m=1.0, xi_d=1.0, alpha=0.5, A=1.0, B=0.3)
    t = np.linspace(0.3, 6.0, 20)
    phi, v = analytic_solution(p, t)
    f = ClosedForm(solution_expr(p), 1)
    second = f.partial(t, (0, 0))
    # g(s) = φ(-s): g' = -φ', g'' = φ''
    np.testing.assert_allclose(ode_rhs_left(p, -t, phi, -v), second, rtol=1e-9, atol=1e-12)
    with pytest.raises(SectorError):
        ode_rhs_left(p, 1.0, 0.0, 0.0)


def test_energy_examples():
    phi, v = analytic_solution(HALF, 1.0)
    assert energy(HALF, 1.0, phi, v) == pytest.approx(0.5, rel=1e-12)
    assert energy_drift_predicted(HALF, 1.0) == pytest.approx(-0.25)
    assert energy_drift_predicted(OscillatorParams(alpha=1.0, A=1.0, B=2.0), 3.0) == 0.0


def test_energy_on_shell_closed_form():
    p = OscillatorParams(m=1.5, xi_d=1.0, alpha=0.7, A=0.3, B=1.2)
    t = np.linspace(0.2, 9.0, 40)
    phi, v = analytic_solution(p, t)
    np.testing.assert_allclose(energy(p, t, phi, v), 0.5 * p.m**2 * p.amplitude_sq * t ** (p.alpha - 1.0), rtol=1e-12)
    np.testing.assert_allclose(regularized_energy(p, t, phi, v), 0.0, atol=1e-12)


def test_drift_matches_finite_difference():
    p = OscillatorParams(alpha=0.5, A=0.8, B=0.6)
    t = np.linspace(0.5, 5.0, 19)
    h = 1e-4 * t

    def E(times):
        phi, v = analytic_solution(p, times)
        return energy(p, times, phi, v)

    fd = (E(t + h) - E(t - h)) / (2 * h)
    pred = energy_drift_predicted(p, t)
    assert np.max(np.abs(fd - pred) / np.abs(pred)) < 1e-5


def test_regularized_energy_off_shell():
    # φ = t: E = ½ t^(1-α) + ½ t^(α-1) t²
    t = np.array([0.5, 2.0, 4.0])
    expected = 0.5 * t**0.5 + 0.5 * t**-0.5 * t**2 - 0.5 * t**-0.5
    np.testing.assert_allclose(regularized_energy(HALF, t, t, np.ones_like(t)), expected, rtol=1e-12)


def test_fit_constants_recovers_family():
    p = OscillatorParams(m=1.2, xi_d=0.9, alpha=0.8, A=-0.4, B=1.7)
    t0 = 2.3
    phi0, v0 = analytic_solution(p, t0)
    fitted = fit_constants(OscillatorParams(m=1.2, xi_d=0.9, alpha=0.8), t0, phi0, v0)
    assert fitted.A == pytest.approx(-0.4, rel=1e-12)
    assert fitted.B == pytest.approx(1.7, rel=1e-12)


def test_anchor_time():
    assert anchor_time(1.0) == pytest.approx(2 * np.pi)
    assert anchor_time(0.5) == pytest.approx(np.pi**2)


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------
def test_trajectory_invariants():
    p = HALF
    with pytest.raises(SectorError):
        Trajectory(np.array([0.0, 1.0]), np.zeros(2), np.zeros(2), Provenance.ANALYTIC, p)
    with pytest.raises(ConfigurationError):
        Trajectory(np.array([2.0, 1.0]), np.zeros(2), np.zeros(2), Provenance.ANALYTIC, p)
    with pytest.raises(ConfigurationError):
        analytic_trajectory(p, 3.0, 1.0)


@pytest.mark.parametrize("alpha", [1.0, 0.9, 0.5])
def test_delayed_oscillator_follows_fitted_family(alpha):
    p = OscillatorParams(m=1.0, xi_d=1.0, alpha=alpha)
    t0 = anchor_time(alpha)
    traj = integrate(p, t0, 1.0, 1.0, t0 + 10.0, tolerance=1e-12, samples=301)
    assert traj.provenance is Provenance.INTEGRATED
    phi, _ = analytic_solution(traj.params, traj.t)
    assert np.max(np.abs(traj.phi - phi)) < 1e-6


def test_classical_limit_from_near_origin():
    p = OscillatorParams(alpha=1.0)
    traj = integrate(p, 1e-3, np.cos(1e-3), -np.sin(1e-3), 10.0, tolerance=1e-12)
    np.testing.assert_allclose(traj.phi, np.cos(traj.t), atol=1e-7)


def test_backward_integration_is_time_ordered():
    p = OscillatorParams(alpha=0.7)
    traj = integrate(p, 5.0, 1.0, 0.0, 1.0, samples=51)
    assert traj.span == (1.0, 5.0)
    assert traj.phi[-1] == pytest.approx(1.0)


def test_integration_needs_positive_times():
    with pytest.raises(SectorError):
        integrate(HALF, 0.0, 1.0, 1.0, 2.0)
    with pytest.raises(ConfigurationError):
        integrate(HALF, 2.0, 1.0, 1.0, 2.0)


def test_energy_trace_integrated_matches_analytic():
    p = OscillatorParams(alpha=0.5)
    t0 = anchor_time(0.5)
    traj = integrate(p, t0, 1.0, 1.0, t0 + 10.0, tolerance=1e-12)
    trace = energy_trace(traj)
    phi, v = analytic_solution(traj.params, traj.t)
    np.testing.assert_allclose(trace.E, energy(traj.params, traj.t, phi, v), atol=1e-6)
    assert np.max(np.abs(trace.E_tilde)) < 1e-6
    rel = np.abs(trace.drift_meas - trace.drift_pred) / np.abs(trace.drift_pred)
    assert np.max(rel) < 1e-4


def test_measured_drift_on_analytic_trajectory():
    traj = analytic_trajectory(HALF, 0.5, 5.0, samples=46)
    drift = measured_drift(HALF, traj, traj.t)
    np.testing.assert_allclose(drift, energy_drift_predicted(HALF, traj.t), rtol=1e-6)


def test_zero_crossings_spread_out_for_fractional_order():
    p = OscillatorParams(alpha=0.5, A=1.0, B=0.0)
    traj = analytic_trajectory(p, 0.5, 200.0, samples=4001)
    roots = zero_crossings(traj)
    # cos(2√t) vanishes at t = ((k + ½)π / 2)², k = 0..8 below t = 200
    assert roots.size == 9
    expected = ((np.arange(9) + 0.5) * np.pi / 2.0) ** 2
    np.testing.assert_allclose(roots, expected, rtol=1e-9)
    assert np.all(np.diff(np.diff(roots)) > 0)


def test_trace_columns_serialise():
    trace = energy_trace(analytic_trajectory(HALF, 1.0, 2.0, samples=5))
    assert set(trace.to_dict()) == {"t", "E", "E_tilde", "drift_pred", "drift_meas"}
