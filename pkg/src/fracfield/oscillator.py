"""Fractional harmonic oscillator in the Right sector (a = 0, t > 0).

L = ½ ξ_d (∂^α_t φ)² - ½ m² φ² gives the Euler–Lagrange ODE

    t^(2-2α) φ'' + (1-α) t^(1-2α) φ' + m̃² φ = 0,     m̃ = m/√ξ_d,

solved by φ = A cos θ + B sin θ with θ = m̃ t^α / α. The energy
E = ½ ξ_d t^(1-α) φ'² + ½ t^(α-1) m² φ² is not conserved for α < 1, while
E - ½ m² (A² + B²) t^(α-1) is.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import ConfigurationError, SectorError, SingularApproachError
from .expr import FIELD_SYMBOL, Expr, Var, alpha_derivative_symbol, coordinate_symbol, cos, sin
from .space import Side, SpaceSpec, check_alpha
from .variational import LagrangianSpec

logger = logging.getLogger(__name__)

ArrayOrFloat = Union[float, np.ndarray]
StateFn = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]

DRIFT_STEP = 1e-3


class Provenance(str, Enum):
    ANALYTIC = "analytic"
    INTEGRATED = "integrated"


@dataclass(frozen=True)
class OscillatorParams:
    """Coefficients of the oscillator; (A, B) stay unset until known or fitted."""

    m: float = 1.0
    xi_d: float = 1.0
    alpha: float = 1.0
    A: Optional[float] = None
    B: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        if not (np.isfinite(self.m) and self.m > 0):
            raise ConfigurationError(f"m must be positive, got {self.m}")
        if not (np.isfinite(self.xi_d) and self.xi_d > 0):
            raise ConfigurationError(f"xi_d must be positive, got {self.xi_d}")
        for name in ("A", "B"):
            value = getattr(self, name)
            if value is not None and not np.isfinite(value):
                raise ConfigurationError(f"{name} must be finite, got {value}")

    @property
    def m_tilde(self) -> float:
        return self.m / np.sqrt(self.xi_d)

    @property
    def has_constants(self) -> bool:
        return self.A is not None and self.B is not None

    @property
    def amplitude_sq(self) -> float:
        A, B = self.constants()
        return A * A + B * B

    def constants(self) -> Tuple[float, float]:
        if not self.has_constants:
            raise ConfigurationError("integration constants (A, B) are not set; fit them first")
        return float(self.A), float(self.B)

    def with_constants(self, A: float, B: float) -> "OscillatorParams":
        return replace(self, A=float(A), B=float(B))

    def to_dict(self) -> Dict[str, object]:
        return {
            "m": self.m,
            "xi_d": self.xi_d,
            "alpha": self.alpha,
            "A": self.A,
            "B": self.B,
            "m_tilde": self.m_tilde,
        }


@dataclass(frozen=True, eq=False)
class Trajectory:
    t: np.ndarray
    phi: np.ndarray
    dphi_dt: np.ndarray
    provenance: Provenance
    params: OscillatorParams
    dense: Optional[StateFn] = None

    def __post_init__(self) -> None:
        t = np.asarray(self.t, dtype=float)
        phi = np.asarray(self.phi, dtype=float)
        v = np.asarray(self.dphi_dt, dtype=float)
        if not (t.shape == phi.shape == v.shape) or t.ndim != 1 or t.size < 1:
            raise ConfigurationError("trajectory arrays must be one-dimensional and aligned")
        if t[0] <= 0:
            raise SectorError(f"trajectory must start at t > 0, got {t[0]}")
        if np.any(np.diff(t) <= 0):
            raise ConfigurationError("trajectory times must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "dphi_dt", v)

    @property
    def span(self) -> Tuple[float, float]:
        return float(self.t[0]), float(self.t[-1])

    def state(self, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(φ, dφ/dt) at arbitrary times inside the span."""
        if self.dense is None:
            return analytic_solution(self.params, t)
        return self.dense(np.asarray(t, dtype=float))

    def to_dict(self) -> Dict[str, object]:
        return {
            "provenance": self.provenance.value,
            "params": self.params.to_dict(),
            "t": self.t.tolist(),
            "phi": self.phi.tolist(),
            "dphi_dt": self.dphi_dt.tolist(),
        }


@dataclass(frozen=True, eq=False)
class EnergyTrace:
    t: np.ndarray
    E: np.ndarray
    E_tilde: np.ndarray
    drift_pred: np.ndarray
    drift_meas: np.ndarray

    def __post_init__(self) -> None:
        sizes = {np.asarray(getattr(self, k)).shape for k in ("t", "E", "E_tilde", "drift_pred", "drift_meas")}
        if len(sizes) != 1:
            raise ConfigurationError("energy trace columns must be aligned")

    def to_dict(self) -> Dict[str, object]:
        return {k: np.asarray(getattr(self, k)).tolist() for k in ("t", "E", "E_tilde", "drift_pred", "drift_meas")}


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------
def _positive_time(t: ArrayOrFloat) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(arr <= 0):
        raise SectorError("the oscillator is defined for t > 0 only")
    return arr


def _out(values: np.ndarray, like: ArrayOrFloat) -> ArrayOrFloat:
    return float(values) if np.ndim(like) == 0 else values


def phase(p: OscillatorParams, t: ArrayOrFloat) -> ArrayOrFloat:
    """θ = m̃ t^α / α."""
    tt = _positive_time(t)
    return _out(p.m_tilde * np.power(tt, p.alpha) / p.alpha, t)


def analytic_solution(p: OscillatorParams, t: ArrayOrFloat) -> Tuple[ArrayOrFloat, ArrayOrFloat]:
    """φ and its ordinary time derivative on the analytic family."""
    A, B = p.constants()
    tt = _positive_time(t)
    theta = p.m_tilde * np.power(tt, p.alpha) / p.alpha
    phi = A * np.cos(theta) + B * np.sin(theta)
    v = p.m_tilde * np.power(tt, p.alpha - 1.0) * (-A * np.sin(theta) + B * np.cos(theta))
    return _out(phi, t), _out(v, t)


def ode_rhs(p: OscillatorParams, t: ArrayOrFloat, phi: ArrayOrFloat, v: ArrayOrFloat) -> ArrayOrFloat:
    """φ'' = -[(1-α) t^(1-2α) φ' + m̃² φ] / t^(2-2α)."""
    tt = _positive_time(t)
    a = p.alpha
    out = -((1.0 - a) * np.power(tt, 1.0 - 2.0 * a) * v + p.m_tilde**2 * np.asarray(phi)) / np.power(tt, 2.0 - 2.0 * a)
    return _out(np.asarray(out, dtype=float), t)


def ode_rhs_left(p: OscillatorParams, t: ArrayOrFloat, phi: ArrayOrFloat, v: ArrayOrFloat) -> ArrayOrFloat:
    """Time-reversed ODE on t < 0, b = 0.

    (-t)^(2-2α) φ'' - (1-α)(-t)^(1-2α) φ' + m̃² φ = 0, so g(t) = φ(-t) solves
    it whenever φ solves the Right ODE.
    """
    tt = np.asarray(t, dtype=float)
    if np.any(tt >= 0):
        raise SectorError("the time-reversed oscillator is defined for t < 0 only")
    a = p.alpha
    rho = -tt
    out = ((1.0 - a) * np.power(rho, 1.0 - 2.0 * a) * v - p.m_tilde**2 * np.asarray(phi)) / np.power(rho, 2.0 - 2.0 * a)
    return _out(np.asarray(out, dtype=float), t)


def energy(p: OscillatorParams, t: ArrayOrFloat, phi: ArrayOrFloat, v: ArrayOrFloat) -> ArrayOrFloat:
    tt = _positive_time(t)
    a = p.alpha
    out = 0.5 * p.xi_d * np.power(tt, 1.0 - a) * np.square(v) + 0.5 * np.power(tt, a - 1.0) * p.m**2 * np.square(phi)
    return _out(np.asarray(out, dtype=float), t)


def energy_drift_predicted(p: OscillatorParams, t: ArrayOrFloat) -> ArrayOrFloat:
    """dE/dt on-shell: ½ (α-1) m² (A² + B²) t^(α-2)."""
    tt = _positive_time(t)
    out = 0.5 * (p.alpha - 1.0) * p.m**2 * p.amplitude_sq * np.power(tt, p.alpha - 2.0)
    return _out(np.asarray(out, dtype=float), t)


def regularized_energy(p: OscillatorParams, t: ArrayOrFloat, phi: ArrayOrFloat, v: ArrayOrFloat) -> ArrayOrFloat:
    """E - ½ m² (A² + B²) t^(α-1); identically zero on the analytic family."""
    offset = 0.5 * p.m**2 * p.amplitude_sq * np.power(_positive_time(t), p.alpha - 1.0)
    out = np.asarray(energy(p, t, phi, v)) - offset
    return _out(np.asarray(out, dtype=float), t)


def fit_constants(p: OscillatorParams, t0: float, phi0: float, v0: float) -> OscillatorParams:
    """(A, B) of the analytic member through (φ0, v0) at t0."""
    theta = float(phase(p, t0))
    c, s = np.cos(theta), np.sin(theta)
    w = v0 * float(_positive_time(t0)) ** (1.0 - p.alpha) / p.m_tilde
    A, B = np.linalg.solve(np.array([[c, s], [-s, c]]), np.array([phi0, w]))
    return p.with_constants(A, B)


def anchor_time(alpha: float, m: float = 1.0) -> float:
    """Start time (2πα/m)^(1/α): one classical period of phase."""
    alpha = check_alpha(alpha)
    if m <= 0:
        raise ConfigurationError(f"m must be positive, got {m}")
    return float((2.0 * np.pi * alpha / m) ** (1.0 / alpha))


def solution_expr(p: OscillatorParams) -> Expr:
    """The analytic member as an expression in x_1 (usable as a ClosedForm field)."""
    A, B = p.constants()
    t = Var(coordinate_symbol(0))
    theta = (p.m_tilde / p.alpha) * t ** p.alpha
    return A * cos(theta) + B * sin(theta)


def oscillator_lagrangian(p: OscillatorParams, sector: Union[Side, str] = Side.RIGHT) -> LagrangianSpec:
    g = Var(alpha_derivative_symbol(0))
    phi = Var(FIELD_SYMBOL)
    density = 0.5 * p.xi_d * g**2 - 0.5 * p.m**2 * phi**2
    return LagrangianSpec(density, Side.parse(sector), 1)


def oscillator_space(p: OscillatorParams, sector: Union[Side, str] = Side.RIGHT, truncation: float = 10.0) -> SpaceSpec:
    return SpaceSpec.uniform(1, p.alpha, sector, 0.0, truncation=truncation)


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------
def analytic_trajectory(p: OscillatorParams, t0: float, t_end: float, samples: int = 201) -> Trajectory:
    if not t_end > t0:
        raise ConfigurationError(f"t_end must exceed t0, got [{t0}, {t_end}]")
    t = np.linspace(t0, t_end, samples)
    phi, v = analytic_solution(p, t)
    return Trajectory(t, phi, v, Provenance.ANALYTIC, p)


def integrate(
    p: OscillatorParams,
    t0: float,
    phi0: float,
    v0: float,
    t_end: float,
    tolerance: float = 1e-10,
    samples: Optional[int] = 201,
) -> Trajectory:
    """Integrate the ODE from (t0, φ0, v0) with DOP853.

    ``t_end < t0`` integrates backwards toward the endpoint; the returned
    trajectory is always ordered by increasing t. The constants (A, B) of the
    trajectory's params are fitted at t0.
    """
    if t0 <= 0 or t_end <= 0:
        raise SectorError(f"integration needs t0 > 0 and t_end > 0, got t0={t0}, t_end={t_end}")
    if t0 == t_end:
        raise ConfigurationError("t_end must differ from t0")
    if not tolerance > 0:
        raise ConfigurationError(f"tolerance must be positive, got {tolerance}")

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return np.array([y[1], ode_rhs(p, t, y[0], y[1])])

    t_eval = None if samples is None else np.linspace(t0, t_end, samples)
    result = solve_ivp(
        rhs,
        (t0, t_end),
        [phi0, v0],
        method="DOP853",
        t_eval=t_eval,
        rtol=tolerance,
        atol=tolerance,
        dense_output=True,
    )
    if result.status == -1:
        raise SingularApproachError(
            f"integrator stopped at t={result.t[-1]:.6g}: {result.message}", estimate=float(result.t[-1])
        )
    logger.debug("DOP853 alpha=%s: %d evaluations, %d samples", p.alpha, result.nfev, result.t.size)

    t, phi, v = result.t, result.y[0], result.y[1]
    if t_end < t0:
        t, phi, v = t[::-1], phi[::-1], v[::-1]
    solution = result.sol

    def dense(times: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        y = solution(times)
        return y[0], y[1]

    fitted = fit_constants(p, t0, phi0, v0)
    return Trajectory(t, phi, v, Provenance.INTEGRATED, fitted, dense)


def measured_drift(p: OscillatorParams, trajectory: Trajectory, t: np.ndarray) -> np.ndarray:
    """Fourth-order finite difference of E along the trajectory, step 1e-3·t.

    Centered where the stencil fits in the trajectory span, one-sided at the ends.
    """
    t = np.asarray(t, dtype=float)
    lo, hi = trajectory.span
    h = DRIFT_STEP * t

    def E(times: np.ndarray) -> np.ndarray:
        phi, v = trajectory.state(times)
        return np.asarray(energy(p, times, phi, v))

    out = np.empty_like(t)
    if trajectory.dense is None:
        # analytic states exist everywhere on t > 0
        forward = backward = np.zeros(t.shape, dtype=bool)
    else:
        forward = t - 2 * h < lo
        backward = (t + 2 * h > hi) & ~forward
    centered = ~(forward | backward)
    if np.any(centered):
        tc, hc = t[centered], h[centered]
        out[centered] = (-E(tc + 2 * hc) + 8 * E(tc + hc) - 8 * E(tc - hc) + E(tc - 2 * hc)) / (12 * hc)
    for mask, sign in ((forward, 1.0), (backward, -1.0)):
        if np.any(mask):
            tm, hm = t[mask], sign * h[mask]
            out[mask] = (
                -25 * E(tm) + 48 * E(tm + hm) - 36 * E(tm + 2 * hm) + 16 * E(tm + 3 * hm) - 3 * E(tm + 4 * hm)
            ) / (12 * hm)
    return out


def energy_trace(trajectory: Trajectory) -> EnergyTrace:
    p = trajectory.params
    t, phi, v = trajectory.t, trajectory.phi, trajectory.dphi_dt
    return EnergyTrace(
        t=t,
        E=np.asarray(energy(p, t, phi, v)),
        E_tilde=np.asarray(regularized_energy(p, t, phi, v)),
        drift_pred=np.asarray(energy_drift_predicted(p, t)),
        drift_meas=measured_drift(p, trajectory, t),
    )


def zero_crossings(trajectory: Trajectory) -> np.ndarray:
    """Times where φ changes sign, refined with brentq on the dense solution."""
    phi = trajectory.phi
    idx = np.where(np.sign(phi[:-1]) * np.sign(phi[1:]) < 0)[0]
    roots = []
    for k in idx:
        a, b = float(trajectory.t[k]), float(trajectory.t[k + 1])
        roots.append(brentq(lambda s: float(np.asarray(trajectory.state(np.array([s]))[0])[0]), a, b, xtol=1e-14))
    return np.array(roots)


__all__ = [
    "EnergyTrace",
    "OscillatorParams",
    "Provenance",
    "Trajectory",
    "analytic_solution",
    "analytic_trajectory",
    "anchor_time",
    "energy",
    "energy_drift_predicted",
    "energy_trace",
    "fit_constants",
    "integrate",
    "measured_drift",
    "ode_rhs",
    "ode_rhs_left",
    "oscillator_lagrangian",
    "oscillator_space",
    "phase",
    "regularized_energy",
    "solution_expr",
    "zero_crossings",
]
