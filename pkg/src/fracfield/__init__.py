"""Conformable fractional calculus, actions and Noether currents.

Public entry points are re-exported here; see the submodules for details.
"""

from .calculus import conf_deriv, conf_deriv_limit, conf_integral, conf_integral_multi, weight
from .errors import (
    ConfigurationError,
    ConvergenceError,
    CurrentMismatchError,
    DomainViolationError,
    ExprSyntaxError,
    FracFieldError,
    InterpolationRangeError,
    NumericFailure,
    SampleFileError,
    SectorError,
    SingularApproachError,
    UnboundVariableError,
    UnknownIdentifierError,
)
from .expr import Expr, VarSpace, diff, evaluate, parse, render, substitute
from .field import ClosedForm, FieldSource, Sampled
from .noether import (
    BreakingSample,
    CurrentSample,
    NoetherAnalysis,
    SymmetryGenerator,
    action_variation,
    amt,
    breaking_term,
    combine_currents,
    commutation_residual,
    current_divergence,
    derivative_increment,
    emt,
    emt_divergence,
    noether_current,
)
from .oscillator import (
    EnergyTrace,
    OscillatorParams,
    Trajectory,
    analytic_solution,
    energy,
    energy_drift_predicted,
    fit_constants,
    integrate,
    ode_rhs,
    regularized_energy,
)
from .space import AxisDomain, GridSpec, Side, SpaceSpec, Spacing
from .variational import ELResidualSample, LagrangianSpec, action, el_residual, lagrangian_partials

__version__ = "0.1.0"

__all__ = [
    "AxisDomain",
    "BreakingSample",
    "ClosedForm",
    "ConfigurationError",
    "ConvergenceError",
    "CurrentMismatchError",
    "CurrentSample",
    "DomainViolationError",
    "ELResidualSample",
    "EnergyTrace",
    "Expr",
    "ExprSyntaxError",
    "FieldSource",
    "FracFieldError",
    "GridSpec",
    "InterpolationRangeError",
    "LagrangianSpec",
    "NoetherAnalysis",
    "NumericFailure",
    "OscillatorParams",
    "Sampled",
    "SampleFileError",
    "SectorError",
    "Side",
    "SingularApproachError",
    "SpaceSpec",
    "Spacing",
    "SymmetryGenerator",
    "Trajectory",
    "UnboundVariableError",
    "UnknownIdentifierError",
    "VarSpace",
    "action",
    "action_variation",
    "amt",
    "analytic_solution",
    "breaking_term",
    "combine_currents",
    "commutation_residual",
    "conf_deriv",
    "conf_deriv_limit",
    "conf_integral",
    "conf_integral_multi",
    "current_divergence",
    "derivative_increment",
    "diff",
    "el_residual",
    "emt",
    "emt_divergence",
    "energy",
    "energy_drift_predicted",
    "evaluate",
    "fit_constants",
    "integrate",
    "lagrangian_partials",
    "noether_current",
    "ode_rhs",
    "parse",
    "regularized_energy",
    "render",
    "substitute",
    "weight",
]
