"""Conformable derivatives, weights and α-integrals.

Right sector: ∂^α f = (x-a)^(1-α) ∂f. Left sector: ∂^α f = -(b-x)^(1-α) ∂f.
α-integrals weight by (x-a)^(α-1) or (b-x)^(α-1) and are always computed in
u = ρ^α, where the weighted measure becomes du/α exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ConfigurationError, ConvergenceError, SectorError
from .field import FieldSource, alpha_derivative_expr
from .quadrature import adaptive_integral, panel_rule
from .space import Bounds, GridSpec, Side, SpaceSpec, is_single_point

logger = logging.getLogger(__name__)

PointLike = Union[float, Sequence[float], np.ndarray]
Integrand = Union[FieldSource, Callable[[np.ndarray], np.ndarray]]

LIMIT_LEVELS = 12
LIMIT_ORDER = 2
LIMIT_TOLERANCE = 1e-6


def _unwrap(values: np.ndarray, single: bool) -> Union[float, np.ndarray]:
    return float(values[0]) if single else values


def weight(x: PointLike, space: SpaceSpec) -> Union[float, np.ndarray]:
    """Δ weight: ∏(x_i-a_i)^(α-1) (Right) or ∏(b_i-x_i)^(α-1) (Left)."""
    points = space.check_points(x)
    return _unwrap(space.weight(points), is_single_point(x, space.dimension))


def conf_deriv(f: FieldSource, axis: int, x: PointLike, space: SpaceSpec) -> Union[float, np.ndarray]:
    """Conformable partial derivative of ``f`` along ``axis`` (0-based)."""
    _check_axis(axis, space)
    points = space.check_points(x)
    values = f.evaluate(alpha_derivative_expr(space, axis), points)
    return _unwrap(values, is_single_point(x, space.dimension))


def conf_deriv_limit(
    f: FieldSource,
    axis: int,
    x: PointLike,
    space: SpaceSpec,
    *,
    levels: int = LIMIT_LEVELS,
    max_order: int = LIMIT_ORDER,
    tolerance: float = LIMIT_TOLERANCE,
) -> Tuple[float, float]:
    """Difference-quotient definition with Richardson extrapolation.

    Q(ε) = [f(x + ε ρ^(1-α) e_i) - f(x)] / ε, negated in the Left sector,
    on ε_k = ε_0 2^(-k). Returns the tableau entry with the smallest error
    estimate together with that estimate.
    """
    _check_axis(axis, space)
    if not is_single_point(x, space.dimension):
        raise ConfigurationError("conf_deriv_limit takes a single point")
    point = space.check_points(x)[0]
    ax = space.axes[axis]
    rho = float(ax.distance(point[axis]))
    step_scale = rho ** (1.0 - space.alpha)
    sign = 1.0 if ax.side is Side.RIGHT else -1.0
    eps = 1e-2 * max(1.0, abs(point[axis] - ax.endpoint)) * 0.5 ** np.arange(levels + 1)

    shifted = np.repeat(point[None, :], eps.size + 1, axis=0)
    shifted[1:, axis] += eps * step_scale
    values = np.asarray(f.values(shifted), dtype=float)
    quotients = sign * (values[1:] - values[0]) / eps

    value, error = _richardson(quotients, max_order)
    logger.debug("limit ladder axis=%d x=%s value=%.17g err=%.3e", axis, point.tolist(), value, error)
    if error > tolerance * max(1.0, abs(value)):
        raise ConvergenceError(
            f"difference quotient did not converge: error estimate {error:.3e} at x={point.tolist()}",
            estimate=error,
        )
    return value, error


def _richardson(quotients: np.ndarray, max_order: int) -> Tuple[float, float]:
    """Neville tableau for step ratio 2 with error powers ε, ε², ...."""
    n = quotients.size
    table = np.zeros((n, max_order + 1))
    table[:, 0] = quotients
    best_value, best_error = float(quotients[-1]), np.inf
    for k in range(1, n):
        for j in range(1, min(k, max_order) + 1):
            factor = 2.0**j - 1.0
            table[k, j] = table[k, j - 1] + (table[k, j - 1] - table[k - 1, j - 1]) / factor
            error = max(abs(table[k, j] - table[k, j - 1]), abs(table[k, j] - table[k - 1, j - 1]))
            if error <= best_error:
                best_value, best_error = float(table[k, j]), float(error)
    return best_value, best_error


def conf_integral(
    f: Integrand,
    axis: int,
    lower: float,
    upper: float,
    space: SpaceSpec,
    *,
    point: Optional[Sequence[float]] = None,
    panels: int = 8,
    order: int = 10,
    tolerance: float = 1e-12,
) -> float:
    """Weighted integral ∫ ρ_i^(α-1) f dx_i from ``lower`` to ``upper``.

    Both limits must lie in the sector closure; touching the endpoint is
    allowed. For D > 1 the remaining coordinates are taken from ``point``.
    """
    _check_axis(axis, space)
    ax = space.axes[axis]
    limits = np.array([lower, upper], dtype=float)
    if np.any(ax.distance(limits) < 0):
        raise SectorError(f"integration limits {limits.tolist()} leave the {ax.side.value} sector of axis {axis + 1}")
    if lower == upper:
        return 0.0
    if space.dimension > 1 and point is None:
        raise ConfigurationError("conf_integral on a multi-dimensional space needs the fixed coordinates in 'point'")
    base = np.zeros(space.dimension) if point is None else np.asarray(point, dtype=float).reshape(-1)
    fn = _as_callable(f)

    u_limits = ax.to_u(limits, space.alpha)
    # u grows away from the endpoint, opposite to x in the Left sector
    orientation = 1.0 if ax.side is Side.RIGHT else -1.0
    direction = orientation * np.sign(u_limits[1] - u_limits[0])
    u_lo, u_hi = float(np.min(u_limits)), float(np.max(u_limits))

    def integrand(u: np.ndarray) -> np.ndarray:
        pts = np.repeat(base[None, :], u.size, axis=0)
        pts[:, axis] = ax.from_u(u, space.alpha)
        return np.asarray(fn(pts), dtype=float)

    value, _ = adaptive_integral(
        integrand, np.linspace(u_lo, u_hi, panels + 1), order=order, rel_tol=tolerance
    )
    return float(direction * value / space.alpha)


@dataclass(frozen=True)
class TensorRule:
    """Fixed product rule: Σ weights · g(points) ≈ ∫ Δ g d^Dx over a box."""

    points: np.ndarray
    weights: np.ndarray

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))


def tensor_rule(
    space: SpaceSpec, grid: GridSpec, bounds: Optional[Bounds] = None, order: Optional[int] = None
) -> TensorRule:
    box = space.box(bounds)
    n = grid.order if order is None else order
    axis_nodes, axis_weights = [], []
    for axis, ax in enumerate(space.axes):
        u_nodes, u_weights = panel_rule(grid.panels(space, axis, box[axis]), n)
        axis_nodes.append(ax.from_u(u_nodes, space.alpha))
        axis_weights.append(u_weights / space.alpha)
    mesh = np.meshgrid(*axis_nodes, indexing="ij")
    weights = np.ones_like(mesh[0])
    for axis, w in enumerate(np.meshgrid(*axis_weights, indexing="ij")):
        weights = weights * w
    points = np.stack([m.ravel() for m in mesh], axis=1)
    return TensorRule(points, weights.ravel())


def conf_integral_multi(
    f: Integrand,
    space: SpaceSpec,
    grid: GridSpec,
    bounds: Optional[Bounds] = None,
    *,
    tolerance: Optional[float] = None,
) -> float:
    """α-integral over a box (default: the sector closure of every axis).

    With ``tolerance`` set, the result is checked against a rule of half the
    order and ``ConvergenceError`` is raised when they disagree.
    """
    fn = _as_callable(f)
    rule = tensor_rule(space, grid, bounds)
    value = rule.integrate(np.asarray(fn(rule.points), dtype=float))
    if tolerance is not None:
        coarse_rule = tensor_rule(space, grid, bounds, order=max(2, grid.order // 2))
        coarse = coarse_rule.integrate(np.asarray(fn(coarse_rule.points), dtype=float))
        estimate = abs(value - coarse)
        if estimate > tolerance * max(1.0, abs(value)):
            raise ConvergenceError(
                f"tensor quadrature estimate {estimate:.3e} exceeds tolerance; refine [grid] n_points or order",
                estimate=estimate,
            )
    return value


def _as_callable(f: Integrand) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(f, FieldSource):
        return f.values
    if callable(f):
        return f
    raise TypeError(f"cannot integrate {type(f).__name__}")


def _check_axis(axis: int, space: SpaceSpec) -> None:
    if not 0 <= axis < space.dimension:
        raise ConfigurationError(f"axis {axis} out of range for D = {space.dimension}")
