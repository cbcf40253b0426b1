"""Fractional actions and Euler–Lagrange residuals."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .calculus import PointLike, conf_integral_multi
from .errors import ConfigurationError
from .expr import (
    FIELD_SYMBOL,
    Expr,
    VarRole,
    VarSpace,
    alpha_derivative_symbol,
    diff,
    free_variables,
    parse,
    sub,
    sum_of,
)
from .field import ClosedForm, FieldSource, compose_density, conformable_total_derivative
from .space import Bounds, GridSpec, Side, SpaceSpec, as_points, is_single_point


@dataclass(frozen=True)
class LagrangianSpec:
    """Density L(φ, g_1..g_D) with no explicit coordinate dependence."""

    density: Expr
    sector: Side
    dimension: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "sector", Side.parse(self.sector))
        allowed = {FIELD_SYMBOL} | {alpha_derivative_symbol(i) for i in range(self.dimension)}
        stray = sorted(free_variables(self.density) - allowed)
        if stray:
            raise ConfigurationError(
                f"Lagrangian density may depend only on phi and g_1..g_{self.dimension}; "
                f"found {', '.join(stray)} (explicit coordinate dependence is not supported)"
            )

    @classmethod
    def parse(cls, text: str, sector: Union[Side, str], dimension: int) -> "LagrangianSpec":
        space = VarSpace.for_dimension(dimension).with_roles(VarRole.FIELD, VarRole.ALPHA_DERIVATIVE)
        return cls(parse(text, space), Side.parse(sector), dimension)

    @cached_property
    def partials(self) -> Tuple[Expr, Tuple[Expr, ...]]:
        dphi = diff(self.density, FIELD_SYMBOL)
        dg = tuple(diff(self.density, alpha_derivative_symbol(i)) for i in range(self.dimension))
        return dphi, dg

    def check_space(self, space: SpaceSpec) -> None:
        if space.dimension != self.dimension:
            raise ConfigurationError(
                f"Lagrangian is {self.dimension}-dimensional but the space has D = {space.dimension}"
            )
        if space.sector is not self.sector:
            raise ConfigurationError(
                f"{self.sector.value} Lagrangian needs every axis in the {self.sector.value} sector"
            )


@dataclass(frozen=True)
class ELResidualSample:
    point: Tuple[float, ...]
    residual: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.residual):
            raise ConfigurationError(f"non-finite residual at {self.point}")

    def to_dict(self) -> Dict[str, object]:
        return {"point": list(self.point), "residual": self.residual}


def lagrangian_partials(L: LagrangianSpec) -> Tuple[Expr, List[Expr]]:
    """(∂L/∂φ, [∂L/∂g_i]) as exact expressions."""
    dphi, dg = L.partials
    return dphi, list(dg)


class CompositeLagrangian:
    """The density and its partials composed with the conformable derivatives.

    All attributes are composite expressions over x, phi and jet symbols.
    """

    def __init__(self, L: LagrangianSpec, space: SpaceSpec) -> None:
        L.check_space(space)
        self.L = L
        self.space = space

    @cached_property
    def density(self) -> Expr:
        return compose_density(self.L.density, self.space)

    @cached_property
    def field_partial(self) -> Expr:
        return compose_density(self.L.partials[0], self.space)

    @cached_property
    def momenta(self) -> Tuple[Expr, ...]:
        return tuple(compose_density(p, self.space) for p in self.L.partials[1])

    def d(self, e: Expr, axis: int) -> Expr:
        return conformable_total_derivative(e, axis, self.space)

    @cached_property
    def el_residual(self) -> Expr:
        # ∂_φL - Σ_i ∂^α_i(∂L/∂g_i); the Left sign is carried by the factor
        return sub(self.field_partial, sum_of(self.d(p, i) for i, p in enumerate(self.momenta)))


def action(
    L: LagrangianSpec,
    f: FieldSource,
    space: SpaceSpec,
    grid: GridSpec,
    bounds: Optional[Bounds] = None,
) -> float:
    """S = ∫ Δ L(φ, ∂^α φ) d^Dx over ``bounds`` (default: the sector box)."""
    composite = CompositeLagrangian(L, space)
    density = composite.density
    return conf_integral_multi(lambda pts: f.evaluate(density, pts), space, grid, bounds)


def el_residual(
    L: LagrangianSpec, f: FieldSource, x: PointLike, space: SpaceSpec
) -> Union[float, np.ndarray]:
    """Euler–Lagrange residual at one point or an (N, D) batch; zero on-shell."""
    composite = CompositeLagrangian(L, space)
    points = space.check_points(x)
    values = f.evaluate(composite.el_residual, points)
    return float(values[0]) if is_single_point(x, space.dimension) else values


def el_residual_samples(
    L: LagrangianSpec, f: FieldSource, points: np.ndarray, space: SpaceSpec
) -> List[ELResidualSample]:
    values = np.atleast_1d(el_residual(L, f, points, space))
    return [ELResidualSample(tuple(float(c) for c in p), float(v)) for p, v in zip(as_points(points, space.dimension), values)]


def variation_derivative(
    L: LagrangianSpec,
    field_expr: Expr,
    bump: Expr,
    space: SpaceSpec,
    grid: GridSpec,
    bounds: Bounds,
    steps: Sequence[float] = (1e-3, 5e-4, 2.5e-4),
) -> List[float]:
    """Central differences of S[φ + s η] in s, one per step size."""
    estimates = []
    for s in steps:
        plus = ClosedForm(field_expr + s * bump, space.dimension)
        minus = ClosedForm(field_expr - s * bump, space.dimension)
        estimates.append((action(L, plus, space, grid, bounds) - action(L, minus, space, grid, bounds)) / (2 * s))
    return estimates
