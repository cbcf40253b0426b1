"""Sectors, fractional order and sampling grids.

An axis is either a right sector ``[a, ∞)`` (derivatives measured from the
origin ``a``) or a left sector ``(-∞, b]`` (measured towards the endpoint
``b``). Everything sector-specific is expressed through three quantities:

* the conformable factor ``s(x) = (x-a)^(1-α)`` or ``-(b-x)^(1-α)``,
* the signed offset ``r(x) = x-a`` or ``x-b``,
* the distance ``ρ(x) = |r(x)|`` and the u-coordinate ``u = ρ^α``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ConfigurationError, SectorError
from .expr import Expr, Var, VarSpace, as_expr, coordinate_symbol, neg, power

DEFAULT_INNER_OFFSET = 1e-3
DEFAULT_TRUNCATION = 10.0

Bounds = Sequence[Tuple[float, float]]


class Side(str, Enum):
    RIGHT = "right"
    LEFT = "left"

    @classmethod
    def parse(cls, value: Union[str, "Side"]) -> "Side":
        if isinstance(value, Side):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigurationError(f"unknown side '{value}' (expected right or left)") from None

    @property
    def mirror(self) -> "Side":
        return Side.LEFT if self is Side.RIGHT else Side.RIGHT


class Spacing(str, Enum):
    UNIFORM_X = "uniform_x"
    UNIFORM_U = "uniform_u"

    @classmethod
    def parse(cls, value: Union[str, "Spacing"]) -> "Spacing":
        if isinstance(value, Spacing):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigurationError(f"unknown spacing '{value}' (expected uniform_x or uniform_u)") from None


def check_alpha(alpha: object) -> float:
    if isinstance(alpha, (list, tuple, np.ndarray)):
        raise ConfigurationError("a single fractional order alpha is shared by all axes")
    try:
        value = float(alpha)  # type: ignore[arg-type]
    except (TypeError, ValueError):
        raise ConfigurationError(f"alpha must be a real number, got {alpha!r}") from None
    if not (0.0 < value <= 1.0):
        raise ConfigurationError(f"alpha must satisfy 0 < alpha <= 1, got {value}")
    return value


@dataclass(frozen=True)
class AxisDomain:
    side: Side = Side.RIGHT
    endpoint: float = 0.0
    inner_offset: float = DEFAULT_INNER_OFFSET
    truncation: float = DEFAULT_TRUNCATION

    def __post_init__(self) -> None:
        object.__setattr__(self, "side", Side.parse(self.side))
        if not np.isfinite(self.endpoint):
            raise ConfigurationError(f"axis endpoint must be finite, got {self.endpoint}")
        if not (0.0 < self.inner_offset < self.truncation):
            raise ConfigurationError(
                f"need 0 < inner_offset < truncation, got {self.inner_offset} and {self.truncation}"
            )

    # -- numeric helpers ---------------------------------------------------
    def offset(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float) - self.endpoint

    def distance(self, x: np.ndarray) -> np.ndarray:
        r = self.offset(x)
        return r if self.side is Side.RIGHT else -r

    def factor(self, x: np.ndarray, alpha: float) -> np.ndarray:
        rho = self.distance(x)
        s = np.power(rho, 1.0 - alpha)
        return s if self.side is Side.RIGHT else -s

    def to_u(self, x: np.ndarray, alpha: float) -> np.ndarray:
        return np.power(self.distance(x), alpha)

    def from_u(self, u: np.ndarray, alpha: float) -> np.ndarray:
        rho = np.power(np.asarray(u, dtype=float), 1.0 / alpha)
        return self.endpoint + rho if self.side is Side.RIGHT else self.endpoint - rho

    @property
    def coverage(self) -> Tuple[float, float]:
        """Interval on which pointwise operators are sampled."""
        if self.side is Side.RIGHT:
            return self.endpoint + self.inner_offset, self.endpoint + self.truncation
        return self.endpoint - self.truncation, self.endpoint - self.inner_offset

    @property
    def closure(self) -> Tuple[float, float]:
        """Integration box, touching the singular endpoint."""
        if self.side is Side.RIGHT:
            return self.endpoint, self.endpoint + self.truncation
        return self.endpoint - self.truncation, self.endpoint

    # -- symbolic helpers --------------------------------------------------
    def distance_expr(self, axis: int) -> Expr:
        x = Var(coordinate_symbol(axis))
        return x - self.endpoint if self.side is Side.RIGHT else as_expr(self.endpoint) - x

    def offset_expr(self, axis: int) -> Expr:
        return Var(coordinate_symbol(axis)) - self.endpoint

    def factor_expr(self, axis: int, alpha: float) -> Expr:
        s = power(self.distance_expr(axis), as_expr(1.0 - alpha))
        return s if self.side is Side.RIGHT else neg(s)

    def inverse_factor_expr(self, axis: int, alpha: float) -> Expr:
        w = power(self.distance_expr(axis), as_expr(alpha - 1.0))
        return w if self.side is Side.RIGHT else neg(w)

    def factor_slope_expr(self, axis: int, alpha: float) -> Expr:
        """(1-α)ρ^(-α), the derivative of the conformable factor along its own axis."""
        return (1.0 - alpha) * power(self.distance_expr(axis), as_expr(-alpha))


@dataclass(frozen=True)
class SpaceSpec:
    """Dimension, per-axis sectors and the single fractional order."""

    axes: Tuple[AxisDomain, ...]
    alpha: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        axes = tuple(self.axes)
        if len(axes) < 1:
            raise ConfigurationError("a space needs at least one axis")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def uniform(
        cls,
        dimension: int,
        alpha: float,
        side: Union[Side, str] = Side.RIGHT,
        endpoint: Union[float, Sequence[float]] = 0.0,
        inner_offset: Union[float, Sequence[float]] = DEFAULT_INNER_OFFSET,
        truncation: Union[float, Sequence[float]] = DEFAULT_TRUNCATION,
    ) -> "SpaceSpec":
        if dimension < 1:
            raise ConfigurationError(f"dimension must be >= 1, got {dimension}")
        endpoints = _broadcast(endpoint, dimension, "endpoint")
        offsets = _broadcast(inner_offset, dimension, "inner_offset")
        truncations = _broadcast(truncation, dimension, "truncation")
        axes = tuple(
            AxisDomain(Side.parse(side), float(e), float(d), float(t))
            for e, d, t in zip(endpoints, offsets, truncations)
        )
        return cls(axes, alpha)

    @property
    def dimension(self) -> int:
        return len(self.axes)

    @property
    def endpoints(self) -> Tuple[float, ...]:
        return tuple(ax.endpoint for ax in self.axes)

    @property
    def sector(self) -> Optional[Side]:
        """The common side of all axes, or None for mixed spaces."""
        sides = {ax.side for ax in self.axes}
        return sides.pop() if len(sides) == 1 else None

    @property
    def var_space(self) -> VarSpace:
        return VarSpace.for_dimension(self.dimension)

    def mirrored(self) -> "SpaceSpec":
        axes = tuple(
            AxisDomain(ax.side.mirror, ax.endpoint, ax.inner_offset, ax.truncation) for ax in self.axes
        )
        return SpaceSpec(axes, self.alpha)

    def box(self, bounds: Optional[Bounds] = None) -> Tuple[Tuple[float, float], ...]:
        if bounds is None:
            return tuple(ax.closure for ax in self.axes)
        box = tuple((float(lo), float(hi)) for lo, hi in bounds)
        if len(box) != self.dimension:
            raise ConfigurationError(f"expected {self.dimension} bound pairs, got {len(box)}")
        for axis, (lo, hi) in enumerate(box):
            if not lo < hi:
                raise ConfigurationError(f"empty bounds on axis {axis + 1}: [{lo}, {hi}]")
            ax = self.axes[axis]
            if np.any(ax.distance(np.array([lo, hi])) < 0):
                raise SectorError(f"bounds [{lo}, {hi}] leave the {ax.side.value} sector of axis {axis + 1}")
        return box

    def check_points(self, x: Union[Sequence[float], np.ndarray]) -> np.ndarray:
        """Validate points for pointwise operators; returns an (N, D) array.

        Points on the wrong side of an endpoint are always rejected; contact
        with the endpoint is rejected when α < 1 (the weight is singular there).
        """
        points = as_points(x, self.dimension)
        for axis, ax in enumerate(self.axes):
            rho = ax.distance(points[:, axis])
            if np.any(rho < 0):
                raise SectorError(
                    f"point outside the {ax.side.value} sector on axis {axis + 1} (endpoint {ax.endpoint})"
                )
            if self.alpha < 1.0 and np.any(rho == 0):
                raise SectorError(f"endpoint contact on axis {axis + 1}: weight is singular at {ax.endpoint}")
        return points

    def contains(self, x: Union[Sequence[float], np.ndarray]) -> np.ndarray:
        """Boolean mask of points strictly inside the sector on every axis."""
        points = as_points(x, self.dimension)
        inside = np.ones(points.shape[0], dtype=bool)
        for axis, ax in enumerate(self.axes):
            inside &= ax.distance(points[:, axis]) > 0
        return inside

    def weight(self, points: np.ndarray) -> np.ndarray:
        out = np.ones(points.shape[0])
        for axis, ax in enumerate(self.axes):
            out = out * np.power(ax.distance(points[:, axis]), self.alpha - 1.0)
        return out


@dataclass(frozen=True)
class GridSpec:
    """Per-axis sample counts and spacing.

    ``order`` is the number of Gauss–Legendre nodes per quadrature panel;
    the ``n_points - 1`` gaps of the grid are the panels.
    """

    n_points: Tuple[int, ...]
    spacing: Spacing = Spacing.UNIFORM_X
    order: int = 12

    def __post_init__(self) -> None:
        counts = tuple(int(n) for n in self.n_points)
        if not counts or any(n < 2 for n in counts):
            raise ConfigurationError(f"every axis needs n_points >= 2, got {counts}")
        if self.order < 2:
            raise ConfigurationError(f"quadrature order must be >= 2, got {self.order}")
        object.__setattr__(self, "n_points", counts)
        object.__setattr__(self, "spacing", Spacing.parse(self.spacing))

    @classmethod
    def uniform(
        cls, dimension: int, n_points: Union[int, Sequence[int]], spacing: Union[str, Spacing] = Spacing.UNIFORM_X, order: int = 12
    ) -> "GridSpec":
        return cls(tuple(int(n) for n in _broadcast(n_points, dimension, "n_points")), Spacing.parse(spacing), order)

    def _check(self, space: SpaceSpec) -> None:
        if len(self.n_points) != space.dimension:
            raise ConfigurationError(
                f"grid has {len(self.n_points)} axes but the space has {space.dimension}"
            )

    def axis_points(self, space: SpaceSpec, axis: int) -> np.ndarray:
        """Ascending sample coordinates inside the coverage of ``axis``."""
        self._check(space)
        ax = space.axes[axis]
        n = self.n_points[axis]
        lo, hi = ax.inner_offset, ax.truncation
        if self.spacing is Spacing.UNIFORM_X:
            rho = np.linspace(lo, hi, n)
        else:
            rho = np.power(np.linspace(lo**space.alpha, hi**space.alpha, n), 1.0 / space.alpha)
        coords = ax.endpoint + rho if ax.side is Side.RIGHT else ax.endpoint - rho
        return np.sort(coords)

    def points(self, space: SpaceSpec) -> np.ndarray:
        """Tensor grid as an (N, D) array, first axis varying slowest."""
        axes = [self.axis_points(space, i) for i in range(space.dimension)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def panels(self, space: SpaceSpec, axis: int, bounds: Tuple[float, float]) -> np.ndarray:
        """Ascending u-coordinate breakpoints splitting ``bounds`` into panels."""
        self._check(space)
        ax = space.axes[axis]
        n = self.n_points[axis]
        u_ends = np.sort(ax.to_u(np.asarray(bounds, dtype=float), space.alpha))
        if self.spacing is Spacing.UNIFORM_U:
            return np.linspace(u_ends[0], u_ends[1], n)
        x_breaks = np.linspace(bounds[0], bounds[1], n)
        return np.sort(ax.to_u(x_breaks, space.alpha))


def as_points(x: Union[float, Sequence[float], np.ndarray], dimension: int) -> np.ndarray:
    """Coerce one point or a batch of points to an (N, D) float array."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.shape[0] == dimension else arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[1] != dimension:
        raise ConfigurationError(f"expected points with {dimension} coordinates, got shape {np.shape(x)}")
    return arr


def is_single_point(x: Union[float, Sequence[float], np.ndarray], dimension: int) -> bool:
    arr = np.asarray(x, dtype=float)
    return arr.ndim == 0 or (arr.ndim == 1 and arr.shape[0] == dimension)


def _broadcast(value: Union[float, int, Sequence], dimension: int, name: str) -> List:
    if isinstance(value, (list, tuple, np.ndarray)):
        values = list(value)
        if len(values) == 1:
            return values * dimension
        if len(values) != dimension:
            raise ConfigurationError(f"{name} needs 1 or {dimension} values, got {len(values)}")
        return values
    return [value] * dimension
