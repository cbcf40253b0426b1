"""Field sources and composite (jet) expressions.

Composite operators such as momenta, currents and breaking terms are built
once as expressions over the coordinates ``x_i``, the field symbol ``phi``
and jet symbols ``dphi_1``, ``dphi_1_2``, ... standing for ordinary partial
derivatives of φ. A field source then evaluates a composite expression:

* ``ClosedForm`` substitutes exact symbolic derivatives of its expression
  (literal symbolic composition),
* ``Sampled`` binds the jet symbols to cubic-interpolant derivatives.
"""

from __future__ import annotations

import csv
import logging
import threading
from abc import ABC, abstractmethod
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.interpolate import CubicSpline, RectBivariateSpline

from .errors import (
    ConfigurationError,
    InterpolationRangeError,
    SampleFileError,
)
from .expr import (
    FIELD_SYMBOL,
    Expr,
    Var,
    VarRole,
    alpha_derivative_symbol,
    const,
    coordinate_symbol,
    diff,
    evaluate,
    free_variables,
    mul,
    parse,
    substitute,
    sum_of,
)
from .space import GridSpec, SpaceSpec, as_points

logger = logging.getLogger(__name__)

JET_PREFIX = "dphi_"
PHI = Var(FIELD_SYMBOL)
COMPOSE_CACHE_SIZE = 256


# ---------------------------------------------------------------------------
# Jet symbols
# ---------------------------------------------------------------------------
def jet_symbol(indices: Sequence[int]) -> str:
    """Name of the jet symbol for ∂_{i1}∂_{i2}...φ (0-based axis indices)."""
    if not indices:
        return FIELD_SYMBOL
    return JET_PREFIX + "_".join(str(i + 1) for i in sorted(indices))


def jet_indices(name: str) -> Optional[Tuple[int, ...]]:
    """Inverse of ``jet_symbol``; None for names that are not jets."""
    if name == FIELD_SYMBOL:
        return ()
    if not name.startswith(JET_PREFIX):
        return None
    try:
        return tuple(sorted(int(p) - 1 for p in name[len(JET_PREFIX):].split("_")))
    except ValueError:
        return None


def jet(indices: Sequence[int]) -> Var:
    return Var(jet_symbol(indices))


def total_derivative(e: Expr, axis: int) -> Expr:
    """Ordinary total derivative D_i along a field configuration.

    D_i E = ∂_{x_i}E + Σ_J ∂_J E · J_{+i}, where J runs over phi and every
    jet symbol present in E.
    """
    terms: List[Expr] = [diff(e, coordinate_symbol(axis))]
    for name in sorted(free_variables(e)):
        indices = jet_indices(name)
        if indices is None:
            continue
        terms.append(mul(diff(e, name), jet(indices + (axis,))))
    return sum_of(terms)


def conformable_total_derivative(e: Expr, axis: int, space: SpaceSpec) -> Expr:
    """∂^α_i applied to a composite expression: s_i(x) · D_i E."""
    return mul(space.axes[axis].factor_expr(axis, space.alpha), total_derivative(e, axis))


def alpha_derivative_expr(space: SpaceSpec, axis: int) -> Expr:
    """Composite expression of ∂^α_i φ."""
    return mul(space.axes[axis].factor_expr(axis, space.alpha), jet((axis,)))


def compose_density(density: Expr, space: SpaceSpec) -> Expr:
    """Replace every α-derivative symbol g_i by its composite expression."""
    mapping = {alpha_derivative_symbol(i): alpha_derivative_expr(space, i) for i in range(space.dimension)}
    return substitute(density, mapping)


def _coordinate_bindings(points: np.ndarray) -> Dict[str, np.ndarray]:
    return {coordinate_symbol(i): points[:, i] for i in range(points.shape[1])}


# ---------------------------------------------------------------------------
# Field sources
# ---------------------------------------------------------------------------
class FieldSource(ABC):
    """A scalar field φ on a D-dimensional space."""

    dimension: int
    exact: bool = True

    def values(self, x: Union[Sequence[float], np.ndarray]) -> np.ndarray:
        return self.partial(x, ())

    @abstractmethod
    def partial(self, x: Union[Sequence[float], np.ndarray], indices: Sequence[int]) -> np.ndarray:
        """Ordinary partial derivative ∂_{indices}φ at an (N, D) batch of points."""

    @abstractmethod
    def evaluate(self, composite: Expr, x: Union[Sequence[float], np.ndarray]) -> np.ndarray:
        """Evaluate a composite expression along this field at an (N, D) batch of points."""

    def __call__(self, x: Union[Sequence[float], np.ndarray]) -> np.ndarray:
        return self.values(x)


class ClosedForm(FieldSource):
    """Field given by an expression over the coordinates x_1..x_D."""

    exact = True

    def __init__(self, expr: Expr, dimension: int) -> None:
        coords = {coordinate_symbol(i) for i in range(dimension)}
        stray = sorted(free_variables(expr) - coords)
        if stray:
            raise ConfigurationError(
                f"closed-form field may reference only x_1..x_{dimension}, found {', '.join(stray)}"
            )
        self.expr = expr
        self.dimension = dimension
        self._partials: Dict[Tuple[int, ...], Expr] = {(): expr}
        self._lock = threading.Lock()
        self._compose_cached = lru_cache(maxsize=COMPOSE_CACHE_SIZE)(self._compose)

    @classmethod
    def parse(cls, text: str, dimension: int) -> "ClosedForm":
        space = SpaceSpec.uniform(dimension, 1.0).var_space.with_roles(VarRole.COORDINATE)
        return cls(parse(text, space), dimension)

    def __repr__(self) -> str:
        return f"ClosedForm({self.expr!s}, dimension={self.dimension})"

    def derivative(self, indices: Sequence[int]) -> Expr:
        """Exact symbolic ∂_{indices}φ, cached per multi-index."""
        key = tuple(sorted(indices))
        with self._lock:
            if key in self._partials:
                return self._partials[key]
        parent = self.derivative(key[:-1])
        out = diff(parent, coordinate_symbol(key[-1]))
        with self._lock:
            self._partials.setdefault(key, out)
            return self._partials[key]

    def compose(self, composite: Expr) -> Expr:
        """Substitute φ and its jets, giving an expression over coordinates only.

        Results are cached by expression value, least recently used first out.
        """
        return self._compose_cached(composite)

    def _compose(self, composite: Expr) -> Expr:
        mapping: Dict[str, Expr] = {}
        for name in free_variables(composite):
            indices = jet_indices(name)
            if indices is not None:
                mapping[name] = self.derivative(indices)
        return substitute(composite, mapping)

    def partial(self, x: Union[Sequence[float], np.ndarray], indices: Sequence[int]) -> np.ndarray:
        points = as_points(x, self.dimension)
        return np.asarray(evaluate(self.derivative(indices), _coordinate_bindings(points)), dtype=float).reshape(-1)

    def evaluate(self, composite: Expr, x: Union[Sequence[float], np.ndarray]) -> np.ndarray:
        points = as_points(x, self.dimension)
        out = evaluate(self.compose(composite), _coordinate_bindings(points))
        return np.broadcast_to(np.asarray(out, dtype=float), (points.shape[0],)).copy()


class Sampled(FieldSource):
    """Field sampled on a tensor grid, interpolated by cubic splines (D ≤ 2)."""

    exact = False
    MAX_ORDER = {1: 3, 2: 2}

    def __init__(self, coordinates: Sequence[np.ndarray], values: np.ndarray) -> None:
        self.coordinates = tuple(np.asarray(c, dtype=float) for c in coordinates)
        self.dimension = len(self.coordinates)
        data = np.asarray(values, dtype=float)
        if self.dimension not in (1, 2):
            raise ConfigurationError(f"sampled fields support D = 1 or 2, got D = {self.dimension}")
        shape = tuple(c.size for c in self.coordinates)
        if data.shape != shape:
            raise ConfigurationError(f"sample values have shape {data.shape}, grid expects {shape}")
        for axis, c in enumerate(self.coordinates):
            if c.size < 4:
                raise ConfigurationError(f"cubic interpolation needs >= 4 samples on axis {axis + 1}")
            if np.any(np.diff(c) <= 0):
                raise ConfigurationError(f"sample coordinates on axis {axis + 1} must be strictly increasing")
        if not np.all(np.isfinite(data)):
            raise ConfigurationError("sample values must be finite")
        self.samples = data
        if self.dimension == 1:
            self._spline = CubicSpline(self.coordinates[0], data, extrapolate=False)
        else:
            self._spline = RectBivariateSpline(self.coordinates[0], self.coordinates[1], data, kx=3, ky=3)
        self._warned = False

    @classmethod
    def from_grid(cls, space: SpaceSpec, grid: GridSpec, values: np.ndarray) -> "Sampled":
        coords = [grid.axis_points(space, i) for i in range(space.dimension)]
        data = np.asarray(values, dtype=float).reshape(tuple(c.size for c in coords))
        return cls(coords, data)

    @classmethod
    def from_csv(cls, path: Union[str, Path], dimension: int) -> "Sampled":
        """Load ``x_1..x_D,phi`` rows; D = 2 rows must fill a tensor grid."""
        path = Path(path)
        if not path.exists():
            raise SampleFileError(path, "sample file does not exist")
        expected = [coordinate_symbol(i) for i in range(dimension)] + [FIELD_SYMBOL]
        rows: List[List[float]] = []
        with path.open("r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != expected:
                raise SampleFileError(path, f"header must be {','.join(expected)}", line=1)
            for row in reader:
                if not row or all(not cell.strip() for cell in row):
                    continue
                if len(row) != len(expected):
                    raise SampleFileError(path, f"expected {len(expected)} columns, got {len(row)}", line=reader.line_num)
                try:
                    rows.append([float(cell) for cell in row])
                except ValueError as exc:
                    raise SampleFileError(path, f"non-numeric value ({exc})", line=reader.line_num) from None
        if not rows:
            raise SampleFileError(path, "no samples")
        table = np.array(rows)
        if dimension == 1:
            order = np.argsort(table[:, 0], kind="stable")
            coords, data = [table[order, 0]], table[order, 1]
        else:
            axes = [np.unique(table[:, i]) for i in range(dimension)]
            if table.shape[0] != int(np.prod([a.size for a in axes])):
                raise SampleFileError(path, "rows do not form a complete tensor grid")
            data = np.full(tuple(a.size for a in axes), np.nan)
            idx = tuple(np.searchsorted(a, table[:, i]) for i, a in enumerate(axes))
            data[idx] = table[:, -1]
            if np.isnan(data).any():
                raise SampleFileError(path, "rows do not form a complete tensor grid")
            coords = axes
        try:
            return cls(coords, data)
        except ConfigurationError as exc:
            raise SampleFileError(path, str(exc)) from None

    def _check_range(self, points: np.ndarray) -> None:
        for axis, c in enumerate(self.coordinates):
            col = points[:, axis]
            if np.any(col < c[0]) or np.any(col > c[-1]):
                raise InterpolationRangeError(
                    f"axis {axis + 1} query outside sampled range [{c[0]}, {c[-1]}]"
                )

    def partial(self, x: Union[Sequence[float], np.ndarray], indices: Sequence[int]) -> np.ndarray:
        points = as_points(x, self.dimension)
        self._check_range(points)
        counts = [list(indices).count(i) for i in range(self.dimension)]
        if max(counts, default=0) > self.MAX_ORDER[self.dimension]:
            raise ConfigurationError(
                f"cubic interpolant cannot supply derivative order {max(counts)} in D = {self.dimension}"
            )
        if self.dimension == 1:
            return np.asarray(self._spline(points[:, 0], nu=counts[0]), dtype=float)
        return np.asarray(self._spline.ev(points[:, 0], points[:, 1], dx=counts[0], dy=counts[1]), dtype=float)

    def evaluate(self, composite: Expr, x: Union[Sequence[float], np.ndarray]) -> np.ndarray:
        points = as_points(x, self.dimension)
        bindings: Dict[str, np.ndarray] = _coordinate_bindings(points)
        uses_derivatives = False
        for name in free_variables(composite):
            indices = jet_indices(name)
            if indices is None:
                continue
            uses_derivatives = uses_derivatives or bool(indices)
            bindings[name] = self.partial(points, indices)
        if uses_derivatives and not self._warned:
            logger.warning("sampled field: derivatives come from the cubic interpolant, not exact differentiation")
            self._warned = True
        out = evaluate(composite, bindings)
        return np.broadcast_to(np.asarray(out, dtype=float), (points.shape[0],)).copy()


def constant_field(value: float, dimension: int) -> ClosedForm:
    return ClosedForm(const(value), dimension)


__all__ = [
    "ClosedForm",
    "FieldSource",
    "JET_PREFIX",
    "PHI",
    "Sampled",
    "alpha_derivative_expr",
    "compose_density",
    "conformable_total_derivative",
    "constant_field",
    "jet",
    "jet_indices",
    "jet_symbol",
    "total_derivative",
]
