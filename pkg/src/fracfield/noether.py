"""Noether currents, energy-momentum / angular-momentum tensors and the breaking term.

A symmetry generator with M parameters β^(σ) acts as

    x' = x - Σ_σ f_σ(x) β^(σ),        φ'(x') = φ(x) + Σ_σ C_σ(x, φ) β^(σ).

With s_i the conformable factor, r_i the signed offset from the sector
endpoint and w_i = 1/s_i (see ``fracfield.space``), the first-order change of
the action is ∫ Δ Σ_σ β^(σ) [Σ_i ∂^α_i Θ^i_(σ) + B_(σ)], where

    Θ^i   = C P_i + Σ_k f^k ∂_kφ P_i - w_i f^i L
    A_i   = ∂^α_i C + Σ_ν ∂^α_i f^ν ∂_νφ - (1-α) f^i/r_i ∂^α_i φ
    B     = Σ_i [ -Σ_k f^k ∂^α_i(∂_kφ P_i) - (1-α) f^i/r_i ∂^α_iφ P_i
                  + (1-α) f^i/r_i L + f^i ∂^α_i(w_i L) ] + C · EL

and P_i = ∂L/∂g_i, EL the Euler–Lagrange residual. The C·EL term is counted
once for the whole sum over i.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .calculus import PointLike, tensor_rule
from .errors import ConfigurationError, CurrentMismatchError, DomainViolationError, NumericFailure, SectorError
from .expr import (
    FIELD_SYMBOL,
    ZERO,
    Expr,
    VarRole,
    alpha_derivative_symbol,
    as_expr,
    coordinate_symbol,
    diff,
    evaluate,
    free_variables,
    mul,
    neg,
    parse,
    sub,
    sum_of,
)
from .field import FieldSource, jet, total_derivative
from .space import Bounds, GridSpec, Side, SpaceSpec, as_points, is_single_point
from .variational import CompositeLagrangian, LagrangianSpec

logger = logging.getLogger(__name__)

ANCHOR_TOLERANCE = 1e-12
BREAKING_TERM_NAMES: Tuple[str, ...] = (
    "transport",
    "delta_correction",
    "weight",
    "weight_derivative",
    "el",
)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SymmetryGenerator:
    """M-parameter family (f_σ, C_σ) of infinitesimal transformations."""

    f: Tuple[Tuple[Expr, ...], ...]
    c: Tuple[Expr, ...]
    dimension: int
    anchored: bool = False
    labels: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        f = tuple(tuple(row) for row in self.f)
        c = tuple(self.c)
        if len(f) != len(c) or not f:
            raise ConfigurationError(f"generator needs M >= 1 matching f and C entries, got {len(f)} and {len(c)}")
        coords = {coordinate_symbol(i) for i in range(self.dimension)}
        for sigma, row in enumerate(f):
            if len(row) != self.dimension:
                raise ConfigurationError(f"f_{sigma + 1} needs {self.dimension} components, got {len(row)}")
            for e in row:
                stray = free_variables(e) - coords
                if stray:
                    raise ConfigurationError(f"f_{sigma + 1} may reference only coordinates, found {sorted(stray)}")
            stray = free_variables(c[sigma]) - coords - {FIELD_SYMBOL}
            if stray:
                raise ConfigurationError(f"C_{sigma + 1} may reference coordinates and phi only, found {sorted(stray)}")
        labels = tuple(self.labels) or tuple(f"sigma_{s + 1}" for s in range(len(f)))
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "labels", labels)

    @property
    def M(self) -> int:
        return len(self.f)

    @classmethod
    def build(
        cls,
        space: SpaceSpec,
        f: Sequence[Sequence[Union[Expr, float]]],
        c: Sequence[Union[Expr, float]],
        labels: Sequence[str] = (),
    ) -> "SymmetryGenerator":
        rows = tuple(tuple(as_expr(e) for e in row) for row in f)
        shifts = tuple(as_expr(e) for e in c)
        anchored = _is_anchored(rows, space)
        return cls(rows, shifts, space.dimension, anchored, tuple(labels))

    @classmethod
    def custom(cls, space: SpaceSpec, f_texts: Sequence[Sequence[str]], c_texts: Sequence[str]) -> "SymmetryGenerator":
        coords = space.var_space.with_roles(VarRole.COORDINATE)
        with_field = space.var_space.with_roles(VarRole.COORDINATE, VarRole.FIELD)
        rows = [[parse(t, coords) for t in row] for row in f_texts]
        shifts = [parse(t, with_field) for t in c_texts]
        return cls.build(space, rows, shifts)

    @classmethod
    def translation(cls, space: SpaceSpec) -> "SymmetryGenerator":
        """One generator per axis; f_σ = -e_σ so that x' = x + β e_σ."""
        D = space.dimension
        rows = [[-1.0 if k == sigma else 0.0 for k in range(D)] for sigma in range(D)]
        return cls.build(space, rows, [0.0] * D, [f"translation_{s + 1}" for s in range(D)])

    @classmethod
    def rotation(cls, space: SpaceSpec) -> "SymmetryGenerator":
        """One generator per coordinate plane, rotating about the sector origin."""
        D = space.dimension
        if D < 2:
            raise ConfigurationError("rotation generators need D >= 2")
        rows, labels = [], []
        for p in range(D):
            for q in range(p + 1, D):
                row: List[Expr] = [ZERO] * D
                row[p] = space.axes[q].offset_expr(q)
                row[q] = neg(space.axes[p].offset_expr(p))
                rows.append(row)
                labels.append(f"rotation_{p + 1}{q + 1}")
        return cls.build(space, rows, [0.0] * len(rows), labels)

    @classmethod
    def scaling(cls, space: SpaceSpec) -> "SymmetryGenerator":
        """Dilation about the sector origin (anchored)."""
        row = [space.axes[i].offset_expr(i) for i in range(space.dimension)]
        return cls.build(space, [row], [0.0], ["scaling"])

    @classmethod
    def field_shift(cls, space: SpaceSpec) -> "SymmetryGenerator":
        return cls.build(space, [[0.0] * space.dimension], [1.0], ["field_shift"])

    @classmethod
    def zero(cls, space: SpaceSpec, M: int = 1) -> "SymmetryGenerator":
        return cls.build(space, [[0.0] * space.dimension] * M, [0.0] * M, [f"zero_{s + 1}" for s in range(M)])

    def to_dict(self) -> Dict[str, object]:
        return {
            "M": self.M,
            "labels": list(self.labels),
            "anchored": self.anchored,
            "f": [[str(e) for e in row] for row in self.f],
            "c": [str(e) for e in self.c],
        }


def _is_anchored(rows: Sequence[Sequence[Expr]], space: SpaceSpec) -> bool:
    bindings = {coordinate_symbol(i): np.array([e]) for i, e in enumerate(space.endpoints)}
    try:
        values = [evaluate(e, bindings) for row in rows for e in row]
    except NumericFailure:
        return False
    return all(float(np.max(np.abs(v))) <= ANCHOR_TOLERANCE for v in values)


# ---------------------------------------------------------------------------
# Samples
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class CurrentSample:
    point: Tuple[float, ...]
    theta: np.ndarray
    sector: Optional[Side]
    origin: Tuple[float, ...]
    exact: bool = True

    def __post_init__(self) -> None:
        theta = np.atleast_2d(np.asarray(self.theta, dtype=float))
        if not np.all(np.isfinite(theta)):
            raise DomainViolationError(f"non-finite current at {self.point}")
        object.__setattr__(self, "theta", theta)

    def to_dict(self) -> Dict[str, object]:
        return {
            "point": list(self.point),
            "theta": self.theta.tolist(),
            "sector": self.sector.value if self.sector is not None else "combined",
            "origin": list(self.origin),
            "exact": self.exact,
        }


@dataclass(frozen=True, eq=False)
class BreakingSample:
    point: Tuple[float, ...]
    B: np.ndarray
    terms: np.ndarray = field(default_factory=lambda: np.zeros((0, len(BREAKING_TERM_NAMES))))
    exact: bool = True

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.B)):
            raise DomainViolationError(f"non-finite breaking term at {self.point}")

    def to_dict(self) -> Dict[str, object]:
        return {
            "point": list(self.point),
            "B": np.asarray(self.B).tolist(),
            "terms": {
                name: np.asarray(self.terms)[:, k].tolist() for k, name in enumerate(BREAKING_TERM_NAMES)
            },
            "exact": self.exact,
        }


# ---------------------------------------------------------------------------
# Composite expressions
# ---------------------------------------------------------------------------
class NoetherAnalysis:
    """Composite expressions for one (space, Lagrangian, generator) triple.

    Expressions are built lazily and reused for every evaluation.
    """

    def __init__(
        self,
        space: SpaceSpec,
        L: Optional[LagrangianSpec] = None,
        generator: Optional[SymmetryGenerator] = None,
    ) -> None:
        if generator is not None and generator.dimension != space.dimension:
            raise ConfigurationError(
                f"generator is {generator.dimension}-dimensional but the space has D = {space.dimension}"
            )
        self.space = space
        self.L = L
        self.generator = generator
        self.kappa = 1.0 - space.alpha

    # -- building blocks ---------------------------------------------------
    @cached_property
    def lagrangian(self) -> CompositeLagrangian:
        if self.L is None:
            raise ConfigurationError("this quantity needs a Lagrangian")
        return CompositeLagrangian(self.L, self.space)

    @property
    def gen(self) -> SymmetryGenerator:
        if self.generator is None:
            raise ConfigurationError("this quantity needs a symmetry generator")
        return self.generator

    def factor(self, i: int) -> Expr:
        return self.space.axes[i].factor_expr(i, self.space.alpha)

    def inverse_factor(self, i: int) -> Expr:
        return self.space.axes[i].inverse_factor_expr(i, self.space.alpha)

    def offset(self, i: int) -> Expr:
        return self.space.axes[i].offset_expr(i)

    def alpha_derivative(self, i: int) -> Expr:
        return mul(self.factor(i), jet((i,)))

    def d(self, e: Expr, i: int) -> Expr:
        return mul(self.factor(i), total_derivative(e, i))

    def anchoring_ratio(self, sigma: int, i: int) -> Expr:
        """(1-α) f^i_σ / r_i."""
        return self.kappa * self.gen.f[sigma][i] / self.offset(i)

    # -- currents ------------------------------------------------------------
    @cached_property
    def current_exprs(self) -> Tuple[Tuple[Expr, ...], ...]:
        lag, gen = self.lagrangian, self.gen
        D = self.space.dimension
        rows = []
        for sigma in range(gen.M):
            transport = sum_of(mul(gen.f[sigma][k], jet((k,))) for k in range(D))
            row = []
            for i in range(D):
                P = lag.momenta[i]
                theta = gen.c[sigma] * P + transport * P - self.inverse_factor(i) * gen.f[sigma][i] * lag.density
                row.append(theta)
            rows.append(tuple(row))
        return tuple(rows)

    @cached_property
    def divergence_exprs(self) -> Tuple[Expr, ...]:
        return tuple(
            sum_of(self.d(theta, i) for i, theta in enumerate(row)) for row in self.current_exprs
        )

    @cached_property
    def increment_exprs(self) -> Tuple[Tuple[Expr, ...], ...]:
        gen = self.gen
        D = self.space.dimension
        rows = []
        for sigma in range(gen.M):
            row = []
            for i in range(D):
                transport = sum_of(
                    mul(self.factor(i) * diff(gen.f[sigma][nu], coordinate_symbol(i)), jet((nu,)))
                    for nu in range(D)
                )
                correction = self.anchoring_ratio(sigma, i) * self.alpha_derivative(i)
                row.append(self.d(gen.c[sigma], i) + transport - correction)
            rows.append(tuple(row))
        return tuple(rows)

    @cached_property
    def breaking_term_exprs(self) -> Tuple[Tuple[Expr, ...], ...]:
        lag, gen = self.lagrangian, self.gen
        D = self.space.dimension
        out = []
        for sigma in range(gen.M):
            f = gen.f[sigma]
            transport = neg(
                sum_of(
                    f[k] * self.d(mul(jet((k,)), lag.momenta[i]), i)
                    for i in range(D)
                    for k in range(D)
                )
            )
            delta_correction = neg(
                sum_of(self.anchoring_ratio(sigma, i) * self.alpha_derivative(i) * lag.momenta[i] for i in range(D))
            )
            weight = sum_of(self.anchoring_ratio(sigma, i) * lag.density for i in range(D))
            weight_derivative = sum_of(f[i] * self.d(self.inverse_factor(i) * lag.density, i) for i in range(D))
            el = gen.c[sigma] * lag.el_residual
            out.append((transport, delta_correction, weight, weight_derivative, el))
        return tuple(out)

    @cached_property
    def breaking_exprs(self) -> Tuple[Expr, ...]:
        return tuple(sum_of(terms) for terms in self.breaking_term_exprs)

    @cached_property
    def variation_exprs(self) -> Tuple[Expr, ...]:
        """First-order integrand of δS per generator (before the Δ weight)."""
        lag, gen = self.lagrangian, self.gen
        D = self.space.dimension
        out = []
        for sigma in range(gen.M):
            terms: List[Expr] = [gen.c[sigma] * lag.field_partial]
            for i in range(D):
                terms.append(self.increment_exprs[sigma][i] * lag.momenta[i])
                terms.append(self.anchoring_ratio(sigma, i) * lag.density)
                terms.append(neg(diff(gen.f[sigma][i], coordinate_symbol(i)) * lag.density))
            out.append(sum_of(terms))
        return tuple(out)

    # -- tensors -------------------------------------------------------------
    @cached_property
    def emt_exprs(self) -> Tuple[Tuple[Expr, ...], ...]:
        lag = self.lagrangian
        D = self.space.dimension
        rows = []
        for i in range(D):
            row = []
            for j in range(D):
                T = neg(mul(jet((j,)), lag.momenta[i]))
                if i == j:
                    T = T + self.inverse_factor(i) * lag.density
                row.append(T)
            rows.append(tuple(row))
        return tuple(rows)

    @cached_property
    def emt_divergence_exprs(self) -> Tuple[Expr, ...]:
        D = self.space.dimension
        return tuple(sum_of(self.d(self.emt_exprs[i][j], i) for i in range(D)) for j in range(D))

    # -- evaluation ----------------------------------------------------------
    def evaluate(self, exprs: Sequence, f: FieldSource, points: np.ndarray) -> np.ndarray:
        """Evaluate a nested tuple of composite expressions; result shape (N, *nesting)."""
        arr = np.asarray(exprs, dtype=object)
        flat = [f.evaluate(e, points) for e in arr.ravel()]
        stacked = np.stack(flat, axis=-1) if flat else np.zeros((points.shape[0], 0))
        return stacked.reshape((points.shape[0],) + arr.shape)


@lru_cache(maxsize=64)
def _analysis(
    space: SpaceSpec, L: Optional[LagrangianSpec] = None, generator: Optional[SymmetryGenerator] = None
) -> NoetherAnalysis:
    return NoetherAnalysis(space, L, generator)


@lru_cache(maxsize=256)
def _commutation_expr(space: SpaceSpec, i: int, k: int) -> Expr:
    ax = space.axes[i]
    lhs = total_derivative(mul(ax.factor_expr(i, space.alpha), jet((i,))), k)
    rhs = mul(ax.factor_expr(i, space.alpha), jet((i, k)))
    if i == k:
        rhs = rhs + mul(ax.factor_slope_expr(i, space.alpha), jet((i,)))
    return sub(lhs, rhs)


def _check_indices(space: SpaceSpec, *indices: int) -> None:
    for idx in indices:
        if not 0 <= idx < space.dimension:
            raise ConfigurationError(f"axis index {idx} out of range for D = {space.dimension}")


def _single(x: PointLike, space: SpaceSpec) -> np.ndarray:
    if not is_single_point(x, space.dimension):
        raise ConfigurationError("expected a single point")
    return space.check_points(x)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------
def derivative_increment(
    gen: SymmetryGenerator, sigma: int, i: int, f: FieldSource, x: PointLike, space: SpaceSpec
) -> Union[float, np.ndarray]:
    """A-increment: first-order change of ∂^α_i φ under generator σ."""
    _check_indices(space, i)
    if not 0 <= sigma < gen.M:
        raise ConfigurationError(f"sigma {sigma} out of range for M = {gen.M}")
    points = space.check_points(x)
    values = f.evaluate(_analysis(space, None, gen).increment_exprs[sigma][i], points)
    return float(values[0]) if is_single_point(x, space.dimension) else values


def noether_currents(
    gen: SymmetryGenerator, L: LagrangianSpec, f: FieldSource, points: np.ndarray, space: SpaceSpec
) -> np.ndarray:
    """Θ at an (N, D) batch; shape (N, M, D)."""
    analysis = _analysis(space, L, gen)
    return analysis.evaluate(analysis.current_exprs, f, space.check_points(points))


def noether_current(
    gen: SymmetryGenerator,
    L: LagrangianSpec,
    f: FieldSource,
    x: PointLike,
    space: SpaceSpec,
    *,
    outside_zero: bool = False,
) -> CurrentSample:
    """Θ^{α,i}_(σ) at one point.

    With ``outside_zero`` a point outside the sector yields an all-zero
    sample: the sector contributes nothing there.
    """
    point = as_points(x, space.dimension)
    if point.shape[0] != 1:
        raise ConfigurationError("noether_current takes a single point")
    key = tuple(float(c) for c in point[0])
    if outside_zero and not space.contains(point)[0]:
        return CurrentSample(key, np.zeros((gen.M, space.dimension)), L.sector, space.endpoints, f.exact)
    theta = noether_currents(gen, L, f, point, space)[0]
    return CurrentSample(key, theta, L.sector, space.endpoints, f.exact)


def current_divergence(
    gen: SymmetryGenerator, L: LagrangianSpec, f: FieldSource, x: PointLike, space: SpaceSpec
) -> np.ndarray:
    """Σ_i ∂^α_i Θ^i_(σ); shape (M,) for one point, (N, M) for a batch."""
    analysis = _analysis(space, L, gen)
    values = analysis.evaluate(analysis.divergence_exprs, f, space.check_points(x))
    return values[0] if is_single_point(x, space.dimension) else values


def emt(L: LagrangianSpec, f: FieldSource, x: PointLike, space: SpaceSpec) -> np.ndarray:
    """T^{α,i}_j; shape (D, D) for one point, (N, D, D) for a batch."""
    analysis = _analysis(space, L, None)
    values = analysis.evaluate(analysis.emt_exprs, f, space.check_points(x))
    return values[0] if is_single_point(x, space.dimension) else values


def amt(L: LagrangianSpec, f: FieldSource, x: PointLike, space: SpaceSpec) -> np.ndarray:
    """M^{α,ik}_j = x^k T^{α,i}_j indexed [i, k, j]; (N, D, D, D) for a batch."""
    points = space.check_points(x)
    M = amt_from_emt(points, emt(L, f, points, space))
    return M[0] if is_single_point(x, space.dimension) else M


def amt_from_emt(points: np.ndarray, T: np.ndarray) -> np.ndarray:
    """x^k T^i_j for (N, D) points and (N, D, D) tensors."""
    return np.einsum("nk,nij->nikj", points, T)


def emt_divergence(L: LagrangianSpec, f: FieldSource, x: PointLike, space: SpaceSpec) -> np.ndarray:
    """Σ_i ∂^α_i T^{α,i}_j; shape (D,) for one point."""
    analysis = _analysis(space, L, None)
    values = analysis.evaluate(analysis.emt_divergence_exprs, f, space.check_points(x))
    return values[0] if is_single_point(x, space.dimension) else values


def breaking_terms(
    gen: SymmetryGenerator, L: LagrangianSpec, f: FieldSource, points: np.ndarray, space: SpaceSpec
) -> np.ndarray:
    """Term-by-term breaking contributions at a batch; shape (N, M, 5)."""
    analysis = _analysis(space, L, gen)
    return analysis.evaluate(analysis.breaking_term_exprs, f, space.check_points(points))


def breaking_term(
    gen: SymmetryGenerator, L: LagrangianSpec, f: FieldSource, x: PointLike, space: SpaceSpec
) -> BreakingSample:
    point = _single(x, space)
    terms = breaking_terms(gen, L, f, point, space)[0]
    analysis = _analysis(space, L, gen)
    B = analysis.evaluate(analysis.breaking_exprs, f, point)[0]
    return BreakingSample(tuple(float(c) for c in point[0]), B, terms, f.exact)


def commutation_residual(
    f: FieldSource, i: int, k: int, x: PointLike, space: SpaceSpec
) -> Union[float, np.ndarray]:
    """∂_k(∂^α_i φ) - [(1-α)ρ_i^(-α) δ_ik ∂_iφ + ∂^α_i(∂_kφ)]."""
    _check_indices(space, i, k)
    points = space.check_points(x)
    values = f.evaluate(_commutation_expr(space, i, k), points)
    return float(values[0]) if is_single_point(x, space.dimension) else values


def action_variation(
    gen: SymmetryGenerator,
    L: LagrangianSpec,
    f: FieldSource,
    space: SpaceSpec,
    grid: GridSpec,
    beta: Sequence[float],
    bounds: Optional[Bounds] = None,
) -> Tuple[float, float]:
    """(S[transformed] - S[original], first-order formula) on one quadrature rule.

    The transformed action is pulled back to the original coordinates:
    Δ(x')/Δ(x) · det(∂x'/∂x) · L(φ', g'), with g'_i = s_i(x') Σ_k (J^{-1})_{ki} ∂_kφ'
    and the exact inverse Jacobian.
    """
    beta_arr = np.asarray(beta, dtype=float).reshape(-1)
    if beta_arr.size != gen.M:
        raise ConfigurationError(f"beta needs {gen.M} entries, got {beta_arr.size}")
    analysis = _analysis(space, L, gen)
    rule = tensor_rule(space, grid, bounds)
    if not np.any(beta_arr):
        return 0.0, 0.0
    X = rule.points
    N, D = X.shape
    coords = {coordinate_symbol(i): X[:, i] for i in range(D)}

    def at_points(e: Expr) -> np.ndarray:
        return np.broadcast_to(np.asarray(evaluate(e, coords), dtype=float), (N,))

    formula = sum(
        b * rule.integrate(f.evaluate(analysis.variation_exprs[s], X)) for s, b in enumerate(beta_arr) if b
    )

    shift = np.zeros((N, D))
    jac = np.broadcast_to(np.eye(D), (N, D, D)).copy()
    phi = f.values(X)
    grad = np.stack([f.partial(X, (k,)) for k in range(D)], axis=1)
    new_phi = phi.copy()
    new_grad = grad.copy()
    for s, b in enumerate(beta_arr):
        if not b:
            continue
        for m in range(D):
            shift[:, m] += b * at_points(gen.f[s][m])
            for k in range(D):
                jac[:, m, k] -= b * at_points(diff(gen.f[s][m], coordinate_symbol(k)))
        new_phi += b * f.evaluate(gen.c[s], X)
        for k in range(D):
            new_grad[:, k] += b * f.evaluate(total_derivative(gen.c[s], k), X)
    moved = X - shift

    ratio = np.ones(N)
    for k, ax in enumerate(space.axes):
        q = ax.offset(moved[:, k]) / ax.offset(X[:, k])
        if np.any(q <= 0):
            raise SectorError(f"transformation moves quadrature nodes across the endpoint of axis {k + 1}")
        ratio *= np.power(q, space.alpha - 1.0)
    det = np.linalg.det(jac)
    pulled = np.linalg.solve(np.swapaxes(jac, 1, 2), new_grad[..., None])[..., 0]
    g_new = np.stack([ax.factor(moved[:, i], space.alpha) * pulled[:, i] for i, ax in enumerate(space.axes)], axis=1)
    g_old = np.stack([ax.factor(X[:, i], space.alpha) * grad[:, i] for i, ax in enumerate(space.axes)], axis=1)

    L_new = _density_values(L, new_phi, g_new)
    L_old = _density_values(L, phi, g_old)
    direct = rule.integrate(ratio * det * L_new - L_old)
    logger.debug("action variation beta=%s direct=%.17g formula=%.17g", beta_arr.tolist(), direct, formula)
    return float(direct), float(formula)


def _density_values(L: LagrangianSpec, phi: np.ndarray, g: np.ndarray) -> np.ndarray:
    bindings: Dict[str, np.ndarray] = {FIELD_SYMBOL: phi}
    for i in range(g.shape[1]):
        bindings[alpha_derivative_symbol(i)] = g[:, i]
    return np.broadcast_to(np.asarray(evaluate(L.density, bindings), dtype=float), phi.shape)


def combine_currents(right: CurrentSample, left: CurrentSample) -> CurrentSample:
    """Θ = Θ_R + Θ_L evaluated with a = b."""
    if right.sector is not Side.RIGHT or left.sector is not Side.LEFT:
        raise CurrentMismatchError("combine_currents needs a Right sample and a Left sample")
    if right.point != left.point:
        raise CurrentMismatchError(f"samples at different points: {right.point} vs {left.point}")
    if right.origin != left.origin:
        raise CurrentMismatchError(f"sector endpoints differ (a = {right.origin}, b = {left.origin})")
    if right.theta.shape != left.theta.shape:
        raise CurrentMismatchError(f"current shapes differ: {right.theta.shape} vs {left.theta.shape}")
    return CurrentSample(right.point, right.theta + left.theta, None, right.origin, right.exact and left.exact)

