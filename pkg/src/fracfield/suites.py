"""End-to-end property suites run by ``fracfield verify``.

Every suite is deterministic for a given seed. A suite is a list of checks,
each holding measured errors to its own threshold; the suite reports the
check closest to (or furthest past) its threshold.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .calculus import conf_deriv, conf_deriv_limit, conf_integral
from .errors import ConfigurationError, FracFieldError
from .expr import (
    FIELD_SYMBOL,
    Expr,
    Var,
    alpha_derivative_symbol,
    coordinate_symbol,
    cos,
    exp,
    sin,
    substitute,
    sum_of,
)
from .field import ClosedForm
from .noether import (
    SymmetryGenerator,
    action_variation,
    breaking_term,
    breaking_terms,
    commutation_residual,
    emt_divergence,
)
from .oscillator import (
    OscillatorParams,
    analytic_solution,
    analytic_trajectory,
    anchor_time,
    energy,
    energy_trace,
    integrate,
    ode_rhs,
    ode_rhs_left,
    oscillator_lagrangian,
    oscillator_space,
    regularized_energy,
    solution_expr,
    zero_crossings,
)
from .space import GridSpec, Side, SpaceSpec
from .variational import LagrangianSpec, el_residual

logger = logging.getLogger(__name__)

SuiteFn = Callable[[np.random.Generator], "SuiteResult"]


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    max_err: float
    threshold: float
    detail: str = ""

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def summary_line(self) -> str:
        return f"SUITE {self.name} {self.status} max_err={self.max_err!r}"

    def to_dict(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "status": self.status,
            "max_err": self.max_err,
            "threshold": self.threshold,
            "detail": self.detail,
        }


class _Checks:
    def __init__(self, name: str) -> None:
        self.name = name
        self.items: List[Tuple[str, float, float]] = []

    def add(self, label: str, errors, threshold: float) -> None:
        values = np.abs(np.asarray(errors, dtype=float)).ravel()
        if values.size == 0 or not np.all(np.isfinite(values)):
            worst = float("inf")
        else:
            worst = float(np.max(values))
        self.items.append((label, worst, threshold))

    def result(self) -> SuiteResult:
        passed = bool(self.items) and all(worst < threshold for _, worst, threshold in self.items)
        label, worst, threshold = max(self.items, key=lambda item: item[1] / item[2])
        detail = "; ".join(f"{lbl} {w:.3e} (< {t:g})" for lbl, w, t in self.items)
        return SuiteResult(self.name, passed, worst, threshold, detail)


def _rel(value, ref) -> np.ndarray:
    ref = np.asarray(ref, dtype=float)
    return np.abs(np.asarray(value, dtype=float) - ref) / np.maximum(1.0, np.abs(ref))


# ---------------------------------------------------------------------------
# Scenario builders shared with the tests
# ---------------------------------------------------------------------------
def random_smooth_expr(rng: np.random.Generator, dimension: int, terms: int = 3) -> Expr:
    """Random bounded combination of sin/cos/exp/polynomial terms in x_1..x_D."""
    pieces = []
    for _ in range(terms):
        axis = int(rng.integers(dimension))
        x = Var(coordinate_symbol(axis))
        c = float(rng.uniform(-1.5, 1.5))
        k = float(rng.uniform(0.5, 1.5))
        shift = float(rng.uniform(0.0, 2.0 * np.pi))
        kind = int(rng.integers(4))
        if kind == 0:
            piece = sin(k * x + shift)
        elif kind == 1:
            piece = exp(-k * x / 3.0)
        elif kind == 2:
            piece = k * x**2 - x
        else:
            other = Var(coordinate_symbol((axis + 1) % dimension))
            piece = cos(k * x) * sin(other + shift)
        pieces.append(c * piece)
    return sum_of(pieces)


def wave_scenario(alpha: float, m: float = 1.0, angle: float = 0.7) -> Tuple[SpaceSpec, LagrangianSpec, ClosedForm]:
    """2D Right-sector Klein–Gordon-type scenario solved by cos(k·u), |k| = m, u_i = x_i^α/α."""
    space = SpaceSpec.uniform(2, alpha, Side.RIGHT, 0.0)
    g1, g2, phi = Var(alpha_derivative_symbol(0)), Var(alpha_derivative_symbol(1)), Var(FIELD_SYMBOL)
    L = LagrangianSpec(0.5 * (g1**2 + g2**2) - 0.5 * m**2 * phi**2, Side.RIGHT, 2)
    u = [Var(coordinate_symbol(i)) ** alpha / alpha for i in range(2)]
    k = (m * np.cos(angle), m * np.sin(angle))
    return space, L, ClosedForm(cos(k[0] * u[0] + k[1] * u[1]), 2)


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------
def suite_fundamental_theorem(rng: np.random.Generator) -> SuiteResult:
    checks = _Checks("fundamental_theorem")
    f = ClosedForm(sin(Var(coordinate_symbol(0))), 1)
    errors = []
    for alpha in (0.3, 0.5, 0.9, 1.0):
        space = SpaceSpec.uniform(1, alpha, Side.RIGHT, 0.0)
        for s in (0.5, 1.0, 2.0):
            value = conf_integral(lambda pts: conf_deriv(f, 0, pts, space), 0, 0.0, s, space)
            errors.append(value - np.sin(s))
    checks.add("integral of derivative", errors, 1e-8)
    return checks.result()


def suite_limit_definition(rng: np.random.Generator, fields: int = 50, points: int = 10) -> SuiteResult:
    checks = _Checks("limit_definition")
    errors = []
    for alpha in (0.3, 0.5, 0.9, 1.0):
        space = SpaceSpec.uniform(1, alpha, Side.RIGHT, 0.0)
        for _ in range(fields):
            f = ClosedForm(random_smooth_expr(rng, 1), 1)
            xs = rng.uniform(0.3, 3.0, size=points)
            exact = conf_deriv(f, 0, xs[:, None], space)
            for x, ref in zip(xs, exact):
                value, _ = conf_deriv_limit(f, 0, float(x), space)
                errors.append(float(_rel(value, ref)))
    checks.add("ladder vs closed form", errors, 1e-6)
    return checks.result()


def suite_axioms(rng: np.random.Generator, cases: int = 100) -> SuiteResult:
    """Leibniz rule, linearity and chain rule, in both sectors."""
    checks = _Checks("axioms")
    leibniz, linear, chain = [], [], []
    for _ in range(cases):
        alpha = float(rng.uniform(0.2, 1.0))
        side = Side.RIGHT if rng.random() < 0.5 else Side.LEFT
        space = SpaceSpec.uniform(1, alpha, side, 0.0)
        x = float(rng.uniform(0.3, 3.0)) * (1.0 if side is Side.RIGHT else -1.0)
        p, q = random_smooth_expr(rng, 1), random_smooth_expr(rng, 1)
        a, b = rng.uniform(-2.0, 2.0, size=2)
        dp = conf_deriv(ClosedForm(p, 1), 0, x, space)
        dq = conf_deriv(ClosedForm(q, 1), 0, x, space)
        pv = ClosedForm(p, 1).values([x])[0]
        qv = ClosedForm(q, 1).values([x])[0]
        leibniz.append(_rel(conf_deriv(ClosedForm(p * q, 1), 0, x, space), pv * dq + qv * dp))
        linear.append(_rel(conf_deriv(ClosedForm(a * p + b * q, 1), 0, x, space), a * dp + b * dq))
        chain.append(_rel(conf_deriv(ClosedForm(sin(p), 1), 0, x, space), np.cos(pv) * dp))
    checks.add("leibniz", leibniz, 1e-9)
    checks.add("linearity", linear, 1e-9)
    checks.add("chain rule", chain, 1e-9)
    return checks.result()


def suite_el_on_shell(rng: np.random.Generator) -> SuiteResult:
    checks = _Checks("el_on_shell")
    t = np.linspace(0.1, 10.0, 200)[:, None]
    for alpha in (0.5, 0.9):
        p = OscillatorParams(1.0, 1.0, alpha, 1.0, 0.5)
        residual = el_residual(oscillator_lagrangian(p), ClosedForm(solution_expr(p), 1), t, oscillator_space(p))
        checks.add(f"oscillator alpha={alpha}", residual, 1e-8)
    space, L, field = wave_scenario(0.7)
    pts = rng.uniform(0.2, 3.0, size=(100, 2))
    checks.add("plane wave 2D", el_residual(L, field, pts, space), 1e-6)
    return checks.result()


def suite_breaking_term(rng: np.random.Generator) -> SuiteResult:
    checks = _Checks("breaking_term")
    space, L, field = wave_scenario(0.6)
    pts = rng.uniform(0.2, 3.0, size=(100, 2))
    for gen in (SymmetryGenerator.translation(space), SymmetryGenerator.rotation(space), SymmetryGenerator.scaling(space)):
        checks.add(gen.labels[0].split("_")[0], breaking_terms(gen, L, field, pts, space).sum(axis=-1), 1e-6)
    single = breaking_term(SymmetryGenerator.scaling(space), L, field, tuple(pts[0]), space)
    checks.add("single point", single.B, 1e-6)
    return checks.result()


def suite_commutation(rng: np.random.Generator, fields: int = 50) -> SuiteResult:
    checks = _Checks("commutation")
    for alpha in (0.3, 0.5, 0.9):
        space = SpaceSpec.uniform(2, alpha, Side.RIGHT, 0.0)
        errors = []
        for _ in range(fields):
            f = ClosedForm(random_smooth_expr(rng, 2), 2)
            pts = rng.uniform(0.3, 3.0, size=(4, 2))
            for i in range(2):
                for k in range(2):
                    errors.append(commutation_residual(f, i, k, pts, space))
        checks.add(f"alpha={alpha}", errors, 1e-8)
    return checks.result()


def suite_action_variation(rng: np.random.Generator) -> SuiteResult:
    """|direct - formula| shrinks by 4 when β halves, off-shell and on-shell."""
    checks = _Checks("action_variation")
    p = OscillatorParams(1.0, 1.0, 0.5, 1.0, 0.3)
    space = oscillator_space(p)
    L = oscillator_lagrangian(p)
    grid = GridSpec.uniform(1, 16, order=12)
    bounds = [(0.5, 5.0)]
    fields = {
        # off-shell, so every term of the first-order integrand contributes
        "off-shell": ClosedForm(solution_expr(p) + 0.1 * Var(coordinate_symbol(0)) ** 2, 1),
        "on-shell": ClosedForm(solution_expr(p), 1),
    }
    for shell, field in fields.items():
        for gen in (SymmetryGenerator.scaling(space), SymmetryGenerator.translation(space)):
            gaps = []
            for beta in (1e-3, 5e-4, 2.5e-4):
                direct, formula = action_variation(gen, L, field, space, grid, [beta], bounds)
                gaps.append(abs(direct - formula))
            ratios = [coarse / fine for coarse, fine in zip(gaps, gaps[1:])]
            checks.add(f"{shell} {gen.labels[0]} ratio-4", np.array(ratios) - 4.0, 0.5)

    # α = 1 on-shell translation is an exact invariance: both sides vanish
    classical = OscillatorParams(1.0, 1.0, 1.0, 1.0, 0.3)
    classical_space = oscillator_space(classical)
    direct, formula = action_variation(
        SymmetryGenerator.translation(classical_space),
        oscillator_lagrangian(classical),
        ClosedForm(solution_expr(classical), 1),
        classical_space,
        grid,
        [1e-3],
        bounds,
    )
    checks.add("on-shell classical translation", [direct, formula], 1e-8)
    return checks.result()


def suite_energy(rng: np.random.Generator) -> SuiteResult:
    checks = _Checks("energy")
    t = np.linspace(0.1, 10.0, 200)
    invariant_err, regularized_err, drift_err = [], [], []
    for _ in range(4):
        p = OscillatorParams(
            float(rng.uniform(0.5, 2.0)),
            float(rng.uniform(0.5, 2.0)),
            float(rng.choice([0.5, 0.7, 0.9])),
            float(rng.uniform(-1.0, 1.0)),
            float(rng.uniform(-1.0, 1.0)),
        )
        phi, v = analytic_solution(p, t)
        invariant = 0.5 * p.m**2 * p.amplitude_sq
        invariant_err.append(_rel(np.asarray(energy(p, t, phi, v)) * t ** (1.0 - p.alpha), invariant))
        regularized_err.append(regularized_energy(p, t, phi, v))
        trace = energy_trace(analytic_trajectory(p, 0.5, 5.0, samples=50))
        drift_err.append(_rel(trace.drift_meas, trace.drift_pred))
    checks.add("E t^(1-alpha) constant", invariant_err, 1e-9)
    checks.add("regularized energy (analytic)", regularized_err, 1e-9)
    checks.add("measured vs predicted drift", drift_err, 1e-5)

    p = OscillatorParams(1.0, 1.0, 0.5)
    t0 = anchor_time(0.5)
    trace = energy_trace(integrate(p, t0, 1.0, 1.0, t0 + 10.0, tolerance=1e-10, samples=101))
    checks.add("regularized drift (integrated)", trace.drift_meas - trace.drift_pred, 1e-6)
    return checks.result()


def suite_classical_limit(rng: np.random.Generator) -> SuiteResult:
    checks = _Checks("classical_limit")
    p = OscillatorParams(1.0, 1.0, 1.0)
    t0 = anchor_time(1.0)
    traj = integrate(p, t0, 1.0, 0.0, t0 + 20.0 * np.pi, tolerance=1e-12, samples=401)
    E = np.asarray(energy(p, traj.t, traj.phi, traj.dphi_dt))
    checks.add("energy over 10 periods", _rel(E, E[0]), 1e-8)

    space, L, field = wave_scenario(1.0)
    pts = rng.uniform(0.2, 3.0, size=(50, 2))
    checks.add("EMT divergence", emt_divergence(L, field, pts, space), 1e-6)

    line = SpaceSpec.uniform(1, 1.0, Side.RIGHT, 0.0)
    f = ClosedForm(random_smooth_expr(rng, 1), 1)
    xs = rng.uniform(0.3, 3.0, size=(20, 1))
    checks.add("derivative", conf_deriv(f, 0, xs, line) - f.partial(xs, (0,)), 1e-10)
    sine = ClosedForm(sin(Var(coordinate_symbol(0))), 1)
    checks.add("integral", [conf_integral(sine, 0, 0.0, 2.0, line) - (1.0 - np.cos(2.0))], 1e-10)
    return checks.result()


def suite_delayed_oscillator(rng: np.random.Generator) -> SuiteResult:
    """Delayed oscillator: integrated trajectories follow the fitted family; crossings spread out."""
    checks = _Checks("delayed_oscillator")
    for alpha in (1.0, 0.9, 0.5):
        p = OscillatorParams(1.0, 1.0, alpha)
        t0 = anchor_time(alpha)
        traj = integrate(p, t0, 1.0, 1.0, t0 + 10.0, tolerance=1e-10, samples=201)
        phi, _ = analytic_solution(traj.params, traj.t)
        checks.add(f"alpha={alpha} vs analytic", traj.phi - phi, 1e-6)
        if alpha < 1.0:
            long = integrate(p, t0, 1.0, 1.0, t0 + 200.0, tolerance=1e-10, samples=2001)
            gaps = np.diff(zero_crossings(long))
            growth = np.diff(gaps)
            # a non-increasing gap counts as a full violation
            checks.add(f"alpha={alpha} gaps increase", [0.0 if gaps.size >= 2 and np.all(growth > 0) else 1.0], 0.5)
    return checks.result()


def suite_time_reversal(rng: np.random.Generator) -> SuiteResult:
    """φ(-t) solves the Left-sector equations wherever φ solves the Right ones."""
    checks = _Checks("time_reversal")
    x = Var(coordinate_symbol(0))
    for alpha in (0.5, 0.9):
        p = OscillatorParams(1.0, 1.0, alpha, 0.8, -0.4)
        right = ClosedForm(solution_expr(p), 1)
        t = rng.uniform(0.2, 8.0, size=40)
        phi, v = analytic_solution(p, t)
        acc = right.partial(t[:, None], (0, 0))
        checks.add(f"alpha={alpha} right ODE", _rel(ode_rhs(p, t, phi, v), acc), 1e-9)
        # g(t) = φ(-t): g' = -φ'(-t), g'' = φ''(-t)
        checks.add(f"alpha={alpha} left ODE", _rel(ode_rhs_left(p, -t, phi, -v), acc), 1e-9)
        mirrored = ClosedForm(substitute(solution_expr(p), {coordinate_symbol(0): -x}), 1)
        residual = el_residual(
            oscillator_lagrangian(p, Side.LEFT), mirrored, -t[:, None], oscillator_space(p, Side.LEFT)
        )
        checks.add(f"alpha={alpha} left EL", residual, 1e-9)
    return checks.result()


SUITES: Dict[str, SuiteFn] = {
    "fundamental_theorem": suite_fundamental_theorem,
    "limit_definition": suite_limit_definition,
    "axioms": suite_axioms,
    "el_on_shell": suite_el_on_shell,
    "breaking_term": suite_breaking_term,
    "commutation": suite_commutation,
    "action_variation": suite_action_variation,
    "energy": suite_energy,
    "classical_limit": suite_classical_limit,
    "delayed_oscillator": suite_delayed_oscillator,
    "time_reversal": suite_time_reversal,
}


def run_suites(names: Optional[Sequence[str]] = None, seed: int = 0) -> List[SuiteResult]:
    """Run the named suites (all when empty) in registry order.

    Each suite draws from its own generator seeded by (seed, position), so
    selecting a subset never changes another suite's numbers. A numeric
    failure inside a suite becomes a FAIL result.
    """
    selected = set(names or SUITES)
    unknown = sorted(selected - set(SUITES))
    if unknown:
        raise ConfigurationError(f"unknown suite(s): {', '.join(unknown)}; known: {', '.join(SUITES)}")
    results = []
    for index, (name, fn) in enumerate(SUITES.items()):
        if name not in selected:
            continue
        try:
            result = fn(np.random.default_rng([seed, index]))
        except FracFieldError as exc:
            logger.warning("suite %s raised %s: %s", name, type(exc).__name__, exc)
            result = SuiteResult(name, False, float("inf"), float("nan"), f"{type(exc).__name__}: {exc}")
        logger.info("%s", result.summary_line())
        results.append(result)
    return results
