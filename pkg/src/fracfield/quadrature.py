"""Gauss–Legendre panel rules.

Integrals are computed in u-coordinates where the conformable measure is
exactly ``du/α``. Nodes never touch panel ends, so integrands are never
evaluated at the singular endpoint.
"""

from __future__ import annotations

import logging
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import ConvergenceError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=64)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``order``-point rule on [-1, 1]."""
    nodes, weights = leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def panel_rule(breakpoints: np.ndarray, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Composite rule over consecutive ``breakpoints``; returns flat nodes and weights."""
    edges = np.asarray(breakpoints, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    x, w = gauss_legendre(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[:, None] + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    return nodes.ravel(), weights.ravel()


def _panel_sums(
    fn: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray, order: int
) -> Tuple[np.ndarray, np.ndarray]:
    """One-panel and two-half-panel estimates for every panel, in one call of ``fn``."""
    x, w = gauss_legendre(order)
    mid = 0.5 * (lo + hi)
    bounds = (
        (lo, hi),
        (lo, mid),
        (mid, hi),
    )
    nodes = []
    for a, b in bounds:
        nodes.append(0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * x[None, :])
    values = np.asarray(fn(np.concatenate([n.ravel() for n in nodes])), dtype=float)
    values = values.reshape(3, lo.shape[0], order)
    sums = [0.5 * (b - a) * (values[k] @ w) for k, (a, b) in enumerate(bounds)]
    return sums[0], sums[1] + sums[2]


def adaptive_integral(
    fn: Callable[[np.ndarray], np.ndarray],
    breakpoints: np.ndarray,
    *,
    order: int = 10,
    rel_tol: float = 1e-12,
    abs_tol: float = 1e-14,
    max_panels: int = 4000,
) -> Tuple[float, float]:
    """Globally adaptive panel integration of a vectorised ``fn``.

    Every panel is compared against its two halves; the panels carrying the
    largest share of the error estimate are bisected until the summed
    estimate meets ``max(abs_tol, rel_tol * |value|)``.
    """
    edges = np.asarray(breakpoints, dtype=float)
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    coarse, fine = _panel_sums(fn, lo, hi, order)
    err = np.abs(fine - coarse)
    iterations = 0
    while True:
        value = float(np.sum(fine))
        total_err = float(np.sum(err))
        target = max(abs_tol, rel_tol * abs(value))
        if total_err <= target:
            logger.debug("adaptive quadrature: %d panels, %d refinements, err=%.3e", lo.size, iterations, total_err)
            return value, total_err
        splittable = (hi - lo) > 8 * np.finfo(float).eps * np.maximum(1.0, np.abs(hi))
        candidates = np.where(splittable & (err >= 0.25 * np.max(err[splittable], initial=0.0)))[0]
        if candidates.size == 0 or lo.size + candidates.size > max_panels:
            raise ConvergenceError(
                f"quadrature did not converge: estimate {total_err:.3e} above target {target:.3e} "
                f"with {lo.size} panels",
                estimate=total_err,
            )
        mid = 0.5 * (lo[candidates] + hi[candidates])
        new_lo = np.concatenate([lo[candidates], mid])
        new_hi = np.concatenate([mid, hi[candidates]])
        new_coarse, new_fine = _panel_sums(fn, new_lo, new_hi, order)
        keep = np.ones(lo.size, dtype=bool)
        keep[candidates] = False
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        fine = np.concatenate([fine[keep], new_fine])
        err = np.concatenate([err[keep], np.abs(new_fine - new_coarse)])
        iterations += 1
