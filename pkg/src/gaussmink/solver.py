"""Inverse solver: recover support values from a prescribed facet measure.

Given a cone, admissible directions and positive weights mu, the solver
maximizes the product functional (p > 0) or the ratio functional (p < 0)
over power coordinates g = h^p by projected gradient ascent with Armijo
backtracking.  Stationarity of either functional is equivalent to

    mu_i = c * S_{p,i}([h])      with the sign-adjusted constant
    c    = +- sum_j h_j^p mu_j / (p * volume),

so the reported residual vector mu - c * S_p certifies the solution
directly, independent of the optimization trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .cones import DirectionSet, PolyhedralCone, PseudoCone, wulff_shape
from .errors import DegenerateDirectionError, DimensionUnsupportedError
from .gaussian import (
    EXACT_1D,
    MONTE_CARLO,
    QUADRATURE_2D,
    EstimatorConfig,
    MeasureEstimate,
    gaussian_volume,
)
from .surface import SurfaceMeasureVector, sp_measure_vector
from .validation import as_float_vector, check_lengths_match, check_positive_weights
from .variational import (
    power_coords,
    product_gradient,
    ratio_gradient,
    support_from_power,
)

DETERMINISTIC_2D = "deterministic_2d"

G_FLOOR = 1e-8
EMPTY_FACET_PATIENCE = 10


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 600
    residual_tol: float = 1e-6
    initial_h: object = "auto"  # "auto" or an explicit positive vector
    armijo_shrink: float = 0.5
    armijo_slope: float = 1e-4
    min_step: float = 1e-14
    path: str = "auto"  # auto | deterministic_2d | monte_carlo
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    functional: float
    rel_residual: float
    step: float


@dataclass(frozen=True)
class SolverResult:
    h_star: np.ndarray
    c: float
    residual: np.ndarray
    rel_residual: float
    functional_value: float
    iterations: int
    converged: bool
    trace: tuple[TraceRow, ...]
    shape: PseudoCone
    distance_bounds: tuple[float, float]
    method: str


def _volume_method(path: str, dim: int) -> str:
    if path == "auto":
        return EXACT_1D if dim == 1 else QUADRATURE_2D if dim == 2 else MONTE_CARLO
    if path == DETERMINISTIC_2D:
        if dim > 2:
            raise DimensionUnsupportedError(
                f"the deterministic path covers dimensions 1 and 2, got {dim}"
            )
        return EXACT_1D if dim == 1 else QUADRATURE_2D
    if path == MONTE_CARLO:
        return MONTE_CARLO
    raise ValueError(f"unknown solver path {path!r}")


def residual(K: PseudoCone, mu, p: float, cfg: EstimatorConfig | None = None,
             sp: SurfaceMeasureVector | None = None,
             volume: MeasureEstimate | None = None) -> tuple[np.ndarray, float, float]:
    """Stationarity residual (vector, relative l1 residual, constant c)."""
    if p == 0:
        raise ValueError("exponent p must be nonzero")
    mu = as_float_vector(mu, "weights")
    check_lengths_match(mu, K.h, "weights", "support values")
    check_positive_weights(mu, "weights")
    cfg = cfg if cfg is not None else EstimatorConfig()
    spv = sp if sp is not None else sp_measure_vector(K, p, cfg)
    vol = volume if volume is not None else gaussian_volume(K, cfg)
    weighted = float(np.sum(K.h ** p * mu))
    sign = 1.0 if p > 0 else -1.0
    c = sign * weighted / (p * vol.value)
    res = mu - c * spv.values
    rel = float(np.sum(np.abs(res)) / np.sum(np.abs(mu)))
    return res, rel, c


def auto_initialize(cone: PolyhedralCone, omega: DirectionSet) -> np.ndarray:
    """Constant support vector whose Wulff shape sits at distance 1 from o.

    Wulff shapes scale linearly in h, so one distance evaluation of the
    all-ones shape fixes the constant exactly; the distance lands inside
    the required [0.1, 10] window by construction.
    """
    base = wulff_shape(cone, omega, np.ones(len(omega)))
    d = base.distance_to_origin()
    if not d > 0:
        raise RuntimeError("all-ones Wulff shape reports nonpositive distance")
    return np.full(len(omega), 1.0 / d)


def _residual_sigma(spv: SurfaceMeasureVector, vol: MeasureEstimate,
                    c: float, mu: np.ndarray) -> float:
    """Rough one-sigma level of the relative residual on Monte Carlo paths."""
    vol_part = abs(c) * vol.std_error / max(vol.value, 1e-300) * spv.values
    per = abs(c) * spv.std_errors + vol_part
    return float(np.sum(per) / np.sum(np.abs(mu)))


def solve(cone: PolyhedralCone, omega: DirectionSet, mu, p: float,
          cfg: SolverConfig | None = None) -> SolverResult:
    """Solve the discrete inverse problem for the weights mu at exponent p.

    Returns the best iterate found with converged=False rather than raising
    when the residual tolerance is not met.  DegenerateDirectionError is
    raised when a positively weighted facet stays empty at the coordinate
    floor despite support tightening.
    """
    if p == 0:
        raise ValueError("exponent p must be nonzero")
    cfg = cfg if cfg is not None else SolverConfig()
    mu = as_float_vector(mu, "weights")
    check_lengths_match(mu, omega.dirs, "weights", "directions")
    check_positive_weights(mu, "weights")
    method = _volume_method(cfg.path, cone.dim)
    est = cfg.estimator
    deterministic = method != MONTE_CARLO

    if isinstance(cfg.initial_h, str) and cfg.initial_h == "auto":
        h = auto_initialize(cone, omega)
    else:
        h = as_float_vector(cfg.initial_h, "initial_h")
        check_lengths_match(h, omega.dirs, "initial_h", "directions")
    g = power_coords(h, p)

    def build(g_vec: np.ndarray) -> PseudoCone:
        return wulff_shape(cone, omega, support_from_power(g_vec, p))

    def functional_value(K: PseudoCone, vol: MeasureEstimate) -> float:
        weighted = float(np.sum(K.h ** p * mu))
        return vol.value * weighted if p > 0 else vol.value / weighted

    def gradient(K: PseudoCone, vol: MeasureEstimate, spv: SurfaceMeasureVector) -> np.ndarray:
        if p > 0:
            return product_gradient(K, mu, p, est, volume=vol, sp=spv)
        return ratio_gradient(K, mu, p, est, volume=vol, sp=spv)

    K = build(g)
    vol = gaussian_volume(K, est, method)
    spv = sp_measure_vector(K, p, est)
    f_val = functional_value(K, vol)

    trace: list[TraceRow] = []
    dist = K.distance_to_origin()
    dist_min = dist_max = dist
    best = (f_val, g.copy(), K, vol, spv)
    empty_streak = np.zeros(len(omega), dtype=int)
    tighten_count = 0
    converged = False
    alpha_prev = None
    g_prev = None
    grad_prev = None
    step_taken = 0.0
    iteration = 0

    for iteration in range(1, cfg.max_iters + 1):
        res_vec, rel, c = residual(K, mu, p, est, sp=spv, volume=vol)
        trace.append(TraceRow(iteration, f_val, rel, step_taken))

        stop_tol = cfg.residual_tol
        if not deterministic:
            stop_tol = max(stop_tol, 2.0 * _residual_sigma(spv, vol, c, mu))
        if rel <= stop_tol:
            converged = True
            break

        grad = gradient(K, vol, spv)

        # reactivate persistently empty but charged facets by tightening h
        # onto the true support values of the current region; the region is
        # unchanged, the functional never decreases, and every constraint
        # becomes active
        empty_now = np.array([f.empty for f in K.facets])
        empty_streak = np.where(empty_now, empty_streak + 1, 0)
        if np.any(empty_streak >= EMPTY_FACET_PATIENCE):
            tighten_count += 1
            if tighten_count > 8:
                stuck = int(np.argmax(empty_streak))
                if g[stuck] <= G_FLOOR * (1.0 + 1e-9):
                    raise DegenerateDirectionError(
                        f"direction {stuck} has weight {mu[stuck]} but its facet "
                        "stays empty at the coordinate floor"
                    )
            h_tight = K.support_values()
            g = power_coords(np.maximum(h_tight, 1e-12), p)
            g = np.maximum(g, G_FLOOR)
            K = build(g)
            vol = gaussian_volume(K, est, method)
            spv = sp_measure_vector(K, p, est)
            f_val = functional_value(K, vol)
            empty_streak[:] = 0
            alpha_prev = None
            g_prev = None
            continue

        # trial step: Barzilai-Borwein when history exists, scale-matched otherwise
        if g_prev is not None:
            dg = g - g_prev
            dgrad = grad - grad_prev
            denom = float(dg @ dgrad)
            alpha = abs(float(dg @ dg) / denom) if abs(denom) > 1e-300 else 2.0 * alpha_prev
        elif alpha_prev is not None:
            alpha = 2.0 * alpha_prev
        else:
            alpha = 0.1 * max(float(np.max(g)), G_FLOOR) / max(float(np.max(np.abs(grad))), 1e-300)
        alpha = min(alpha, 1e8)

        accepted = False
        for _ in range(80):
            g_new = np.maximum(g + alpha * grad, G_FLOOR)
            move = g_new - g
            slope = float(grad @ move)
            if np.all(move == 0.0) or alpha < cfg.min_step:
                break
            K_new = build(g_new)
            vol_new = gaussian_volume(K_new, est, method)
            f_new = functional_value(K_new, vol_new)
            if f_new >= f_val + cfg.armijo_slope * slope:
                accepted = True
                break
            alpha *= cfg.armijo_shrink
        if not accepted:
            break

        g_prev, grad_prev = g, grad
        g, K, vol, f_val = g_new, K_new, vol_new, f_new
        spv = sp_measure_vector(K, p, est)
        alpha_prev = alpha
        step_taken = alpha
        dist = K.distance_to_origin()
        dist_min = min(dist_min, dist)
        dist_max = max(dist_max, dist)
        if f_val > best[0]:
            best = (f_val, g.copy(), K, vol, spv)
        if dist < 1e-9 or dist > 1e9:
            break

    if not converged and best[0] > f_val:
        f_val, g, K, vol, spv = best
    res_vec, rel, c = residual(K, mu, p, est, sp=spv, volume=vol)
    return SolverResult(
        h_star=K.h.copy(),
        c=c,
        residual=res_vec,
        rel_residual=rel,
        functional_value=f_val,
        iterations=iteration,
        converged=converged,
        trace=tuple(trace),
        shape=K,
        distance_bounds=(dist_min, dist_max),
        method=method,
    )
