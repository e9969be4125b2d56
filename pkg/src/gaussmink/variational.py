"""Variational structure of the Gaussian volume over support coordinates.

Optimization runs in the power coordinates g_i = h_i^p.  Along the family
with g(t) = g + t f the Gaussian volume of the Wulff shape has one-sided
derivative -(1/p) sum_i f_i S_{p,i}, the covolume the opposite sign, so in
g coordinates

    d volume / d g_i = -(1/p) S_{p,i}.

The two maximized functionals and their gradients follow by product and
quotient rule; their stationary points are exactly the solutions of the
discrete inverse problem (see gaussmink.solver.residual).
"""

from __future__ import annotations

import numpy as np

from .cones import PseudoCone
from .errors import StepTooLargeError, SwitchPointTooCloseError
from .gaussian import DEFAULT_CONFIG, EstimatorConfig, MeasureEstimate, covolume, gaussian_volume
from .surface import sp_measure_vector
from .validation import as_float_vector, check_lengths_match, check_positive_weights

FD_STEP_FRACTION = 1e-4
_SWITCH_MARGIN = 1e-6


def power_coords(h: np.ndarray, p: float) -> np.ndarray:
    """Map support values to optimization coordinates g = h^p."""
    if p == 0:
        raise ValueError("exponent p must be nonzero")
    return np.asarray(h, dtype=float) ** p


def support_from_power(g: np.ndarray, p: float) -> np.ndarray:
    """Inverse of power_coords; g must be strictly positive."""
    g = np.asarray(g, dtype=float)
    if np.any(g <= 0):
        raise StepTooLargeError("power coordinates must stay strictly positive")
    return g ** (1.0 / p)


def _weights_for(K_or_h, mu) -> tuple[np.ndarray, np.ndarray]:
    h = K_or_h.h if isinstance(K_or_h, PseudoCone) else as_float_vector(K_or_h, "h")
    mu = as_float_vector(mu, "weights")
    check_lengths_match(h, mu, "support values", "weights")
    check_positive_weights(mu, "weights")
    return h, mu


def product_functional(K: PseudoCone, mu, p: float, cfg: EstimatorConfig = DEFAULT_CONFIG,
                       volume: MeasureEstimate | None = None) -> MeasureEstimate:
    """volume([h]) * sum h_i^p mu_i, maximized for p > 0."""
    if not p > 0:
        raise ValueError(f"product functional needs p > 0, got {p}")
    h, mu = _weights_for(K, mu)
    vol = volume if volume is not None else gaussian_volume(K, cfg)
    return vol.scaled(float(np.sum(h ** p * mu)))


def ratio_functional(K: PseudoCone, mu, p: float, cfg: EstimatorConfig = DEFAULT_CONFIG,
                     volume: MeasureEstimate | None = None) -> MeasureEstimate:
    """volume([h]) / sum h_i^p mu_i, maximized for p < 0."""
    if not p < 0:
        raise ValueError(f"ratio functional needs p < 0, got {p}")
    h, mu = _weights_for(K, mu)
    vol = volume if volume is not None else gaussian_volume(K, cfg)
    return vol.scaled(1.0 / float(np.sum(h ** p * mu)))


def volume_gradient(K: PseudoCone, p: float, cfg: EstimatorConfig = DEFAULT_CONFIG,
                    sp=None) -> np.ndarray:
    """Gradient of the Gaussian volume in g coordinates: -(1/p) S_{p,i}."""
    spv = sp if sp is not None else sp_measure_vector(K, p, cfg)
    return -(1.0 / p) * spv.values


def product_gradient(K: PseudoCone, mu, p: float, cfg: EstimatorConfig = DEFAULT_CONFIG,
                     volume: MeasureEstimate | None = None, sp=None) -> np.ndarray:
    """Gradient of the product functional in g coordinates."""
    h, mu = _weights_for(K, mu)
    vol = volume if volume is not None else gaussian_volume(K, cfg)
    spv = sp if sp is not None else sp_measure_vector(K, p, cfg)
    weighted = float(np.sum(h ** p * mu))
    return -(1.0 / p) * spv.values * weighted + vol.value * mu


def ratio_gradient(K: PseudoCone, mu, p: float, cfg: EstimatorConfig = DEFAULT_CONFIG,
                   volume: MeasureEstimate | None = None, sp=None) -> np.ndarray:
    """Gradient of the ratio functional in g coordinates (quotient rule)."""
    h, mu = _weights_for(K, mu)
    vol = volume if volume is not None else gaussian_volume(K, cfg)
    spv = sp if sp is not None else sp_measure_vector(K, p, cfg)
    weighted = float(np.sum(h ** p * mu))
    return (-(1.0 / p) * spv.values * weighted - vol.value * mu) / weighted ** 2


def _shape_at(K: PseudoCone, f: np.ndarray, p: float, t: float) -> PseudoCone:
    g = power_coords(K.h, p) + t * f
    if np.any(g <= 0):
        raise StepTooLargeError(
            f"step {t:.3e} leaves the positive power-coordinate domain"
        )
    return K.with_support(support_from_power(g, p))


def fd_volume_derivative(K: PseudoCone, f, p: float, step: float | None = None,
                         cfg: EstimatorConfig = DEFAULT_CONFIG, method: str = "auto",
                         use_covolume: bool = False) -> float:
    """Central difference of the (co)volume along direction f in g coordinates.

    With step None the step starts at 1e-4 * min_i g_i and halves while the
    perturbed coordinates leave the positive domain; an explicit too-large
    step raises StepTooLargeError instead.  Both endpoint evaluations share
    the estimator config, so Monte Carlo noise cancels through common random
    numbers and deterministic paths difference two certified values.
    """
    f = as_float_vector(f, "direction")
    check_lengths_match(f, K.h, "direction", "support values")
    g = power_coords(K.h, p)
    auto = step is None
    t = FD_STEP_FRACTION * float(np.min(g)) if auto else float(step)
    for _ in range(60):
        try:
            K_plus = _shape_at(K, f, p, t)
            K_minus = _shape_at(K, f, p, -t)
        except StepTooLargeError:
            if not auto:
                raise
            t *= 0.5
            continue
        measure = covolume if use_covolume else gaussian_volume
        v_plus = measure(K_plus, cfg) if use_covolume else measure(K_plus, cfg, method)
        v_minus = measure(K_minus, cfg) if use_covolume else measure(K_minus, cfg, method)
        return (v_plus.value - v_minus.value) / (2.0 * t)
    raise StepTooLargeError("could not find an admissible finite-difference step")


def fd_covolume_derivative(K: PseudoCone, f, p: float, step: float | None = None,
                           cfg: EstimatorConfig = DEFAULT_CONFIG) -> float:
    """Central difference of the covolume; analytically +(1/p) sum f_i S_{p,i}."""
    return fd_volume_derivative(K, f, p, step, cfg, use_covolume=True)


def radial_derivative_check(K: PseudoCone, f, v, step: float = 1e-6,
                            p: float = 1.0) -> tuple[float, float]:
    """Compare d/dt rho along the support family against its closed form.

    At t=0 the derivative of the radial function of [(h^p + t f)^(1/p)] in
    direction v is f(active) * rho / (p * h_active^p).  Rays too close to a
    facet switch (top two candidate facets within relative margin 1e-6, or
    the active facet changing inside the probed step) raise
    SwitchPointTooCloseError since the one-sided derivatives differ there.
    """
    f = as_float_vector(f, "direction")
    check_lengths_match(f, K.h, "direction", "support values")
    rho, active = K.radial_function(v)
    v = np.asarray(v, dtype=float)
    denom = -(K.omega.dirs @ v)
    vals = K.h / denom
    order = np.argsort(vals)[::-1]
    if len(vals) > 1 and (vals[order[0]] - vals[order[1]]) <= _SWITCH_MARGIN * vals[order[0]]:
        raise SwitchPointTooCloseError(
            f"facets {order[0]} and {order[1]} tie within margin at this direction"
        )
    g = power_coords(K.h, p)

    def rho_at(t: float) -> float:
        gt = g + t * f
        if np.any(gt <= 0):
            raise StepTooLargeError(f"step {t:.3e} leaves the positive domain")
        cand = support_from_power(gt, p) / denom
        idx = int(np.argmax(cand))
        if idx != active:
            raise SwitchPointTooCloseError(
                f"active facet switches from {active} to {idx} within the step"
            )
        return float(cand[idx])

    fd = (rho_at(step) - rho_at(-step)) / (2.0 * step)
    analytic = float(f[active]) * rho / (p * float(K.h[active]) ** p)
    return fd, analytic
