"""Gaussian measure of cones, Wulff shapes and facet polyhedra.

Three evaluation paths share one interface:

* ``exact_1d``: interval reductions evaluated with the standard normal cdf.
* ``quadrature_2d``: sections orthogonal to the cone's reference direction
  are intervals, so the 2-d integral collapses to an outer 1-d integral of
  cdf differences.  The outer integral uses composite Simpson panels that are
  doubled until the Richardson error estimate meets the target, with panel
  boundaries pinned to the region's vertices where the integrand has kinks.
* ``monte_carlo``: hit fractions over the deterministic Philox sample
  streams from :mod:`gaussmink.sampling`.

Deterministic paths report a certified ``error_bound`` and zero
``std_error``; Monte Carlo reports the one-sigma binomial error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from . import sampling
from .cones import FacetRegion, PolyhedralCone, PseudoCone, interval_from_rows, polygon_vertices
from .errors import DimensionUnsupportedError, NonPositiveRadiusError

SQRT_TWO_PI = math.sqrt(2.0 * math.pi)

MONTE_CARLO = "monte_carlo"
QUADRATURE_2D = "quadrature_2d"
EXACT_1D = "exact_1d"

# precision actually achieved by the erfc-based cdf, used as the certified
# bound on exact_1d values
_CDF_BOUND = 1e-14


def std_normal_cdf(x):
    """Standard normal cdf, exact to ~1e-15 absolute (erfc based)."""
    return ndtr(x)


def std_normal_pdf(x):
    x = np.asarray(x, dtype=float)
    out = np.exp(-0.5 * x * x) / SQRT_TWO_PI
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class EstimatorConfig:
    """Knobs shared by every measure estimator."""

    n_samples: int = 100_000
    seed: int = 0
    quadrature_steps: int = 128
    target_abs_error: float = 1e-10

    def __post_init__(self):
        if self.n_samples < 10_000:
            raise ValueError(f"n_samples must be at least 10000, got {self.n_samples}")
        if self.quadrature_steps < 64:
            raise ValueError(f"quadrature_steps must be at least 64, got {self.quadrature_steps}")
        if not 0 < self.target_abs_error < 1:
            raise ValueError("target_abs_error must lie in (0, 1)")


DEFAULT_CONFIG = EstimatorConfig()


@dataclass(frozen=True)
class MeasureEstimate:
    """A measure value with its uncertainty and provenance.

    std_error is the Monte Carlo one-sigma error and is exactly zero on
    deterministic paths; those carry their certified bound in error_bound.
    """

    value: float
    std_error: float
    method: str
    samples_or_steps: int
    seed: int | None = None
    error_bound: float = 0.0

    def scaled(self, factor: float) -> "MeasureEstimate":
        f = abs(factor)
        return MeasureEstimate(self.value * factor, self.std_error * f, self.method,
                               self.samples_or_steps, self.seed, self.error_bound * f)


def combined_budget(estimates, k_sigma: float = 3.0) -> float:
    """Tolerance for comparing sums/differences of estimates: k_sigma times
    the root-sum-square of MC sigmas plus all certified bounds."""
    sig = math.sqrt(sum(e.std_error ** 2 for e in estimates))
    bound = sum(e.error_bound for e in estimates)
    return k_sigma * sig + bound


def tail_bound(r: float, n: int) -> float:
    """Upper bound on the Gaussian mass outside the ball of radius r."""
    if not r > 0:
        raise NonPositiveRadiusError(f"radius must be positive, got {r!r}")
    if n < 1:
        raise ValueError(f"dimension must be at least 1, got {n}")
    return (2.0 * n * math.sqrt(n)) / (SQRT_TWO_PI * r) * math.exp(-r * r / (2.0 * n))


def truncation_radius(eps: float, n: int) -> float:
    """Smallest radius (to 1e-3 relative) whose tail bound is below eps."""
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps!r}")
    hi = 1.0
    while tail_bound(hi, n) > eps:
        hi *= 2.0
        if hi > 1e6:
            raise RuntimeError("truncation radius search did not terminate")
    lo = hi / 2.0 if hi > 1.0 else 1e-12
    while (hi - lo) / hi > 1e-3:
        mid = 0.5 * (lo + hi)
        if tail_bound(mid, n) <= eps:
            hi = mid
        else:
            lo = mid
    return hi


def _region_rows(region) -> tuple[np.ndarray, np.ndarray, int]:
    if isinstance(region, PseudoCone):
        return region.A, region.b, region.dim
    if isinstance(region, PolyhedralCone):
        return region.halfspaces, np.zeros(region.halfspaces.shape[0]), region.dim
    A, b = region
    A = np.asarray(A, dtype=float)
    return A, np.asarray(b, dtype=float), A.shape[1]


def _ref_direction(region) -> np.ndarray:
    if isinstance(region, PseudoCone):
        return region.cone.ref_dir
    if isinstance(region, PolyhedralCone):
        return region.ref_dir
    raise DimensionUnsupportedError(
        "quadrature path needs a cone-backed region with a reference direction"
    )


def _interval_mass(A: np.ndarray, b: np.ndarray) -> float:
    lo, hi, empty = interval_from_rows(A, b)
    if empty:
        return 0.0
    return float(max(ndtr(hi) - ndtr(lo), 0.0))


def _simpson_doubling(fvec, a: float, b: float, tol: float, n0: int, max_doublings: int = 18):
    """Composite Simpson with panel doubling and Richardson stopping.

    Returns (value, error_estimate, evaluations).  fvec maps a node array to
    integrand values.
    """
    n = max(4, n0 + (n0 % 2))
    xs = np.linspace(a, b, n + 1)
    ys = fvec(xs)
    evals = xs.size

    def simpson(y, x0, x1, m):
        hstep = (x1 - x0) / m
        return hstep / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())

    s_prev = simpson(ys, a, b, n)
    for _ in range(max_doublings):
        mids = 0.5 * (xs[:-1] + xs[1:])
        y_mid = fvec(mids)
        evals += mids.size
        merged = np.empty(xs.size + mids.size)
        merged[0::2] = ys
        merged[1::2] = y_mid
        xs = np.linspace(a, b, 2 * n + 1)
        ys = merged
        n *= 2
        s = simpson(ys, a, b, n)
        err = abs(s - s_prev) / 15.0
        if err <= tol:
            return s + (s - s_prev) / 15.0, err, evals
        s_prev = s
    return s_prev, abs(s_prev) * 1e-8 + tol, evals


def _quadrature_2d(A: np.ndarray, b: np.ndarray, ref: np.ndarray, cfg: EstimatorConfig) -> MeasureEstimate:
    """Gaussian area of a 2-d region by sectioning along the reference axis."""
    e_t = ref
    e_s = np.array([-ref[1], ref[0]])
    ct = A @ e_t
    cs = A @ e_s

    verts = polygon_vertices(A, b)
    if verts.shape[0] == 0:
        # nonempty regions here always have a vertex; no vertex means empty
        return MeasureEstimate(0.0, 0.0, QUADRATURE_2D, 0, None, 0.0)
    t_vertices = np.sort(verts @ e_t)
    t_min = float(t_vertices[0])

    eps_trunc = min(cfg.target_abs_error / 4.0, 1e-11)
    radius = truncation_radius(eps_trunc, 2)
    t_max = max(radius, t_min + 1.0)

    def integrand(ts: np.ndarray) -> np.ndarray:
        lo = np.full(ts.shape, -np.inf)
        hi = np.full(ts.shape, np.inf)
        feasible = np.ones(ts.shape, dtype=bool)
        for i in range(A.shape[0]):
            rhs = b[i] - ct[i] * ts
            if abs(cs[i]) <= 1e-13:
                feasible &= rhs >= -1e-12
            elif cs[i] > 0:
                np.minimum(hi, rhs / cs[i], out=hi)
            else:
                np.maximum(lo, rhs / cs[i], out=lo)
        width = np.clip(ndtr(hi) - ndtr(lo), 0.0, None)
        return np.exp(-0.5 * ts * ts) / SQRT_TWO_PI * width * feasible

    breaks = [t_min]
    for t in t_vertices[1:]:
        if t < t_max - 1e-12 and t > breaks[-1] + 1e-12:
            breaks.append(float(t))
    breaks.append(t_max)

    pieces = len(breaks) - 1
    per_tol = max((cfg.target_abs_error - eps_trunc) / max(pieces, 1), 1e-16)
    n0 = max(16, cfg.quadrature_steps // max(pieces, 1))
    total, err_total, evals = 0.0, eps_trunc, 0
    for a0, b0 in zip(breaks[:-1], breaks[1:]):
        val, err, ev = _simpson_doubling(integrand, a0, b0, per_tol, n0)
        total += val
        err_total += err
        evals += ev
    return MeasureEstimate(total, 0.0, QUADRATURE_2D, evals, None, err_total)


def _monte_carlo(A: np.ndarray, b: np.ndarray, dim: int, cfg: EstimatorConfig) -> MeasureEstimate:
    def mask(batch: np.ndarray) -> np.ndarray:
        return np.all(batch @ A.T <= b, axis=1)

    values, errs = sampling.monte_carlo_fractions([mask], dim, cfg.n_samples, cfg.seed)
    return MeasureEstimate(float(values[0]), float(errs[0]), MONTE_CARLO,
                           cfg.n_samples, cfg.seed, 0.0)


def gaussian_volume(region, cfg: EstimatorConfig = DEFAULT_CONFIG, method: str = "auto") -> MeasureEstimate:
    """Gaussian measure of a cone, Wulff shape, or explicit (A, b) region.

    method "auto" picks exact_1d for n=1, quadrature_2d for n=2 and
    monte_carlo above; explicit deterministic requests outside their
    dimension raise DimensionUnsupportedError.
    """
    A, b, dim = _region_rows(region)
    if method == "auto":
        method = EXACT_1D if dim == 1 else QUADRATURE_2D if dim == 2 else MONTE_CARLO
    if method == EXACT_1D:
        if dim != 1:
            raise DimensionUnsupportedError(f"exact path needs dimension 1, got {dim}")
        return MeasureEstimate(_interval_mass(A, b), 0.0, EXACT_1D, 1, None, _CDF_BOUND)
    if method == QUADRATURE_2D:
        if dim != 2:
            raise DimensionUnsupportedError(f"2-d quadrature asked for dimension {dim}")
        return _quadrature_2d(A, b, _ref_direction(region), cfg)
    if method == MONTE_CARLO:
        return _monte_carlo(A, b, dim, cfg)
    raise ValueError(f"unknown method {method!r}")


def gaussian_measure_polyhedron(region: FacetRegion, cfg: EstimatorConfig = DEFAULT_CONFIG) -> MeasureEstimate:
    """Standard Gaussian measure of a facet polyhedron in its own dimension d.

    d=0 counts the single point (weight 1 if feasible), d=1 is the exact
    interval mass, d>=2 is Monte Carlo in frame coordinates.
    """
    if region.empty:
        return MeasureEstimate(0.0, 0.0, EXACT_1D if region.dim <= 1 else MONTE_CARLO,
                               0, None, 0.0)
    if region.dim == 0:
        return MeasureEstimate(1.0, 0.0, EXACT_1D, 1, None, 0.0)
    if region.dim == 1:
        return MeasureEstimate(_interval_mass(region.A, region.b), 0.0, EXACT_1D, 1, None, _CDF_BOUND)
    return _monte_carlo(region.A, region.b, region.dim, cfg)


def covolume(K: PseudoCone, cfg: EstimatorConfig = DEFAULT_CONFIG, method: str = "auto") -> MeasureEstimate:
    """Gaussian measure of cone minus Wulff shape.

    The Monte Carlo path counts both memberships on one common sample
    stream, so the identity volume(K) + covolume = volume(cone) holds
    exactly for matching configs; deterministic paths difference the two
    quadrature values and add their bounds.
    """
    dim = K.dim
    if method == "auto":
        method = EXACT_1D if dim == 1 else QUADRATURE_2D if dim == 2 else MONTE_CARLO
    if method == MONTE_CARLO:
        A_c = K.cone.halfspaces

        def in_cone(batch):
            return np.all(batch @ A_c.T <= 0.0, axis=1)

        def in_shape(batch):
            return np.all(batch @ K.A.T <= K.b, axis=1)

        values, _ = sampling.monte_carlo_fractions([in_cone, in_shape], dim, cfg.n_samples, cfg.seed)
        v = float(values[0] - values[1])
        se = math.sqrt(max(v * (1.0 - v), 0.0) / cfg.n_samples)
        return MeasureEstimate(v, se, MONTE_CARLO, cfg.n_samples, cfg.seed, 0.0)
    vol_cone = gaussian_volume(K.cone, cfg, method)
    vol_K = gaussian_volume(K, cfg, method)
    return MeasureEstimate(vol_cone.value - vol_K.value, 0.0, method,
                           vol_cone.samples_or_steps + vol_K.samples_or_steps, None,
                           vol_cone.error_bound + vol_K.error_bound)


def mc_probability(event, dim: int, cfg: EstimatorConfig = DEFAULT_CONFIG) -> MeasureEstimate:
    """Monte Carlo probability of an arbitrary event under the standard normal."""
    values, errs = sampling.monte_carlo_fractions([event], dim, cfg.n_samples, cfg.seed)
    return MeasureEstimate(float(values[0]), float(errs[0]), MONTE_CARLO,
                           cfg.n_samples, cfg.seed, 0.0)
