"""Gaussian surface area measures of Wulff shapes.

The Gaussian surface measure of a discrete instance concentrates on the
facet normals: facet i carries

    S_i = (2 pi)^(-1/2) exp(-h_i^2 / 2) * gamma^{n-1}(facet polyhedron)

because |x|^2 = h_i^2 + |y|^2 splits along the facet's hyperplane frame.
The reweighted measure for exponent p multiplies facet i by h_i^(1-p).

An independent route to the same integrals goes through the radial
parametrization of the boundary over the open cone directions; for n=2 that
is a 1-d angular integral split at facet switch angles, for n=3 a sphere
Monte Carlo.  The two routes share no geometry code, which is what makes
their agreement a meaningful check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from . import sampling
from .cones import PolyhedralCone, PseudoCone, hyperplane_basis, interval_from_rows
from .errors import DimensionUnsupportedError, NonPositiveRadiusError
from .gaussian import (
    DEFAULT_CONFIG,
    EXACT_1D,
    MONTE_CARLO,
    QUADRATURE_2D,
    SQRT_TWO_PI,
    EstimatorConfig,
    MeasureEstimate,
    _simpson_doubling,
    gaussian_measure_polyhedron,
)


def facet_gaussian_area(K: PseudoCone, i: int, cfg: EstimatorConfig = DEFAULT_CONFIG) -> MeasureEstimate:
    """Gaussian surface area carried by facet i (exactly 0 for empty facets)."""
    region = K.facets[i]
    base = gaussian_measure_polyhedron(region, cfg)
    scale = math.exp(-0.5 * K.h[i] ** 2) / SQRT_TWO_PI
    return base.scaled(scale)


def sp_measure(K: PseudoCone, i: int, p: float, cfg: EstimatorConfig = DEFAULT_CONFIG) -> MeasureEstimate:
    """Weight of facet i under the exponent-p reweighted surface measure."""
    if p == 0:
        raise ValueError("exponent p must be nonzero")
    return facet_gaussian_area(K, i, cfg).scaled(float(K.h[i]) ** (1.0 - p))


@dataclass(frozen=True)
class SurfaceMeasureVector:
    values: np.ndarray
    std_errors: np.ndarray
    error_bounds: np.ndarray
    p: float
    method: str


def sp_measure_vector(K: PseudoCone, p: float, cfg: EstimatorConfig = DEFAULT_CONFIG) -> SurfaceMeasureVector:
    ests = [sp_measure(K, i, p, cfg) for i in range(len(K.omega))]
    methods = {e.method for e in ests if e.samples_or_steps > 0}
    return SurfaceMeasureVector(
        values=np.array([e.value for e in ests]),
        std_errors=np.array([e.std_error for e in ests]),
        error_bounds=np.array([e.error_bound for e in ests]),
        p=p,
        method=methods.pop() if len(methods) == 1 else "mixed",
    )


def gaussian_boundary_weight(K: PseudoCone, p: float):
    """Integrand (2 pi)^(-n/2) h_active^(1-p) exp(-|x|^2/2) for boundary integrals."""
    n = K.dim
    norm = (2.0 * math.pi) ** (-n / 2.0)

    def F(points: np.ndarray, active: np.ndarray) -> np.ndarray:
        sq = np.sum(points * points, axis=1)
        return norm * K.h[active] ** (1.0 - p) * np.exp(-0.5 * sq)

    return F


def facet_switch_angles(K: PseudoCone) -> list[float]:
    """Angles inside the cone arc where the active facet can change (n=2)."""
    lo, hi = K.cone.angular_arc()
    m = len(K.omega)
    cands: list[float] = []
    for i in range(m):
        for j in range(i + 1, m):
            w = K.h[j] * K.omega.dirs[i] - K.h[i] * K.omega.dirs[j]
            base = math.atan2(w[1], w[0])
            for cand in (base + 0.5 * math.pi, base - 0.5 * math.pi):
                # shift into [lo, lo + 2 pi) before the range test
                shifted = lo + (cand - lo) % (2.0 * math.pi)
                if lo + 1e-12 < shifted < hi - 1e-12:
                    cands.append(shifted)
    return sorted(cands)


def facet_activity_arcs(K: PseudoCone) -> list[tuple[float, float, int]]:
    """Partition of the cone arc into (start, end, active facet index) for n=2."""
    if K.dim != 2:
        raise DimensionUnsupportedError("activity arcs are defined for dimension 2")
    lo, hi = K.cone.angular_arc()
    cuts = [lo] + facet_switch_angles(K) + [hi]
    arcs: list[tuple[float, float, int]] = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a <= 1e-14:
            continue
        mid = 0.5 * (a + b)
        v = np.array([math.cos(mid), math.sin(mid)])
        vals = K.h / (-(K.omega.dirs @ v))
        idx = int(np.argmax(vals))
        if arcs and arcs[-1][2] == idx and abs(arcs[-1][1] - a) <= 1e-14:
            arcs[-1] = (arcs[-1][0], b, idx)
        else:
            arcs.append((a, b, idx))
    return arcs


def radial_transform_integral(K: PseudoCone, F, cfg: EstimatorConfig = DEFAULT_CONFIG) -> MeasureEstimate:
    """Boundary integral of F via the radial parametrization.

    F maps (points (k, n), active (k,)) to values; the integral runs over
    the part of the boundary radially visible from inside the cone, i.e.
    all facets.  n=2 integrates over the cone arc with panels split at
    facet switch angles; n=3 is a uniform-sphere Monte Carlo restricted to
    the open cone.
    """
    n = K.dim
    if n == 2:
        arcs = facet_activity_arcs(K)
        dirs = K.omega.dirs
        h = K.h

        def arc_integrand(idx: int):
            # fixing the facet index per arc keeps every panel smooth up to
            # its endpoints; recomputing argmax there would put the jump at a
            # switch angle right on a quadrature node
            def integrand(thetas: np.ndarray) -> np.ndarray:
                vs = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
                denom = -(vs @ dirs[idx])
                rho = h[idx] / denom
                points = vs * rho[:, None]
                active = np.full(len(thetas), idx)
                return F(points, active) * rho / np.abs(denom)

            return integrand

        per_tol = max(cfg.target_abs_error / max(len(arcs), 1), 1e-16)
        total, err_total, evals = 0.0, 0.0, 0
        for a, b, idx in arcs:
            val, err, ev = _simpson_doubling(arc_integrand(idx), a, b, per_tol, 16)
            total += val
            err_total += err
            evals += ev
        return MeasureEstimate(total, 0.0, QUADRATURE_2D, evals, None, err_total)
    if n == 3:
        halfspaces = K.cone.halfspaces
        dirs = K.omega.dirs
        h = K.h
        sphere_area = 4.0 * math.pi
        total = 0.0
        total_sq = 0.0
        count = 0
        for batch in sampling.iter_normal_chunks(cfg.seed, 3, cfg.n_samples):
            norms = np.linalg.norm(batch, axis=1)
            good = norms > 1e-12
            vs = batch[good] / norms[good, None]
            inside = np.all(vs @ halfspaces.T < 0.0, axis=1)
            contrib = np.zeros(vs.shape[0])
            if np.any(inside):
                vin = vs[inside]
                denom = -(vin @ dirs.T)
                vals = h / denom
                active = np.argmax(vals, axis=1)
                rho = vals[np.arange(vin.shape[0]), active]
                points = vin * rho[:, None]
                inner = np.abs(np.sum(vin * dirs[active], axis=1))
                contrib[inside] = F(points, active) * rho ** 2 / inner
            total += float(np.sum(contrib))
            total_sq += float(np.sum(contrib ** 2))
            count += vs.shape[0]
        mean = total / count
        var = max(total_sq / count - mean ** 2, 0.0)
        return MeasureEstimate(sphere_area * mean, sphere_area * math.sqrt(var / count),
                               MONTE_CARLO, count, cfg.seed, 0.0)
    raise DimensionUnsupportedError(f"radial transform integral supports n in {{2, 3}}, got {n}")


def section_gaussian_area(cone: PolyhedralCone, v, t: float,
                          cfg: EstimatorConfig = DEFAULT_CONFIG) -> float:
    """Unnormalized Gaussian mass of the slice of the cone at support level t.

    The slice is cone intersected with {x : <x, v> = -t}; splitting
    |x|^2 = t^2 + |y|^2 in hyperplane coordinates gives
    exp(-t^2/2) * integral of exp(-|y|^2/2) over the slice polyhedron.
    """
    if not t > 0:
        raise NonPositiveRadiusError(f"section level t must be positive, got {t!r}")
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    n = cone.dim
    origin = -t * v
    basis = hyperplane_basis(v)
    G = cone.halfspaces @ basis.T
    rhs = -(cone.halfspaces @ origin)
    weight = math.exp(-0.5 * t * t)
    if n == 1:
        feasible = np.all(rhs >= -1e-12)
        return weight * (1.0 if feasible else 0.0)
    if n == 2:
        lo, hi, empty = interval_from_rows(G, rhs)
        if empty:
            return 0.0
        return weight * SQRT_TWO_PI * float(max(ndtr(hi) - ndtr(lo), 0.0))
    # d >= 2 frame integral via Monte Carlo
    def mask(batch):
        return np.all(batch @ G.T <= rhs, axis=1)

    values, _ = sampling.monte_carlo_fractions([mask], n - 1, cfg.n_samples, cfg.seed)
    return weight * (2.0 * math.pi) ** ((n - 1) / 2.0) * float(values[0])
