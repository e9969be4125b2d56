"""Uniqueness and non-uniqueness experiments for the inverse problem.

For a single support direction v the reweighted facet measure of the shape
cut at level t is, up to the dimensional normalizing constant, the profile

    profile(t) = t^(1-p) * section_gaussian_area(cone, v, t).

The profile vanishes at t -> 0 (like t^(n-p)) and at t -> infinity, so for
p < n every level strictly below the peak is hit at least twice; the two
preimages give distinct shapes with identical facet measure but different
Gaussian volumes.  For p in (0, 1] two inequality families certify the
opposite: solutions with equal measure and equal volume must coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cones import DirectionSet, PolyhedralCone, PseudoCone, wulff_shape
from .errors import NotInteriorToPolarError, PeakNotBracketedError, PGreaterEqualNError
from .gaussian import (
    DEFAULT_CONFIG,
    EstimatorConfig,
    MeasureEstimate,
    combined_budget,
    gaussian_volume,
    truncation_radius,
)
from .surface import section_gaussian_area, sp_measure, sp_measure_vector

PROFILE_T_LO = 1e-4
COARSE_SCAN_POINTS = 64
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def build_section_pseudocone(cone: PolyhedralCone, v, t: float) -> PseudoCone:
    """Wulff shape of the single direction v at support level t > 0."""
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    margin = cone.polar_margin(v)
    if margin <= 0:
        raise NotInteriorToPolarError(0, margin, 0.0)
    omega = DirectionSet(dirs=v.reshape(1, -1), margins=np.array([margin]),
                         required_margin=min(margin, 1e-6))
    return wulff_shape(cone, omega, [t])


def sp_profile(cone: PolyhedralCone, v, p: float, t: float,
               cfg: EstimatorConfig = DEFAULT_CONFIG) -> float:
    """t^(1-p) times the section mass; proportional to the facet measure of
    the level-t single-direction shape."""
    if p >= cone.dim:
        raise PGreaterEqualNError(p, cone.dim)
    return t ** (1.0 - p) * section_gaussian_area(cone, v, t, cfg)


@dataclass(frozen=True)
class NonUniquePair:
    t1: float
    t2: float
    t_peak: float
    psi_level: float
    K: PseudoCone
    L: PseudoCone
    sp_K: MeasureEstimate
    sp_L: MeasureEstimate
    multimodal_scan: bool


def _golden_max(f, a: float, b: float, tol: float = 1e-12) -> float:
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while (b - a) > tol * max(1.0, abs(a) + abs(b)):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
    return 0.5 * (a + b)


def _bisect_level(f, lo: float, hi: float, level: float, increasing: bool,
                  tol: float = 1e-13) -> float:
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol * max(1.0, hi):
            return mid
        high_side = f(mid) >= level
        if high_side == increasing:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def find_nonunique_pair(cone: PolyhedralCone, v, p: float, theta: float = 0.5,
                        cfg: EstimatorConfig = DEFAULT_CONFIG) -> NonUniquePair:
    """Two support levels whose single-direction shapes share their facet
    measure at exponent p < n but have different Gaussian volume.

    A 64-point coarse scan of the profile seeds a golden-section refinement
    of the peak; theta in (0, 1) picks the common level as a fraction of the
    peak value, and bisection finds the two preimages.
    """
    n = cone.dim
    if p >= n:
        raise PGreaterEqualNError(p, n)
    if not 0.0 < theta < 1.0:
        raise ValueError(f"level fraction theta must lie in (0, 1), got {theta}")
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)

    def f(t: float) -> float:
        return sp_profile(cone, v, p, t, cfg)

    t_lo = PROFILE_T_LO
    t_hi = truncation_radius(1e-12, n)
    for attempt in range(2):
        ts = np.linspace(t_lo, t_hi, COARSE_SCAN_POINTS)
        vals = np.array([f(t) for t in ts])
        k = int(np.argmax(vals))
        if 0 < k < COARSE_SCAN_POINTS - 1:
            break
        if attempt == 1:
            raise PeakNotBracketedError(
                f"profile maximum sits on the scan boundary (index {k})"
            )
        # enlarge the bracket once and retry
        t_hi *= 2.0
        t_lo *= 0.5

    interior = vals[1:-1]
    local_max = np.flatnonzero(
        (interior > vals[:-2]) & (interior > vals[2:])
    )
    multimodal = local_max.size > 1

    t_peak = _golden_max(f, ts[k - 1], ts[k + 1])
    peak_val = f(t_peak)
    level = theta * peak_val

    lo1 = t_lo
    while f(lo1) >= level:
        lo1 *= 0.5
        if lo1 < 1e-300:
            raise PeakNotBracketedError("profile does not drop below the level near 0")
    hi2 = t_hi
    while f(hi2) >= level:
        hi2 *= 2.0
        if hi2 > 1e6:
            raise PeakNotBracketedError("profile does not drop below the level at infinity")
    t1 = _bisect_level(f, lo1, t_peak, level, increasing=True)
    t2 = _bisect_level(f, t_peak, hi2, level, increasing=False)

    K = build_section_pseudocone(cone, v, t1)
    L = build_section_pseudocone(cone, v, t2)
    return NonUniquePair(
        t1=t1, t2=t2, t_peak=t_peak, psi_level=level, K=K, L=L,
        sp_K=sp_measure(K, 0, p, cfg), sp_L=sp_measure(L, 0, p, cfg),
        multimodal_scan=bool(multimodal),
    )


@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float
    budget: float
    holds: bool


def _require_same_instance(K: PseudoCone, L: PseudoCone) -> None:
    same = (K.cone is L.cone or np.allclose(K.cone.generators, L.cone.generators)) and \
        K.omega.dirs.shape == L.omega.dirs.shape and np.allclose(K.omega.dirs, L.omega.dirs)
    if not same:
        raise ValueError("both shapes must share one cone and direction set")


def mixed_volume_inequality_check(K: PseudoCone, L: PseudoCone, p: float,
                                  cfg: EstimatorConfig = DEFAULT_CONFIG) -> InequalityCheck:
    """Check the mixed-measure inequality between two shapes for p in (0, 1]:

        (1 / (p vol(K))) sum_i (h_K,i^p - h_L,i^p) S_{p,i}(K)
            >= log(vol(L) / vol(K)),

    with equality exactly at K = L.  holds allows the certified error budget.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"inequality requires p in (0, 1], got {p}")
    _require_same_instance(K, L)
    vol_K = gaussian_volume(K, cfg)
    vol_L = gaussian_volume(L, cfg)
    spv = sp_measure_vector(K, p, cfg)
    diff = K.h ** p - L.h ** p
    lhs = float(np.sum(diff * spv.values)) / (p * vol_K.value)
    rhs = math.log(vol_L.value / vol_K.value)
    sp_budget = float(np.sum(np.abs(diff) * (3.0 * spv.std_errors + spv.error_bounds)))
    budget = (
        sp_budget / (p * vol_K.value)
        + abs(lhs) * combined_budget([vol_K]) / vol_K.value
        + combined_budget([vol_K]) / vol_K.value
        + combined_budget([vol_L]) / vol_L.value
    )
    return InequalityCheck(lhs=lhs, rhs=rhs, budget=budget, holds=lhs >= rhs - budget)


def log_concavity_chain_check(K: PseudoCone, L: PseudoCone, p: float, t: float,
                              cfg: EstimatorConfig = DEFAULT_CONFIG) -> InequalityCheck:
    """Check log-concavity of the volume along the p-power interpolation:

        log vol([((1-t) h_K^p + t h_L^p)^(1/p)])
            >= (1-t) log vol(K) + t log vol(L)      for p in (0, 1].
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"log-concavity chain requires p in (0, 1], got {p}")
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"interpolation parameter must lie in [0, 1], got {t}")
    _require_same_instance(K, L)
    h_mix = ((1.0 - t) * K.h ** p + t * L.h ** p) ** (1.0 / p)
    M = K.with_support(h_mix)
    vol_M = gaussian_volume(M, cfg)
    vol_K = gaussian_volume(K, cfg)
    vol_L = gaussian_volume(L, cfg)
    lhs = math.log(vol_M.value)
    rhs = (1.0 - t) * math.log(vol_K.value) + t * math.log(vol_L.value)
    budget = (
        combined_budget([vol_M]) / vol_M.value
        + (1.0 - t) * combined_budget([vol_K]) / vol_K.value
        + t * combined_budget([vol_L]) / vol_L.value
    )
    return InequalityCheck(lhs=lhs, rhs=rhs, budget=budget, holds=lhs >= rhs - budget)


@dataclass(frozen=True)
class UniquenessReport:
    measure_distance: float
    measure_budget: float
    volume_difference: float
    volume_budget: float
    support_distance: float
    verdict: str  # "CONSISTENT" or "THEOREM_VIOLATION"


def uniqueness_check(K: PseudoCone, L: PseudoCone, p: float,
                     cfg: EstimatorConfig = DEFAULT_CONFIG,
                     support_tol: float = 1e-6) -> UniquenessReport:
    """Empirical probe of the uniqueness statement for p in (0, 1].

    Equal facet measures and equal volumes within budget force equal
    supports; a pair passing both equality gates while the supports differ
    beyond support_tol is flagged THEOREM_VIOLATION.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"uniqueness statement covers p in (0, 1], got {p}")
    _require_same_instance(K, L)
    sp_K = sp_measure_vector(K, p, cfg)
    sp_L = sp_measure_vector(L, p, cfg)
    measure_distance = float(np.sum(np.abs(sp_K.values - sp_L.values)))
    measure_budget = float(np.sum(
        3.0 * np.hypot(sp_K.std_errors, sp_L.std_errors)
        + sp_K.error_bounds + sp_L.error_bounds
    )) + 1e-12
    vol_K = gaussian_volume(K, cfg)
    vol_L = gaussian_volume(L, cfg)
    volume_difference = abs(vol_K.value - vol_L.value)
    volume_budget = combined_budget([vol_K, vol_L]) + 1e-12
    support_distance = float(np.max(np.abs(K.h - L.h)))
    suspicious = (
        measure_distance <= measure_budget
        and volume_difference <= volume_budget
        and support_distance > support_tol
    )
    return UniquenessReport(
        measure_distance=measure_distance,
        measure_budget=measure_budget,
        volume_difference=volume_difference,
        volume_budget=volume_budget,
        support_distance=support_distance,
        verdict="THEOREM_VIOLATION" if suspicious else "CONSISTENT",
    )
