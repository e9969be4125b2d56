"""Shared fixtures and independent oracles.

The oracle functions here deliberately avoid the library's own integration
code paths: 2-d volumes come from the polar-coordinate formula
(1/2pi) integral of exp(-rho(theta)^2 / 2) over the cone arc, facet areas
from direct arclength quadrature, both driven by scipy.integrate.quad.
"""

import numpy as np
import pytest
from scipy.integrate import quad

import gaussmink as gm
from gaussmink.surface import facet_activity_arcs


@pytest.fixture
def quarter_plane():
    return gm.make_cone([[1.0, 0.0], [0.0, 1.0]])


@pytest.fixture
def diag_instance(quarter_plane):
    """Quarter plane cut by the diagonal direction at support 1."""
    omega = gm.validate_directions(
        quarter_plane, [[-2 ** -0.5, -2 ** -0.5]]
    )
    K = gm.wulff_shape(quarter_plane, omega, [1.0])
    return quarter_plane, omega, K


@pytest.fixture
def line_cone():
    return gm.make_cone([[1.0]])


def random_cone_2d(rng, opening=(0.6, 2.4)):
    beta = rng.uniform(*opening)
    center = rng.uniform(0.0, 2.0 * np.pi)
    angles = [center - beta / 2.0, center + beta / 2.0]
    gens = np.array([[np.cos(a), np.sin(a)] for a in angles])
    return gm.make_cone(gens), center, beta


def random_instance_2d(rng, m, opening=(0.6, 2.4), min_gap=0.03, margin=1e-4):
    """Random 2-d cone with m admissible directions and O(1) weights."""
    cone, center, beta = random_cone_2d(rng, opening)
    lo = center + np.pi / 2.0 + beta / 2.0
    hi = center + 3.0 * np.pi / 2.0 - beta / 2.0
    pad = 0.08 * (hi - lo)
    for _ in range(200):
        angles = np.sort(rng.uniform(lo + pad, hi - pad, size=m))
        if m == 1 or np.min(np.diff(angles)) >= min_gap:
            break
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    omega = gm.validate_directions(cone, dirs, margin=margin)
    weights = rng.uniform(0.5, 2.0, size=m)
    return cone, omega, weights


def random_shape_2d(rng, m, h_range=(0.3, 2.0), **kw):
    cone, omega, weights = random_instance_2d(rng, m, **kw)
    h = rng.uniform(*h_range, size=m)
    return gm.wulff_shape(cone, omega, h), weights


def oracle_volume_2d(K, tol=1e-11):
    """Gaussian area via polar coordinates around the origin."""
    arcs = facet_activity_arcs(K)

    def weight(theta, lo_idx):
        v = np.array([np.cos(theta), np.sin(theta)])
        dots = K.omega.dirs @ v
        mask = dots < -1e-300
        rho = np.max(K.h[mask] / (-dots[mask]))
        return np.exp(-0.5 * rho * rho)

    total = 0.0
    for a, b, idx in arcs:
        val, _ = quad(weight, a, b, args=(idx,), epsabs=tol, epsrel=1e-12, limit=200)
        total += val
    return total / (2.0 * np.pi)


def oracle_cone_volume_2d(cone):
    lo, hi = cone.angular_arc()
    return (hi - lo) / (2.0 * np.pi)


def oracle_facet_area_2d(K, i, tol=1e-12):
    """Facet Gaussian area by direct arclength quadrature along the segment."""
    region = K.facets[i]
    if region.empty:
        return 0.0
    lo, hi = region.interval
    h = float(K.h[i])

    def density(s):
        return np.exp(-0.5 * (h * h + s * s)) / (2.0 * np.pi)

    val, _ = quad(density, lo, hi, epsabs=tol, epsrel=1e-13)
    return val


def bisect_root(f, lo, hi, tol=1e-12):
    flo = f(lo)
    assert flo * f(hi) < 0, "root not bracketed"
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo < tol:
            return mid
        if f(mid) * flo <= 0:
            hi = mid
        else:
            lo = mid
            flo = f(lo)
    return 0.5 * (lo + hi)
