"""Pointed polyhedral cones, admissible direction sets, and Wulff shapes.

A cone is held in dual representation: unit generators (extreme rays plus
possibly redundant rays the caller supplied) and unit outward facet normals,
so that membership on either side is a dot product.  The facet normals of C
generate the polar cone and vice versa, which is what makes the polar
computation a convex hull problem: the hull of the origin together with the
unit generators has exactly the cone's facets among its origin-incident
facets.

A Wulff shape here is the unbounded convex region cut from a cone by support
halfspaces C \\cap {x : <x, u_i> <= -h_i} with every u_i strictly interior to
the polar cone and every h_i > 0.  Facet geometry is cached eagerly: each
facet is stored as a polyhedron in orthonormal coordinates of the cutting
hyperplane, which is what the Gaussian area computations integrate over.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import linprog, nnls
from scipy.spatial import ConvexHull, QhullError

from .errors import (
    DirectionNotInteriorToConeError,
    DuplicateDirectionError,
    EmptyInputError,
    NonPositiveSupportError,
    NotFullDimensionalError,
    NotInteriorToPolarError,
    NotPointedError,
)
from .validation import as_float_matrix, as_float_vector, check_lengths_match, check_unit_rows

MEMBERSHIP_TOL = 1e-12
DEFAULT_INTERIOR_MARGIN = 1e-6
# two directions closer than ~1.4e-6 radians are treated as duplicates
_DUPLICATE_DOT = 1.0 - 1e-12
_HULL_OFFSET_TOL = 1e-9
_LP_BOUNDS = (None, None)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


@dataclass(frozen=True)
class PolyhedralCone:
    """Pointed, full-dimensional polyhedral cone in dual representation."""

    dim: int
    generators: np.ndarray  # (r, n) unit rows, cone = nonnegative span
    halfspaces: np.ndarray  # (k, n) unit outward normals, <x, a> <= 0 inside
    ref_dir: np.ndarray  # unit vector interior to C and to -polar(C)

    @property
    def polar_generators(self) -> np.ndarray:
        return self.halfspaces

    def contains(self, x, tol: float = MEMBERSHIP_TOL):
        x = np.asarray(x, dtype=float)
        prods = x @ self.halfspaces.T
        return np.all(prods <= tol, axis=-1)

    def interior_contains(self, x, tol: float = MEMBERSHIP_TOL):
        x = np.asarray(x, dtype=float)
        prods = x @ self.halfspaces.T
        return np.all(prods < -tol, axis=-1)

    def polar_contains(self, x, tol: float = MEMBERSHIP_TOL):
        x = np.asarray(x, dtype=float)
        prods = x @ self.generators.T
        return np.all(prods <= tol, axis=-1)

    def polar_margin(self, u: np.ndarray) -> float:
        """Interiority margin of u against the polar cone.

        This is min_j -<u, g_j> over unit generators g_j; positive exactly
        when u points into the open polar cone.
        """
        return float(np.min(-self.generators @ u))

    def angular_arc(self) -> tuple[float, float]:
        """Angle interval (lo, hi) of the cone for dim 2, width < pi."""
        if self.dim != 2:
            raise ValueError("angular_arc is only defined for 2-d cones")
        ref_angle = float(np.arctan2(self.ref_dir[1], self.ref_dir[0]))
        rel = np.arctan2(
            self.generators @ np.array([-self.ref_dir[1], self.ref_dir[0]]),
            self.generators @ self.ref_dir,
        )
        return ref_angle + float(np.min(rel)), ref_angle + float(np.max(rel))


def _check_pointed(gens: np.ndarray) -> None:
    """Pointedness via LP: generators fit in an open halfspace iff the
    max-margin direction problem has strictly positive value."""
    r, n = gens.shape
    c = np.zeros(n + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-gens, np.ones((r, 1))])
    bounds = [(-1.0, 1.0)] * n + [(None, 1.0)]
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(r), bounds=bounds, method="highs")
    if res.status != 0 or -res.fun <= 1e-9:
        raise NotPointedError("generators do not fit in an open halfspace, cone is not pointed")


def _dual_normals(gens: np.ndarray) -> np.ndarray:
    """Unit outward facet normals of cone(gens) via the origin-augmented hull."""
    n = gens.shape[1]
    if n == 1:
        return -gens[:1].copy()
    pts = np.vstack([np.zeros(n), gens])
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:  # pragma: no cover - guarded by rank/pointedness checks
        raise NotFullDimensionalError(f"convex hull of generators failed: {exc}") from exc
    eqs = hull.equations
    through_origin = np.abs(eqs[:, -1]) <= _HULL_OFFSET_TOL
    normals = eqs[through_origin, :-1]
    if normals.shape[0] < n:
        raise NotPointedError("cone has fewer facets than dimensions, not pointed")
    normals = normals / np.linalg.norm(normals, axis=1, keepdims=True)
    keep: list[np.ndarray] = []
    for row in normals:
        if not any(row @ kept > _DUPLICATE_DOT for kept in keep):
            keep.append(row)
    normals = np.array(keep)
    slack = normals @ gens.T
    if np.max(slack) > 1e-8:
        raise NotFullDimensionalError("dual normal computation failed consistency check")
    return normals


def _reference_direction(gens: np.ndarray, normals: np.ndarray) -> np.ndarray:
    """Unit vector strictly interior to the cone and to minus its polar.

    The normalized mean of the unit generators is used when it passes both
    strict interiority checks; skewed cones fall back to the max-margin LP
    direction, which is deterministic as well.
    """
    v = _unit(gens.mean(axis=0))
    if np.min(gens @ v) > 1e-9 and np.max(normals @ v) < -1e-9:
        return v
    r, n = gens.shape
    k = normals.shape[0]
    c = np.zeros(n + 1)
    c[-1] = -1.0
    a_ub = np.vstack([
        np.hstack([-gens, np.ones((r, 1))]),
        np.hstack([normals, np.ones((k, 1))]),
    ])
    bounds = [(-1.0, 1.0)] * n + [(None, 1.0)]
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(r + k), bounds=bounds, method="highs")
    if res.status != 0 or -res.fun <= 1e-9:
        raise NotPointedError("no direction is interior to both the cone and minus its polar")
    return _unit(res.x[:n])


def _cross_validate(cone: PolyhedralCone, n_rays: int = 32) -> None:
    # spot-check that the two representations describe the same cone
    rng = np.random.default_rng(12345)
    r, n = cone.generators.shape
    lam = rng.uniform(0.1, 1.0, size=(n_rays, r))
    rays = lam @ cone.generators
    if not np.all(cone.contains(rays, tol=1e-9)):
        raise NotFullDimensionalError("generator rays violate computed halfspaces")
    probes = rng.standard_normal((4 * n_rays, n))
    probes /= np.linalg.norm(probes, axis=1, keepdims=True)
    inside = probes[np.asarray(cone.contains(probes, tol=-1e-9)).reshape(-1)]
    for y in inside:
        _, resid = nnls(cone.generators.T, y)
        if resid > 1e-7:
            raise NotFullDimensionalError(
                "halfspace membership without a conic generator decomposition"
            )


def make_cone(generators, check: bool = True) -> PolyhedralCone:
    """Build a pointed full-dimensional cone from generator rays.

    Raises EmptyInputError, NotFullDimensionalError or NotPointedError when
    the input does not define such a cone.
    """
    gens = as_float_matrix(generators, "generators")
    norms = np.linalg.norm(gens, axis=1)
    if np.any(norms <= 0):
        raise ValueError("generators must be nonzero vectors")
    gens = gens / norms[:, None]
    keep: list[np.ndarray] = []
    for row in gens:
        if not any(row @ kept > _DUPLICATE_DOT for kept in keep):
            keep.append(row)
    gens = np.array(keep)
    n = gens.shape[1]
    # pointedness first: an antipodal pair is a line, not a thin cone
    _check_pointed(gens)
    if np.linalg.matrix_rank(gens, tol=1e-10) < n:
        raise NotFullDimensionalError(
            f"generators span rank {np.linalg.matrix_rank(gens, tol=1e-10)} < dimension {n}"
        )
    normals = _dual_normals(gens)
    ref = _reference_direction(gens, normals)
    cone = PolyhedralCone(dim=n, generators=gens, halfspaces=normals, ref_dir=ref)
    if check and n > 1:
        _cross_validate(cone)
    return cone


def polar_cone(cone: PolyhedralCone) -> PolyhedralCone:
    """The polar cone, generated by the facet normals of the input."""
    return make_cone(cone.halfspaces, check=False)


@dataclass(frozen=True)
class DirectionSet:
    """Unit directions strictly interior to a cone's polar, with margins."""

    dirs: np.ndarray  # (m, n)
    margins: np.ndarray  # (m,) interiority margins against the polar
    required_margin: float

    def __len__(self) -> int:
        return self.dirs.shape[0]


def validate_directions(
    cone: PolyhedralCone, dirs, margin: float = DEFAULT_INTERIOR_MARGIN
) -> DirectionSet:
    """Admit unit directions for support constraints.

    Every direction must sit at least `margin` inside the polar cone
    (measured as min_j -<u, g_j> over unit generators) and no two directions
    may coincide within angular tolerance.
    """
    mat = as_float_matrix(dirs, "directions")
    if mat.shape[1] != cone.dim:
        raise ValueError(f"directions have dimension {mat.shape[1]}, cone has {cone.dim}")
    mat = check_unit_rows(mat, "directions")
    m = mat.shape[0]
    for i, j in itertools.combinations(range(m), 2):
        if mat[i] @ mat[j] > _DUPLICATE_DOT:
            raise DuplicateDirectionError(i, j)
    margins = np.array([cone.polar_margin(u) for u in mat])
    bad = np.flatnonzero(margins < margin)
    if bad.size:
        i = int(bad[0])
        raise NotInteriorToPolarError(i, margins[i], margin)
    return DirectionSet(dirs=mat, margins=margins, required_margin=margin)


@dataclass(frozen=True)
class FacetRegion:
    """One facet of a Wulff shape, in orthonormal hyperplane coordinates.

    Points of the facet are origin + y @ basis with A y <= b.  For ambient
    dimension 2 the polyhedron is the interval [lo, hi]; for dimension 1 it
    is a single point and A has zero columns.
    """

    dim: int  # d = ambient dimension - 1
    origin: np.ndarray
    basis: np.ndarray  # (d, n) orthonormal rows spanning the hyperplane
    A: np.ndarray  # (k, d)
    b: np.ndarray  # (k,)
    empty: bool
    bounded: bool
    interval: tuple[float, float] | None = None

    def embed(self, y: np.ndarray) -> np.ndarray:
        return self.origin + np.atleast_2d(y) @ self.basis


def hyperplane_basis(u: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of the hyperplane orthogonal to unit u."""
    n = u.shape[0]
    if n == 1:
        return np.zeros((0, 1))
    if n == 2:
        return np.array([[-u[1], u[0]]])
    drop = int(np.argmax(np.abs(u)))
    rows = []
    for j in range(n):
        if j == drop:
            continue
        v = np.zeros(n)
        v[j] = 1.0
        v = v - (v @ u) * u
        for w in rows:
            v = v - (v @ w) * w
        rows.append(_unit(v))
    return np.array(rows)


def interval_from_rows(A: np.ndarray, b: np.ndarray) -> tuple[float, float, bool]:
    """Feasible interval of 1-d constraints a*y <= b; returns (lo, hi, empty)."""
    lo, hi = -np.inf, np.inf
    empty = False
    for a, beta in zip(A[:, 0], b):
        if abs(a) <= 1e-13:
            if beta < -MEMBERSHIP_TOL:
                empty = True
        elif a > 0:
            hi = min(hi, beta / a)
        else:
            lo = max(lo, beta / a)
    if lo > hi + MEMBERSHIP_TOL:
        empty = True
    return lo, hi, empty


def _region_feasible_lp(A: np.ndarray, b: np.ndarray) -> bool:
    res = linprog(
        np.zeros(A.shape[1]), A_ub=A, b_ub=b + 1e-12,
        bounds=[_LP_BOUNDS] * A.shape[1], method="highs",
    )
    return res.status == 0


def _region_bounded_lp(A: np.ndarray, b: np.ndarray) -> bool:
    d = A.shape[1]
    for j in range(d):
        for sign in (1.0, -1.0):
            c = np.zeros(d)
            c[j] = -sign
            res = linprog(c, A_ub=A, b_ub=b, bounds=[_LP_BOUNDS] * d, method="highs")
            if res.status == 3:
                return False
    return True


def _build_facet(A_all: np.ndarray, b_all: np.ndarray, row: int, u: np.ndarray, h: float) -> FacetRegion:
    n = u.shape[0]
    origin = -h * u
    basis = hyperplane_basis(u)
    others = [r for r in range(A_all.shape[0]) if r != row]
    G = A_all[others] @ basis.T  # (k, n-1)
    rhs = b_all[others] - A_all[others] @ origin
    d = n - 1
    if d == 0:
        empty = bool(np.any(rhs < -MEMBERSHIP_TOL))
        return FacetRegion(0, origin, basis, G, rhs, empty, True)
    if d == 1:
        lo, hi, empty = interval_from_rows(G, rhs)
        return FacetRegion(1, origin, basis, G, rhs, empty, np.isfinite(lo) and np.isfinite(hi),
                           interval=(lo, hi))
    empty = not _region_feasible_lp(G, rhs)
    bounded = True if empty else _region_bounded_lp(G, rhs)
    return FacetRegion(d, origin, basis, G, rhs, empty, bounded)


@dataclass(frozen=True)
class PseudoCone:
    """Wulff shape over a cone: the region A x <= b with cached facets."""

    cone: PolyhedralCone
    omega: DirectionSet
    h: np.ndarray  # (m,) positive support values
    A: np.ndarray  # cone halfspaces stacked over directions
    b: np.ndarray
    facets: tuple[FacetRegion, ...]

    @property
    def dim(self) -> int:
        return self.cone.dim

    def contains(self, x, tol: float = MEMBERSHIP_TOL):
        x = np.asarray(x, dtype=float)
        return np.all(x @ self.A.T <= self.b + tol, axis=-1)

    def radial_function(self, v) -> tuple[float, int]:
        """Entry distance rho of the ray through unit v, and the active facet.

        The ray meets the boundary on facet argmax_i h_i / -<v, u_i>; ties
        resolve to the lowest index.  Directions outside the open cone are
        rejected.
        """
        v = as_float_vector(v, "direction")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"radial direction must be a unit vector, norm={norm:.12g}")
        v = v / norm
        if np.max(self.cone.halfspaces @ v) >= -MEMBERSHIP_TOL:
            raise DirectionNotInteriorToConeError(
                "radial direction must lie strictly inside the cone"
            )
        denom = -(self.omega.dirs @ v)
        vals = self.h / denom
        idx = int(np.argmax(vals))
        return float(vals[idx]), idx

    def with_support(self, h_new) -> "PseudoCone":
        return wulff_shape(self.cone, self.omega, h_new)

    def interior_point(self) -> np.ndarray:
        """A point strictly inside, certifying nonemptiness: a far translate
        along the cone's reference direction."""
        v = self.cone.ref_dir
        t = 1.0 + 2.0 * float(np.max(self.h / (-(self.omega.dirs @ v))))
        x = t * v
        assert bool(self.contains(x))
        return x

    def support_values(self) -> np.ndarray:
        """Absolute support values of the region itself, one LP per direction.

        For a redundant direction this exceeds h_i; replacing h by these
        values tightens every constraint onto the region without changing it.
        """
        out = np.empty(len(self.omega))
        for i, u in enumerate(self.omega.dirs):
            res = linprog(-u, A_ub=self.A, b_ub=self.b,
                          bounds=[_LP_BOUNDS] * self.dim, method="highs")
            if res.status != 0:
                raise RuntimeError(f"support LP failed with status {res.status}")
            out[i] = res.fun  # min of -<u, x> equals the absolute support value
        return out

    def distance_to_origin(self) -> float:
        return min_norm_point(self.A, self.b)[1]

    def vertices(self) -> np.ndarray:
        if self.dim != 2:
            raise ValueError("vertex enumeration implemented for dimension 2 only")
        return polygon_vertices(self.A, self.b)


def wulff_shape(cone: PolyhedralCone, omega: DirectionSet, h) -> PseudoCone:
    """Cut the Wulff shape [h] out of the cone and cache its facet geometry."""
    h = as_float_vector(h, "support values")
    check_lengths_match(h, omega.dirs, "support values", "directions")
    for i, hi in enumerate(h):
        if not hi > 0:
            raise NonPositiveSupportError(i, float(hi))
    A = np.vstack([cone.halfspaces, omega.dirs])
    b = np.concatenate([np.zeros(cone.halfspaces.shape[0]), -h])
    k = cone.halfspaces.shape[0]
    facets = tuple(
        _build_facet(A, b, k + i, omega.dirs[i], float(h[i])) for i in range(len(omega))
    )
    K = PseudoCone(cone=cone, omega=omega, h=h.copy(), A=A, b=b, facets=facets)
    K.interior_point()  # certifies nonemptiness at construction
    return K


def min_norm_point(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    """Closest point of {x : A x <= b} to the origin, by active-set enumeration.

    Suitable for the handful of constraints that arise here; every KKT
    candidate with at most n active rows is checked explicitly.
    """
    k, n = A.shape
    if np.all(b >= 0):
        return np.zeros(n), 0.0
    best_x, best_norm = None, np.inf
    for size in range(1, min(n, k) + 1):
        for S in itertools.combinations(range(k), size):
            A_s = A[list(S)]
            M = A_s @ A_s.T
            try:
                nu = np.linalg.solve(M, -b[list(S)])
            except np.linalg.LinAlgError:
                continue
            if np.any(nu < -1e-10):
                continue
            x = -A_s.T @ nu
            if np.all(A @ x <= b + 1e-9):
                norm = float(np.linalg.norm(x))
                if norm < best_norm:
                    best_x, best_norm = x, norm
    if best_x is None:
        raise RuntimeError("min-norm enumeration found no feasible KKT point")
    return best_x, best_norm


def polygon_vertices(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vertices of a 2-d polyhedron A x <= b (which may be unbounded)."""
    if A.shape[1] != 2:
        raise ValueError("polygon_vertices expects 2-d constraints")
    verts: list[np.ndarray] = []
    k = A.shape[0]
    for i, j in itertools.combinations(range(k), 2):
        M = A[[i, j]]
        if abs(np.linalg.det(M)) <= 1e-12:
            continue
        x = np.linalg.solve(M, b[[i, j]])
        if np.all(A @ x <= b + 1e-9):
            if not any(np.linalg.norm(x - v) <= 1e-9 for v in verts):
                verts.append(x)
    return np.array(verts) if verts else np.zeros((0, 2))
