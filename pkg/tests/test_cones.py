import numpy as np
import pytest
from scipy.optimize import minimize

import gaussmink as gm
from gaussmink.cones import (
    hyperplane_basis,
    interval_from_rows,
    min_norm_point,
    polygon_vertices,
)

from conftest import random_shape_2d

RT2 = 2 ** -0.5


class TestMakeCone:
    def test_quarter_plane_halfspaces(self, quarter_plane):
        hs = quarter_plane.halfspaces
        want = {(-1.0, 0.0), (0.0, -1.0)}
        got = {tuple(np.round(row, 12)) for row in hs}
        assert got == want

    def test_orthant_3d(self):
        cone = gm.make_cone(np.eye(3))
        got = {tuple(np.round(row, 12)) for row in cone.halfspaces}
        assert got == {(-1.0, 0.0, 0.0), (0.0, -1.0, 0.0), (0.0, 0.0, -1.0)}

    def test_halfline_1d(self):
        cone = gm.make_cone([[1.0]])
        assert cone.dim == 1
        np.testing.assert_allclose(cone.halfspaces, [[-1.0]])
        np.testing.assert_allclose(cone.ref_dir, [1.0])

    def test_not_pointed(self):
        with pytest.raises(gm.NotPointedError):
            gm.make_cone([[1.0, 0.0], [-1.0, 0.0]])

    def test_halfplane_not_pointed(self):
        with pytest.raises(gm.NotPointedError):
            gm.make_cone([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])

    def test_not_full_dimensional(self):
        with pytest.raises(gm.NotFullDimensionalError):
            gm.make_cone([[1.0, 0.0], [0.5, 0.0]])

    def test_empty_generators(self):
        with pytest.raises(gm.EmptyInputError):
            gm.make_cone(np.zeros((0, 2)))

    def test_duplicate_generators_collapse(self):
        a = gm.make_cone([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        b = gm.make_cone([[1.0, 0.0], [0.0, 1.0]])
        assert a.generators.shape == b.generators.shape

    def test_generators_normalized(self):
        cone = gm.make_cone([[3.0, 0.0], [0.0, 0.25]])
        np.testing.assert_allclose(np.linalg.norm(cone.generators, axis=1), 1.0)

    def test_ref_dir_interior_both_sides(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            g = rng.normal(size=(3, 3))
            g = g / np.linalg.norm(g, axis=1, keepdims=True)
            g = 0.3 * g + np.array([1.0, 0.0, 0.0])  # narrow bundle, pointed
            try:
                cone = gm.make_cone(g)
            except gm.GaussMinkError:
                continue
            assert bool(cone.interior_contains(cone.ref_dir, tol=1e-9))
            assert cone.polar_margin(-cone.ref_dir) > 0


class TestPolar:
    def test_quarter_plane_polar_is_negative_quadrant(self, quarter_plane):
        polar = gm.polar_cone(quarter_plane)
        got = {tuple(np.round(row, 12)) for row in polar.generators}
        assert got == {(-1.0, 0.0), (0.0, -1.0)}

    def test_double_polar_membership_roundtrip(self):
        rng = np.random.default_rng(3)
        cone = gm.make_cone([[1.0, 0.2, 0.0], [0.1, 1.0, 0.3], [0.0, 0.2, 1.0]])
        back = gm.polar_cone(gm.polar_cone(cone))
        pts = rng.normal(size=(500, 3))
        np.testing.assert_array_equal(
            cone.contains(pts, tol=1e-9), back.contains(pts, tol=1e-9)
        )

    def test_polar_pairing_nonpositive(self, quarter_plane):
        rng = np.random.default_rng(5)
        lam = rng.uniform(0, 1, size=(50, 2))
        xs = lam @ quarter_plane.generators
        ys = rng.uniform(0, 1, size=(50, 2)) @ quarter_plane.polar_generators
        assert np.max(np.einsum("ij,ij->i", xs, ys)) <= 1e-12

    def test_angular_arc_quarter_plane(self, quarter_plane):
        lo, hi = quarter_plane.angular_arc()
        assert hi - lo == pytest.approx(np.pi / 2, abs=1e-12)


class TestValidateDirections:
    def test_margin_of_diagonal(self, quarter_plane):
        omega = gm.validate_directions(quarter_plane, [[-RT2, -RT2]])
        assert omega.margins[0] == pytest.approx(RT2, abs=1e-12)
        assert len(omega) == 1

    def test_boundary_direction_rejected(self, quarter_plane):
        with pytest.raises(gm.NotInteriorToPolarError) as exc:
            gm.validate_directions(quarter_plane, [[-1.0, 0.0], [0.0, -1.0]])
        assert exc.value.index == 0

    def test_margin_threshold_respected(self, quarter_plane):
        u = np.array([-np.cos(0.01), -np.sin(0.01)])
        gm.validate_directions(quarter_plane, [u], margin=1e-3)
        with pytest.raises(gm.NotInteriorToPolarError):
            gm.validate_directions(quarter_plane, [u], margin=0.1)

    def test_duplicates_rejected(self, quarter_plane):
        with pytest.raises(gm.DuplicateDirectionError) as exc:
            gm.validate_directions(quarter_plane, [[-RT2, -RT2], [-RT2, -RT2]])
        assert exc.value.indices == (0, 1)

    def test_near_unit_rows_renormalized(self, quarter_plane):
        omega = gm.validate_directions(quarter_plane, [[-RT2 * (1 + 1e-10), -RT2]])
        assert np.linalg.norm(omega.dirs[0]) == pytest.approx(1.0, abs=1e-15)

    def test_far_from_unit_rejected(self, quarter_plane):
        with pytest.raises(ValueError):
            gm.validate_directions(quarter_plane, [[-1.0, -1.0]])

    def test_dimension_mismatch(self, quarter_plane):
        with pytest.raises(ValueError):
            gm.validate_directions(quarter_plane, [[-1.0, 0.0, 0.0]])


class TestWulffShape:
    def test_diag_vertices(self, diag_instance):
        _, _, K = diag_instance
        verts = K.vertices()
        want = {(round(2 ** 0.5, 9), 0.0), (0.0, round(2 ** 0.5, 9))}
        got = {tuple(np.round(v, 9)) for v in verts}
        assert got == want

    def test_diag_facet_interval(self, diag_instance):
        _, _, K = diag_instance
        region = K.facets[0]
        assert not region.empty
        lo, hi = region.interval
        assert (lo, hi) == (pytest.approx(-1.0, abs=1e-12), pytest.approx(1.0, abs=1e-12))

    def test_diag_distance_to_origin(self, diag_instance):
        _, _, K = diag_instance
        assert K.distance_to_origin() == pytest.approx(1.0, abs=1e-12)

    def test_radial_value(self, diag_instance):
        _, _, K = diag_instance
        v = np.array([2.0, 1.0]) / np.sqrt(5.0)
        rho, idx = K.radial_function(v)
        assert rho == pytest.approx(np.sqrt(10.0) / 3.0, rel=1e-14)
        assert idx == 0

    def test_radial_tie_prefers_lowest_index(self, quarter_plane):
        dirs = [[-1e-3, -np.sqrt(1 - 1e-6)], [-np.sqrt(1 - 1e-6), -1e-3]]
        omega = gm.validate_directions(quarter_plane, dirs, margin=1e-4)
        K = gm.wulff_shape(quarter_plane, omega, [1.0, 1.0])
        # the diagonal sees both facets at exactly the same distance
        _, idx = K.radial_function([RT2, RT2])
        assert idx == 0

    def test_radial_rejects_outside_cone(self, diag_instance):
        _, _, K = diag_instance
        with pytest.raises(gm.DirectionNotInteriorToConeError):
            K.radial_function([-RT2, RT2])
        with pytest.raises(gm.DirectionNotInteriorToConeError):
            K.radial_function([1.0, 0.0])  # boundary ray never enters [h]

    def test_radial_point_on_boundary(self, diag_instance):
        _, _, K = diag_instance
        rng = np.random.default_rng(11)
        for _ in range(25):
            a = rng.uniform(0.05, np.pi / 2 - 0.05)
            v = np.array([np.cos(a), np.sin(a)])
            rho, idx = K.radial_function(v)
            x = rho * v
            assert bool(K.contains(x, tol=1e-9))
            # the active constraint is tight at the entry point
            assert x @ K.omega.dirs[idx] == pytest.approx(-K.h[idx], abs=1e-9)
            assert not bool(K.contains((1 - 1e-9) * x))

    def test_scaling_up_stays_inside(self, diag_instance):
        # defining property of a pseudo-cone: lambda K inside K for lambda >= 1
        _, _, K = diag_instance
        rng = np.random.default_rng(2)
        pts = rng.uniform(0, 4, size=(400, 2))
        inside = pts[np.asarray(K.contains(pts), dtype=bool)]
        lam = rng.uniform(1.0, 3.0, size=(inside.shape[0], 1))
        assert np.all(K.contains(lam * inside))

    def test_nonpositive_support_rejected(self, quarter_plane):
        omega = gm.validate_directions(quarter_plane, [[-RT2, -RT2]])
        with pytest.raises(gm.NonPositiveSupportError):
            gm.wulff_shape(quarter_plane, omega, [0.0])
        with pytest.raises(gm.NonPositiveSupportError):
            gm.wulff_shape(quarter_plane, omega, [-1.0])

    def test_dominated_constraint_gives_empty_facet(self, quarter_plane):
        # the deep cut at h=3 swallows the diagonal facet entirely
        dirs = [[-RT2, -RT2], [-np.cos(0.6), -np.sin(0.6)]]
        omega = gm.validate_directions(quarter_plane, dirs)
        K = gm.wulff_shape(quarter_plane, omega, [1.0, 3.0])
        assert K.facets[0].empty
        assert not K.facets[1].empty

    def test_interior_point_certificate(self, diag_instance):
        _, _, K = diag_instance
        x = K.interior_point()
        assert bool(K.contains(x))

    def test_support_values_match_for_tight_shape(self, diag_instance):
        _, _, K = diag_instance
        np.testing.assert_allclose(K.support_values(), K.h, atol=1e-9)

    def test_support_values_exceed_h_when_redundant(self, quarter_plane):
        dirs = [[-RT2, -RT2], [-np.cos(0.6), -np.sin(0.6)]]
        omega = gm.validate_directions(quarter_plane, dirs)
        K = gm.wulff_shape(quarter_plane, omega, [1.0, 0.2])
        hbar = K.support_values()
        assert hbar[0] == pytest.approx(1.0, abs=1e-9)
        assert hbar[1] > 0.2 + 1e-3
        # tightening onto the support values leaves the region unchanged
        L = K.with_support(hbar)
        rng = np.random.default_rng(4)
        pts = rng.uniform(-1, 4, size=(600, 2))
        np.testing.assert_array_equal(
            K.contains(pts, tol=1e-9), L.contains(pts, tol=1e-9)
        )

    def test_distance_matches_slsqp(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            K, _ = random_shape_2d(rng, m=3)
            res = minimize(
                lambda x: x @ x,
                K.interior_point(),
                constraints=[{"type": "ineq", "fun": lambda x: K.b - K.A @ x}],
                method="SLSQP",
                options={"maxiter": 200, "ftol": 1e-14},
            )
            assert K.distance_to_origin() == pytest.approx(
                np.linalg.norm(res.x), abs=1e-6
            )

    def test_length_mismatch(self, quarter_plane):
        omega = gm.validate_directions(quarter_plane, [[-RT2, -RT2]])
        with pytest.raises(ValueError):
            gm.wulff_shape(quarter_plane, omega, [1.0, 2.0])


class TestHelpers:
    def test_hyperplane_basis_orthonormal(self):
        rng = np.random.default_rng(1)
        for n in (2, 3, 4):
            for _ in range(10):
                u = rng.normal(size=n)
                u /= np.linalg.norm(u)
                B = hyperplane_basis(u)
                assert B.shape == (n - 1, n)
                np.testing.assert_allclose(B @ B.T, np.eye(n - 1), atol=1e-12)
                np.testing.assert_allclose(B @ u, 0.0, atol=1e-12)

    def test_interval_from_rows(self):
        A = np.array([[1.0], [-1.0], [2.0]])
        b = np.array([3.0, 1.0, 5.0])
        lo, hi, empty = interval_from_rows(A, b)
        assert (lo, hi, empty) == (-1.0, 2.5, False)
        _, _, empty = interval_from_rows(np.array([[1.0], [-1.0]]), np.array([-2.0, 1.0]))
        assert empty

    def test_min_norm_point_box(self):
        # shifted box [1,2] x [1,3]: closest point is (1,1)
        A = np.array([[1.0, 0], [-1, 0], [0, 1], [0, -1]])
        b = np.array([2.0, -1.0, 3.0, -1.0])
        x, d = min_norm_point(A, b)
        np.testing.assert_allclose(x, [1.0, 1.0], atol=1e-12)
        assert d == pytest.approx(np.sqrt(2.0), abs=1e-12)

    def test_min_norm_point_contains_origin(self):
        A = np.array([[1.0, 0.0], [0.0, 1.0]])
        b = np.array([1.0, 1.0])
        x, d = min_norm_point(A, b)
        assert d == 0.0

    def test_polygon_vertices_triangle(self):
        A = np.array([[-1.0, 0], [0, -1], [1, 1]])
        b = np.array([0.0, 0.0, 1.0])
        verts = polygon_vertices(A, b)
        got = {tuple(np.round(v, 12)) for v in verts}
        assert got == {(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)}
