import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curlflux import geometry as geo
from curlflux.quadrature import gauss_legendre


def test_disk_area_and_moment():
    disk = geo.disk_patch((0, 0, 0), 1.0)
    assert abs(disk.area() - np.pi) < 1e-10
    assert abs(disk.integrate(lambda p: p[:, 0] ** 2) - np.pi / 4) < 1e-12


def test_sphere_area_order16():
    sph = geo.sphere_patch((0, 0, 0), 1.0, order=16)
    assert abs(sph.area() - 4 * np.pi) < 1e-8


def test_unit_circle_integrals(unit_disk_manifold):
    curve = unit_disk_manifold.boundary
    assert abs(curve.length() - 2 * np.pi) < 1e-12
    # int cos^2 over the circle
    val = geo.line_integral(curve, lambda p: p[:, 0] ** 2)
    assert abs(val - np.pi) < 1e-12


def test_degenerate_curve_integral():
    assert geo.line_integral(geo.empty_curve(), lambda p: np.ones(len(p))) == 0.0


@settings(max_examples=20, deadline=None, derandomize=True)
@given(st.integers(0, 6), st.integers(0, 6))
def test_disk_polynomial_exactness(i, j):
    # polar GL x trapezoid integrates x^i y^j exactly on the unit disk
    disk = geo.disk_patch((0, 0, 0), 1.0, order=12, n_angular=32)
    val = disk.integrate(lambda p: p[:, 0] ** i * p[:, 1] ** j)
    if i % 2 == 1 or j % 2 == 1:
        exact = 0.0
    else:
        from math import gamma
        # radial moment 1/(i+j+2) times the angular beta integral
        exact = 2.0 * gamma((i + 1) / 2) * gamma((j + 1) / 2) / gamma((i + j) / 2 + 1) / (i + j + 2)
    assert abs(val - exact) < 1e-12


def test_surface_rule_convergence_order():
    # non-polynomial smooth integrand: error collapses fast with order
    exact_ref = geo.disk_patch((0, 0, 0), 1.0, order=64).integrate(
        lambda p: np.exp(p[:, 0] + 0.5 * p[:, 1]))
    errs = []
    for order in (4, 8, 16):
        val = geo.disk_patch((0, 0, 0), 1.0, order=order).integrate(
            lambda p: np.exp(p[:, 0] + 0.5 * p[:, 1]))
        errs.append(abs(val - exact_ref))
    assert errs[1] < errs[0] / 10
    assert errs[2] < errs[1] / 10 or errs[2] < 1e-14


def test_nonfinite_integrand_rejected():
    disk = geo.disk_patch((0, 0, 0), 1.0)
    with pytest.raises(geo.GeometryError):
        geo.surface_integral(disk, lambda p: 1.0 / (p[:, 0] - p[:, 0]))


# ---------------------------------------------------------------------------
# orientation conventions
# ---------------------------------------------------------------------------


def test_tangent_convention(unit_disk_manifold):
    s = np.array([0.0, np.pi / 3, 1.7])
    nu = unit_disk_manifold.boundary_normal(s)
    con = unit_disk_manifold.conormal(s)
    tau = unit_disk_manifold.tangent(s)
    assert np.abs(np.einsum("ij,ij->i", nu, con)).max() < 1e-12
    assert np.abs(tau - np.cross(nu, con)).max() < 1e-10
    assert np.abs(np.linalg.norm(tau, axis=1) - 1).max() < 1e-10
    # conormal points into the disk
    pts = unit_disk_manifold.boundary.point(s)
    assert np.all(np.linalg.norm(pts + 0.1 * con, axis=1) < 1.0)


def test_curve_on_patch(unit_disk_manifold):
    pts = unit_disk_manifold.boundary.nodes
    assert np.abs(np.linalg.norm(pts, axis=1) - 1.0).max() < geo.POSITION_TOL


# ---------------------------------------------------------------------------
# tangential collars
# ---------------------------------------------------------------------------


def test_disk_collar_radial(unit_disk_manifold, unit_disk_collar):
    col = unit_disk_collar
    # layer distance equals the parameter gap for the radial collar
    assert abs(col.layer_distance(0.0, 0.25) - 0.25) < 1e-12
    assert col.bilip < 1.005


def test_cap_collar_great_circle_oracle():
    man = geo.spherical_cap_manifold((0, 0, 0), 1.0, np.pi / 2)
    col = geo.build_tangential_collar(man)
    # great-circle distance between colatitude rings theta0*(1-s)
    th0 = np.pi / 2
    for s0, s1 in [(0.0, 0.1), (0.1, 0.3)]:
        chord = 2.0 * np.sin(0.5 * th0 * (s1 - s0))
        assert abs(col.layer_distance(s0, s1) - chord) < 1e-10
    assert col.bilip <= 2.0


def test_closed_sphere_collar_is_empty():
    man = geo.closed_sphere_manifold((0, 0, 0), 1.0)
    col = geo.build_tangential_collar(man)
    assert col.empty
    hf = geo.height_function(man, col, 0.1, 0.05)
    assert np.all(hf.value_at_parameter([0.0, 0.3]) == 1.0)
    assert hf.sup_gradient() == 0.0


def test_degenerate_boundary_rejected():
    man = geo.disk_manifold((0, 0, 0), 1.0)
    shrunk = geo.BoundaryManifold(man.patch, geo.empty_curve(), man.conormal,
                                  kind="disk", meta=man.meta)
    with pytest.raises(geo.GeometryError):
        geo.build_tangential_collar(shrunk)


def test_shrink_tangential(unit_disk_manifold, unit_disk_collar):
    shrunk = geo.shrink_tangential(unit_disk_manifold, unit_disk_collar, 0.25)
    assert abs(shrunk.meta["radius"] - 0.75) < 1e-12
    same = geo.shrink_tangential(unit_disk_manifold, unit_disk_collar, 0.0)
    assert same is unit_disk_manifold
    with pytest.raises(geo.GeometryError):
        geo.shrink_tangential(unit_disk_manifold, unit_disk_collar, 0.7)


def test_shrink_cap_area_monotone():
    man = geo.spherical_cap_manifold((0, 0, 0), 1.0, 1.0)
    col = geo.build_tangential_collar(man)
    areas = [geo.shrink_tangential(man, col, t).patch.area() for t in (0.0, 0.1, 0.2)]
    assert areas[0] > areas[1] > areas[2]


# ---------------------------------------------------------------------------
# height functions and collar bands
# ---------------------------------------------------------------------------


def test_height_function_flat_gradient(unit_disk_manifold, unit_disk_collar):
    hf = geo.height_function(unit_disk_manifold, unit_disk_collar, 0.0, 0.1)
    assert abs(hf.sup_gradient() - 10.0) < 1e-10


def test_height_function_range_checks(unit_disk_manifold, unit_disk_collar):
    with pytest.raises(geo.GeometryError):
        geo.height_function(unit_disk_manifold, unit_disk_collar, 0.6, 0.1)
    with pytest.raises(geo.GeometryError):
        geo.height_function(unit_disk_manifold, unit_disk_collar, 0.1, 0.3)


@settings(max_examples=20, deadline=None, derandomize=True)
@given(st.floats(0.0, 0.45), st.floats(0.01, 0.24))
def test_height_function_invariants(t, delta):
    man = geo.disk_manifold((0, 0, 0), 1.0)
    col = geo.build_tangential_collar(man)
    hf = geo.height_function(man, col, t, delta)
    s = np.linspace(0, 0.9, 40)
    vals = hf.value_at_parameter(s)
    assert np.all((0.0 <= vals) & (vals <= 1.0))
    ramp = (vals > 0) & (vals < 1)
    assert np.all((s[ramp] > t) & (s[ramp] < t + delta))
    # scaled gradient bound is uniform in (t, delta) for the radial collar
    assert hf.sup_gradient() * delta <= 1.0 + 1e-9


def test_cap_height_gradient_bound():
    man = geo.spherical_cap_manifold((0, 0, 0), 1.0, np.pi / 2)
    col = geo.build_tangential_collar(man)
    hf = geo.height_function(man, col, 0.0, 0.05)
    c = 1.0 / (np.pi / 2)  # meridian collar on the unit sphere
    assert hf.sup_gradient() <= (c / 0.05) * (1 + 1e-9)


def test_band_area_comparability(unit_disk_collar):
    # delta/c <= band area <= c*delta over sampled (t, delta)
    c = 4.0 * np.pi
    for t in (0.0, 0.2):
        for delta in (0.05, 0.1):
            area = geo.band_area(unit_disk_collar, t, delta)
            assert delta / c <= area <= c * delta


# ---------------------------------------------------------------------------
# transversal collars / regions
# ---------------------------------------------------------------------------


def test_ball_transversal_collar():
    ball = geo.ball_region(order=12, n_angular=32)
    col = geo.build_transversal_collar(ball)
    assert abs(col.kappa - 1.0) < 1e-12
    man = geo.closed_sphere_manifold((0, 0, 0), 1.0, order=12, n_angular=32)
    shifted = geo.shift_transversal(man, col, 0.1)
    assert abs(shifted.meta["radius"] - 0.9) < 1e-12


def test_half_ball_face_slide(half_ball):
    col = geo.build_transversal_collar(half_ball)
    face = geo.disk_manifold((0, 0, 0), 1.0)
    shifted = geo.shift_transversal(face, col, 0.1)
    assert np.abs(shifted.patch.points()[:, 2] - 0.1).max() < 1e-12


def test_shift_identity_and_range(unit_cylinder, cylinder_collar):
    man = geo.disk_manifold((0, 0, 0), 1.0)
    same = geo.shift_transversal(man, cylinder_collar, 0.0)
    assert np.abs(same.patch.points() - man.patch.points()).max() < 1e-12
    with pytest.raises(geo.GeometryError):
        geo.shift_transversal(man, cylinder_collar, 0.6)


def test_box_collar_kappa():
    box = geo.box_region(order=10)
    col = geo.build_transversal_collar(box)
    assert col.kappa >= 0.5


def test_region_volumes(half_ball, unit_cylinder):
    assert abs(half_ball.volume() - 2 * np.pi / 3) < 1e-10
    assert abs(unit_cylinder.volume() - np.pi) < 1e-10
    ball = geo.ball_region(order=16, n_angular=32)
    assert abs(ball.volume() - 4 * np.pi / 3) < 1e-10


def test_region_boundary_tiles(half_ball):
    # inner normals + boundary patches tile the boundary: divergence theorem
    # for a linear field: int div dx = -int F . nu dH^2 with inner normals
    def f(x):
        return x

    vol = 3.0 * half_ball.volume()
    bd = 0.0
    for patch in half_ball.boundary:
        uv = patch.rule.nodes
        pts = patch.param(uv)
        nu = patch.normal(uv)
        w = patch.rule.weights * patch.metric_jacobian(uv)
        bd += float(np.sum(w * np.einsum("ij,ij->i", f(pts), nu)))
    assert abs(vol + bd) < 1e-10


# ---------------------------------------------------------------------------
# extension operator
# ---------------------------------------------------------------------------


def test_extension_constant_data(unit_disk_manifold):
    ext = geo.extend_boundary_function(unit_disk_manifold,
                                       lambda p: np.ones(len(np.atleast_2d(p))), 0.2)
    from curlflux.testfns import cutoff_profile
    zs = np.array([0.0, 0.05, 0.1, 0.15, 0.25])
    pts = np.stack([np.full_like(zs, 0.1), np.zeros_like(zs), zs], axis=1)
    vals = ext.value(pts)
    assert np.abs(vals - cutoff_profile(zs / 0.2)).max() < 1e-12
    assert vals[-1] == 0.0  # vanishes past the extension depth


def test_extension_linear_data(unit_disk_manifold):
    # in-plane mollification of affine data reproduces it exactly
    ext = geo.extend_boundary_function(unit_disk_manifold, lambda p: np.atleast_2d(p)[:, 0],
                                       0.3)
    pts = np.array([[0.2, 0.1, 0.05], [0.4, -0.3, 0.1]])
    from curlflux.testfns import cutoff_profile
    expected = pts[:, 0] * cutoff_profile(pts[:, 2] / 0.3)
    assert np.abs(ext.value(pts) - expected).max() < 1e-12


def test_extension_boundary_agreement(unit_disk_manifold):
    def hat(p):
        p = np.atleast_2d(p)
        return np.clip(1.0 - np.hypot(p[:, 0], p[:, 1]) / 0.5, 0.0, None)

    ext = geo.extend_boundary_function(unit_disk_manifold, hat, 0.2)
    pts = np.array([[0.1, 0.2, 0.0], [0.3, 0.0, 0.0]])
    assert np.abs(ext.value(pts) - hat(pts)).max() < 1e-12


def test_extension_gradient_bound(unit_disk_manifold):
    def hat(p):
        p = np.atleast_2d(p)
        return np.clip(1.0 - np.hypot(p[:, 0], p[:, 1]) / 0.5, 0.0, None)

    ext = geo.extend_boundary_function(unit_disk_manifold, hat, 0.2)
    report = ext.gradient_bound_report()
    assert report["fitted_constant"] <= 8.0


def test_extension_rejects_coarse_samples(unit_disk_manifold):
    pts = np.array([[0.0, 0.0, 0.0], [0.5, 0.0, 0.0], [0.0, 0.5, 0.0]])
    vals = np.array([1.0, 0.5, 0.2])
    with pytest.raises(geo.GeometryError):
        geo.extend_boundary_function(unit_disk_manifold, (pts, vals), delta=0.05)
