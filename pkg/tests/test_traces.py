import numpy as np
import pytest

from curlflux import fields as flds
from curlflux import geometry as geo
from curlflux import traces as trc
from curlflux.testfns import (
    ScalarTestFunction,
    VectorTestField,
    gradient_field,
    random_trig_vector,
    smooth_bump,
    trig_scalar,
)


def _boundary_cross_oracle(region, fld):
    out = np.zeros(3)
    for patch in region.boundary:
        uv = patch.rule.nodes
        pts = patch.param(uv)
        nu = patch.normal(uv)
        w = patch.rule.weights * patch.metric_jacobian(uv)
        out = out + np.tensordot(w, np.cross(fld.eval(pts), nu), axes=(0, 0))
    return out


# ---------------------------------------------------------------------------
# scalar pairing
# ---------------------------------------------------------------------------


def test_pairing_matches_boundary_integral(rigid_rotation, half_ball):
    # testfn == 1 near the region: the pairing is the boundary cross integral
    from curlflux.testfns import constant_one
    one = constant_one(radius=3.0)
    got = trc.trace_pairing(rigid_rotation.curl, rigid_rotation.vector_field,
                            half_ball, one)
    oracle = _boundary_cross_oracle(half_ball, rigid_rotation.vector_field)
    assert np.abs(got - oracle).max() < 1e-8


def test_pairing_locality(rigid_rotation, half_ball):
    # piecewise-polynomial bump + support-split quadrature: exact vanishing
    from curlflux.testfns import radial_bump
    bump = radial_bump((0.0, 0.0, 0.45), 0.3)
    got = trc.trace_pairing(rigid_rotation.curl, rigid_rotation.vector_field,
                            half_ball, bump)
    assert np.abs(got).max() < 1e-12


def test_pairing_newtonian_pv(newtonian, half_ball):
    # volume route against the symmetric-exclusion face quadrature
    hb = geo.half_ball_region(order=32, n_angular=96)
    phi = smooth_bump((0.25, -0.1, 0.0), 0.9, plateau=0.3)
    pairing = trc.trace_pairing(newtonian.curl, newtonian.vector_field, hb, phi)
    pv = trc.pv_face_pairing(newtonian.trace_z_plane, (0, 0, 0), 1.0, phi, 1e-3)
    assert np.linalg.norm(pairing - pv) < 1e-3


def test_interior_exterior_agreement(rigid_rotation):
    # integrable curl density: the two one-sided pairings agree for test
    # fields compactly supported in the ambient region
    from curlflux.testfns import radial_bump, windowed
    region = geo.half_ball_region(order=24, n_angular=48)
    tv = windowed(random_trig_vector(21, n_modes=2, kmax=1.0),
                  radial_bump((0, 0, 0), 1.8, plateau=0.6))
    ambient = geo.ball_region((0, 0, 0), 2.0, order=24, n_angular=64,
                              radial_breaks=(1.0, 0.6 * 1.8, 1.8))
    interior = trc.trace_pairing_vector(rigid_rotation.curl,
                                        rigid_rotation.vector_field,
                                        region, tv, side="interior")
    exterior = trc.trace_pairing_vector(rigid_rotation.curl,
                                        rigid_rotation.vector_field,
                                        region, tv, side="exterior",
                                        ambient=ambient)
    assert abs(interior - exterior) < 1e-6


# ---------------------------------------------------------------------------
# vector pairing
# ---------------------------------------------------------------------------


def test_vector_pairing_gradient_equals_measure(line_vortex, unit_cylinder):
    # curl(grad phi) = 0: the pairing reduces to the measure integral
    phi = smooth_bump((0.0, 0.0, 0.5), 0.45)
    tv = gradient_field(phi)
    got = trc.trace_pairing_vector(line_vortex.curl, line_vortex.vector_field,
                                   unit_cylinder, tv)
    oracle = float(np.sum(flds.integrate_measure(line_vortex.curl, phi.gradient,
                                                 unit_cylinder)))
    assert abs(got - oracle) < 1e-10


def test_vector_pairing_smooth_identity(rigid_rotation, half_ball):
    # residual against the boundary form of the curl integration-by-parts rule
    tv = random_trig_vector(5, n_modes=2, kmax=1.2)
    got = trc.trace_pairing_vector(rigid_rotation.curl, rigid_rotation.vector_field,
                                   half_ball, tv)
    oracle = 0.0
    for patch in half_ball.boundary:
        uv = patch.rule.nodes
        pts = patch.param(uv)
        nu = patch.normal(uv)
        w = patch.rule.weights * patch.metric_jacobian(uv)
        vals = np.einsum("ij,ij->i",
                         np.cross(rigid_rotation.vector_field.eval(pts), nu),
                         tv.value(pts))
        oracle += float(np.sum(w * vals))
    assert abs(got - oracle) < 1e-8


def test_vector_pairing_line_vortex_face_oracle(line_vortex):
    # test field supported near the bottom face: pairing equals the surface
    # integral of the explicit integrable trace representative
    from curlflux.testfns import bump_vector
    cyl = geo.cylinder_region(order=32, n_angular=96)
    tv = bump_vector((0.3, 0.0, 0.0), 0.5, (0.2, -0.4, 0.3))
    got = trc.trace_pairing_vector(line_vortex.curl, line_vortex.vector_field,
                                   cyl, tv)
    face = geo.disk_patch((0, 0, 0), 1.0, order=24, n_angular=96,
                          radial_breaks=(0.0125, 0.025, 0.05, 0.1, 0.2, 0.4))
    oracle = geo.surface_integral(
        face, lambda pts: np.einsum("ij,ij->i", line_vortex.trace_z_plane(pts),
                                    tv.value(pts)))
    assert abs(got - oracle) < 1e-5


# ---------------------------------------------------------------------------
# layerwise estimation
# ---------------------------------------------------------------------------


def test_layerwise_smooth_sphere(rigid_rotation):
    ball = geo.ball_region(order=16, n_angular=48)
    tcol = geo.build_transversal_collar(ball)
    man = geo.closed_sphere_manifold((0, 0, 0), 1.0, order=16, n_angular=48)
    tt = trc.estimate_trace_layerwise(rigid_rotation.vector_field, man, tcol,
                                      [2.0 ** -k for k in range(2, 10)])
    nu = -tt.points / np.linalg.norm(tt.points, axis=1, keepdims=True)
    exact = np.cross(rigid_rotation.vector_field.eval(tt.points), nu)
    assert np.all(tt.converged)
    assert np.abs(tt.values - exact).max() < 1e-6
    assert tt.tangentiality_residual.max() < 1e-12
    assert tt.sup_bound <= np.sqrt(2.0) + 1e-9  # |F| <= sqrt(2) near the unit sphere


def test_layerwise_glued_constants(unit_cylinder, cylinder_collar):
    interface = flds.unit_disk_interface()
    pw, _ = flds.make_vortex_sheet(flds.constant_field((1, 0, 0)),
                                   flds.constant_field((0, 0, 0)), interface)
    fld = flds.VectorField(pw.eval, label="glued")
    man = geo.disk_manifold((0, 0, 0), 1.0)
    t_grid = [2.0 ** -k for k in range(2, 8)]
    inner = trc.estimate_trace_layerwise(fld, man, cylinder_collar, t_grid, "interior")
    assert np.abs(inner.values - np.array([0.0, -1.0, 0.0])).max() < 1e-12
    outer = trc.estimate_trace_layerwise(fld, man, cylinder_collar, t_grid, "exterior")
    assert np.abs(outer.values).max() < 1e-12


def test_layerwise_lipschitz_gradient_two_sided(unit_cylinder, cylinder_collar):
    # gradient of a Lipschitz potential: interior and exterior traces agree
    fld = flds.VectorField(lambda x: 2.0 * np.atleast_2d(x), label="grad|x|^2")
    man = geo.disk_manifold((0, 0, 0), 1.0)
    t_grid = [2.0 ** -k for k in range(2, 10)]
    inner = trc.estimate_trace_layerwise(fld, man, cylinder_collar, t_grid, "interior")
    outer = trc.estimate_trace_layerwise(fld, man, cylinder_collar, t_grid, "exterior")
    assert np.abs(inner.values - outer.values).max() < 1e-8


# ---------------------------------------------------------------------------
# layer-route pairing and tangentiality
# ---------------------------------------------------------------------------


def test_cross_route_equality(rigid_rotation, half_ball):
    tcol = geo.build_transversal_collar(half_ball)
    tv = random_trig_vector(7, n_modes=2, kmax=1.0)
    a = trc.trace_pairing_vector(rigid_rotation.curl, rigid_rotation.vector_field,
                                 half_ball, tv)
    b, verdict = trc.trace_pairing_via_layers(rigid_rotation.vector_field, half_ball,
                                              tcol, tv.value,
                                              [2.0 ** -k for k in range(3, 9)])
    assert abs(a - b) < 1e-4


def test_layer_route_zero_testvec(rigid_rotation, half_ball):
    tcol = geo.build_transversal_collar(half_ball)
    val, _ = trc.trace_pairing_via_layers(
        rigid_rotation.vector_field, half_ball, tcol,
        lambda pts: np.zeros_like(np.atleast_2d(pts)), [0.1, 0.05, 0.025])
    assert val == 0.0


def test_layer_route_line_vortex_face(line_vortex, unit_cylinder, cylinder_collar):
    from curlflux.testfns import bump_vector
    tv = bump_vector((0.35, 0.0, 0.0), 0.45, (0.1, -0.2, 0.25))
    got, verdict = trc.trace_pairing_via_layers(
        line_vortex.vector_field, unit_cylinder, cylinder_collar, tv.value,
        [2.0 ** -k for k in range(4, 10)])
    face = geo.disk_patch((0, 0, 0), 1.0, order=24, n_angular=96,
                          radial_breaks=(0.05, 0.1, 0.2, 0.4))
    oracle = geo.surface_integral(
        face, lambda pts: np.einsum("ij,ij->i", line_vortex.trace_z_plane(pts),
                                    tv.value(pts)))
    assert abs(got - oracle) < 2e-3


def test_tangentiality_defect_normal_data(rigid_rotation):
    # boundary data = the normal field itself: T(nu) must vanish in the limit
    ball = geo.ball_region(order=20, n_angular=48)
    tcol = geo.build_transversal_collar(ball)

    def nu_data(base):
        return -base / np.linalg.norm(np.atleast_2d(base), axis=1, keepdims=True)

    t_nu = trc.boundary_pairing_layer_route(rigid_rotation.vector_field, ball, tcol,
                                            nu_data, [2.0 ** -k for k in range(3, 9)])
    defect = trc.tangentiality_defect(rigid_rotation.vector_field, ball, tcol,
                                      nu_data, [2.0 ** -k for k in range(3, 9)])
    assert abs(t_nu) < 1e-3
    assert abs(defect - abs(t_nu)) < 1e-12  # tangential part of nu is zero


def test_tangentiality_defect_random_fields(rigid_rotation):
    ball = geo.ball_region(order=20, n_angular=48)
    tcol = geo.build_transversal_collar(ball)
    for seed in range(5):
        tv = random_trig_vector(100 + seed, n_modes=2, kmax=1.0)
        defect = trc.tangentiality_defect(rigid_rotation.vector_field, ball, tcol,
                                          tv.value, [2.0 ** -k for k in range(3, 9)])
        assert defect < 1e-3


# ---------------------------------------------------------------------------
# order diagnostic
# ---------------------------------------------------------------------------


def test_order_diagnostic_newtonian(newtonian):
    eps_grid = (1e-1, 1e-2, 1e-3)
    diag = trc.trace_order_diagnostic(newtonian.trace_z_plane, (0, 0, 0), 1.0,
                                      eps_grid)
    for eps, tv in zip(diag.epsilon_grid, diag.total_variation):
        exact = 0.5 * np.log(1.0 / eps)
        assert abs(tv - exact) / exact < 0.01
    assert diag.order_flag == "order_one_only"


def test_order_diagnostic_bounded(rigid_rotation):
    diag = trc.trace_order_diagnostic(rigid_rotation.trace_z_plane, (0, 0, 0), 1.0,
                                      (1e-1, 1e-2, 1e-3))
    assert diag.order_flag == "order_zero"
    assert max(diag.total_variation) - min(diag.total_variation) < 0.05


def test_order_diagnostic_line_vortex_face(line_vortex):
    # |trace| ~ 1/(2 pi rho): integrable in 2D, TV(eps) = 1 - eps stays bounded
    diag = trc.trace_order_diagnostic(line_vortex.trace_z_plane, (0, 0, 0), 1.0,
                                      (1e-1, 1e-2, 1e-3))
    assert diag.order_flag == "order_zero"
    for eps, tv in zip(diag.epsilon_grid, diag.total_variation):
        assert abs(tv - (1.0 - eps)) < 1e-6
