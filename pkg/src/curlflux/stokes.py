"""Stokes functionals and their limits.

The tangential route integrates a boundary trace against the gradient of the
ramp localizer and sends the ramp width to zero; the reported flux functional
is minus that limit, which matches the classical identity
flux(curl F . nu) = -circulation for smooth fields under the inward-normal
orientation used throughout. The transversal route reduces the same flux to a
Gauss-Green functional of the trace as a bounded-divergence surface field on
a shifted manifold. The mass route replaces the circulation by the boundary
pairing of an integrable divergence representative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .fields import CurlMeasure, PiecewiseField, VectorField, integrate_measure
from .geometry import (
    BoundaryManifold,
    GeometryError,
    SolidRegion,
    TangentialCollar,
    TransversalCollar,
    arc_curve,
    band_area,
    circle_curve,
    line_integral,
    ramp_integral,
    shift_transversal,
    surface_integral,
    volume_integral,
)
from .quadrature import gauss_legendre, periodic_trapezoid
from .sequences import SequenceVerdict, judge_sequence, richardson_limit
from .testfns import ScalarTestFunction, VectorTestField, radial_bump

DELTA_J_RANGE = range(2, 13)  # default ramp widths 2^-j


class StokesRefusal(RuntimeError):
    """Raised when a route's admissibility precondition fails."""


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StokesResult:
    route: str
    t: float
    deltas: tuple[float, ...]
    delta_values: tuple[float, ...]  # ramp-localizer integrals per delta
    t_osc: float
    converged: bool
    extrapolated: Optional[float]  # flux functional = -(limit of delta_values)
    meta: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "CONVERGED" if self.converged else "NON-CONVERGENT"


@dataclass(frozen=True)
class StokesDensity:
    point: np.ndarray
    r_grid: tuple[float, ...]
    estimates: tuple[float, ...]
    limit: Optional[float]
    converged: bool


# ---------------------------------------------------------------------------
# tangential localizer route
# ---------------------------------------------------------------------------


def _breaks_in_s(collar: TangentialCollar, radii: Sequence[float]) -> tuple[float, ...]:
    if collar.param_of_radius is None or not radii:
        return ()
    return tuple(collar.param_of_radius(r) for r in radii)


def stokes_tangential(trace, manifold: BoundaryManifold, collar: TangentialCollar,
                      t: float, testfn: Optional[ScalarTestFunction] = None,
                      j_range: Sequence[int] = DELTA_J_RANGE,
                      breaks_radii: Sequence[float] = (), s_order: int = 10,
                      spread_tol: float = 1e-5, osc_tol: float = 5e-2) -> StokesResult:
    """Ramp-localizer integrals at widths 2^-j with convergence verdict.

    `trace` maps boundary points to the interior tangential trace vectors.
    The stored delta values are the raw ramp integrals; the flux functional
    is minus their limit and is only reported when the sequence converges
    (Aitken-accelerated spread under `spread_tol` and raw tail oscillation
    under `osc_tol`).
    """
    scalar = testfn.value if testfn is not None else None
    deltas = tuple(2.0 ** (-j) for j in j_range)
    breaks = _breaks_in_s(collar, breaks_radii)
    vals = []
    for d in deltas:
        if t + d > collar.s_max:
            raise GeometryError("ramp exceeds collar range")
        vals.append(ramp_integral(manifold, collar, t, d, trace, scalar=scalar,
                                  s_order=s_order, breaks=breaks))
    verdict = judge_sequence(vals, spread_tol=spread_tol, osc_tol=osc_tol)
    flux = -verdict.limit if verdict.converged else None
    return StokesResult("tangential_localizer", t, deltas, tuple(vals),
                        verdict.tail_oscillation, verdict.converged, flux,
                        meta={"accelerated_spread": verdict.accelerated_spread})


def vorticity_flux(trace, manifold: BoundaryManifold, collar: TangentialCollar,
                   t: float, breaks_radii: Sequence[float] = (),
                   cutoff_tol: float = 1e-8, **kw) -> float:
    """Flux through the shrunk manifold: the mass of the localizer-limit
    measure, checked for independence of the cutoff choice."""
    res1 = stokes_tangential(trace, manifold, collar, t, testfn=None,
                             breaks_radii=breaks_radii, **kw)
    if not res1.converged:
        raise StokesRefusal("localizer limit did not converge; no flux reported")
    center = manifold.meta.get("center", np.zeros(3))
    big = radial_bump(center, 64.0 * (1.0 + np.linalg.norm(center)), plateau=0.9)
    res2 = stokes_tangential(trace, manifold, collar, t, testfn=big,
                             breaks_radii=breaks_radii, **kw)
    if res2.converged and abs(res2.extrapolated - res1.extrapolated) > cutoff_tol:
        raise StokesRefusal("flux depends on the cutoff beyond tolerance")
    return float(res1.extrapolated)


def stokes_density(trace, manifold: BoundaryManifold, collar: TangentialCollar,
                   t: float, x0, r_grid: Sequence[float],
                   j_range: Sequence[int] = range(5, 14),
                   breaks_radii: Sequence[float] = (), n_arc: int = 48) -> StokesDensity:
    """Boundary-measure density at a point of the shrunk manifold's boundary.

    Each radius pairs the localizer limit against a bump and normalizes by the
    curve mass of the same bump; the r-limit reproduces -(trace . tangent) at
    continuity points. Quadrature is windowed to the bump's angular support,
    so radii far below the global angular resolution remain well resolved.
    """
    if manifold.kind != "disk":
        raise GeometryError("density estimation implemented for disk manifolds")
    x0 = np.asarray(x0, dtype=float)
    center = manifold.meta["center"]
    radius = manifold.meta["radius"]
    e1, e2, n = manifold.meta["frame"]
    rel = x0 - center
    a0 = float(np.arctan2(rel @ e2, rel @ e1))
    deltas = [2.0 ** (-j) for j in j_range]
    ests = []
    for r in r_grid:
        bump = radial_bump(x0, r, plateau=0.6)
        half_width = 1.5 * r / (radius * (1.0 - t))
        vals = []
        for d in deltas:
            s_rule = gauss_legendre(8, t, t + d)
            total = 0.0
            for s, w in zip(s_rule.nodes, s_rule.weights):
                rho = radius * (1.0 - s)
                arc = arc_curve(center, rho, e1, e2, a0 - half_width, a0 + half_width,
                                n_arc)
                pts = arc.nodes
                g = collar.grad_s(pts, s) / d
                integrand = (np.einsum("ij,ij->i", np.atleast_2d(trace(pts)), g)
                             * bump.value(pts))
                total += w * float(collar.layer_jacobian(s)) * float(
                    np.sum(arc.rule.weights * arc.speed(arc.rule.nodes) * integrand))
            vals.append(total)
        verdict = judge_sequence(vals, spread_tol=1e-5, osc_tol=5e-2)
        if not verdict.converged:
            ests.append(np.nan)
            continue
        rho_t = radius * (1.0 - t)
        arc_t = arc_curve(center, rho_t, e1, e2, a0 - half_width, a0 + half_width, n_arc)
        curve_mass = line_integral(arc_t, bump.value)
        ests.append(-verdict.limit / curve_mass if curve_mass > 0 else np.nan)
    arr = [e for e in ests if np.isfinite(e)]
    # estimates converge slowly in the window radius; report the finest scale
    limit = float(arr[-1]) if arr else None
    return StokesDensity(x0, tuple(r_grid), tuple(float(e) for e in ests), limit,
                         bool(arr))


# ---------------------------------------------------------------------------
# divergence-measure fields on a flat manifold and the Gauss-Green route
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ManifoldDivMeasure:
    """Tangential surface field with distributionally-measured divergence.

    The divergence action splits into a pointwise part (quadrature outside
    exclusion disks around declared singular points) and point atoms whose
    strengths are estimated from circulation flux through shrinking circles.
    """

    manifold: BoundaryManifold
    values: Callable[[np.ndarray], np.ndarray]
    pointwise_div: Callable[[np.ndarray], np.ndarray]
    atoms: tuple[tuple[np.ndarray, float], ...]
    exclusion: float
    tangentiality: float

    def action(self, phi_value: Callable[[np.ndarray], np.ndarray]) -> float:
        """<div_tau v, phi> including atoms."""
        patch = self.manifold.patch
        def dens(pts):
            out = np.asarray(self.pointwise_div(pts), dtype=float)
            for p, _ in self.atoms:
                out = out * (np.linalg.norm(np.atleast_2d(pts) - p, axis=1)
                             > self.exclusion).astype(float)
            return out * np.asarray(phi_value(pts), dtype=float)
        total = surface_integral(patch, dens)
        for p, strength in self.atoms:
            total += strength * float(np.asarray(phi_value(p[None, :]))[0])
        return float(total)

    def total_mass(self) -> float:
        patch = self.manifold.patch
        def dens(pts):
            out = np.abs(np.asarray(self.pointwise_div(pts), dtype=float))
            for p, _ in self.atoms:
                out = out * (np.linalg.norm(np.atleast_2d(pts) - p, axis=1)
                             > self.exclusion).astype(float)
            return out
        total = surface_integral(patch, dens)
        return float(total + sum(abs(s) for _, s in self.atoms))

    def dual_mass_estimate(self, dictionary: Sequence[ScalarTestFunction],
                           breaks_radii: Sequence[float] = ()) -> float:
        """Lower bound of the divergence mass from the defining dual formula:
        sup over unit test functions of the pairing with the field's surface
        gradient. Independent of the pointwise/atom decomposition, so it also
        sees line-concentrated divergence."""
        from .geometry import disk_patch
        e1, e2, n = _flat_frame(self.manifold)
        patch = self.manifold.patch
        if breaks_radii:
            patch = disk_patch(self.manifold.meta["center"],
                               self.manifold.meta["radius"], n,
                               order=12, n_angular=96, radial_breaks=breaks_radii)
        best = 0.0
        for phi in dictionary:
            def integrand(pts, phi=phi):
                g = np.atleast_2d(phi.gradient(pts))
                gt = g - np.outer(g @ n, n)
                return np.einsum("ij,ij->i", gt, np.atleast_2d(self.values(pts)))
            best = max(best, abs(surface_integral(patch, integrand)))
        return best


def _flat_frame(manifold: BoundaryManifold):
    if manifold.kind != "disk":
        raise GeometryError("pointwise surface divergence implemented for flat disks only")
    e1, e2, n = manifold.meta["frame"]
    return e1, e2, n


def manifold_div_measure(values, manifold: BoundaryManifold,
                         singular_points: Sequence = (), exclusion: float = 2e-3,
                         fd_step: float = 1e-5, tangential_tol: float = 1e-8,
                         atom_radii: Sequence[float] = (0.05, 0.025, 0.0125)) -> ManifoldDivMeasure:
    """Build the divergence measure of a tangential field on a flat disk.

    Rejects non-tangential data; atom strengths at declared singular points
    come from outward circulation flux through small circles, extrapolated
    over the given radii.
    """
    e1, e2, n = _flat_frame(manifold)
    pts = manifold.patch.points()
    vals = np.atleast_2d(values(pts))
    resid = float(np.max(np.abs(vals @ n)))
    if resid > tangential_tol:
        raise StokesRefusal(f"surface field is not tangential (residual {resid:.2e})")

    def pw_div(p):
        p = np.atleast_2d(p)
        vp1 = np.atleast_2d(values(p + fd_step * e1))
        vm1 = np.atleast_2d(values(p - fd_step * e1))
        vp2 = np.atleast_2d(values(p + fd_step * e2))
        vm2 = np.atleast_2d(values(p - fd_step * e2))
        return ((vp1 - vm1) @ e1 + (vp2 - vm2) @ e2) / (2.0 * fd_step)

    atoms = []
    for sp in singular_points:
        sp = np.asarray(sp, dtype=float)
        fluxes = []
        for r in atom_radii:
            circ = circle_curve(sp, r, e1, e2, n_nodes=128)
            outward = lambda q: (np.atleast_2d(q) - sp) / r
            fluxes.append(line_integral(
                circ, lambda q: np.einsum("ij,ij->i", np.atleast_2d(values(q)), outward(q))))
        atoms.append((sp, float(richardson_limit(fluxes)) if len(fluxes) > 1 else fluxes[0]))
    return ManifoldDivMeasure(manifold, values, pw_div, tuple(atoms),
                              exclusion, resid)


def gauss_green_manifold(dm: ManifoldDivMeasure, testfn: ScalarTestFunction) -> float:
    """Boundary functional -<div v, phi> - int grad_tau(phi) . v."""
    _, _, n = _flat_frame(dm.manifold)

    def gt_dot_v(pts):
        g = np.atleast_2d(testfn.gradient(pts))
        gt = g - np.outer(g @ n, n)
        return np.einsum("ij,ij->i", gt, np.atleast_2d(dm.values(pts)))

    return -dm.action(testfn.value) - surface_integral(dm.manifold.patch, gt_dot_v)


def stokes_transversal(trace_on_shifted, manifold: BoundaryManifold,
                       collar: TransversalCollar, t: float,
                       testfn: Optional[ScalarTestFunction] = None,
                       maximal_value: Optional[float] = None,
                       singular_points: Sequence = ()) -> dict:
    """Flux through the transversally shifted manifold via the Gauss-Green
    functional of its trace as a bounded-divergence surface field.

    Refuses when the supplied transversal maximal value at t is infinite
    (concentration on the shifted layer).
    """
    if maximal_value is not None and not np.isfinite(maximal_value):
        raise StokesRefusal(f"transversal maximal function infinite at t={t}")
    shifted = shift_transversal(manifold, collar, t)
    dm = manifold_div_measure(trace_on_shifted, shifted,
                              singular_points=singular_points)
    if testfn is None:
        flux = dm.action(lambda pts: np.ones(np.atleast_2d(pts).shape[0]))
    else:
        _, _, n = _flat_frame(shifted)

        def grad_term(pts):
            g = np.atleast_2d(testfn.gradient(pts))
            gt = g - np.outer(g @ n, n)
            return np.einsum("ij,ij->i", gt, np.atleast_2d(dm.values(pts)))

        flux = surface_integral(shifted.patch, grad_term) + dm.action(testfn.value)
    return {"flux": float(flux), "div_mass": dm.total_mass(),
            "manifold": shifted, "div_measure": dm}


# ---------------------------------------------------------------------------
# boundary pairing and masses (integrable-representative route)
# ---------------------------------------------------------------------------


def boundary_pairing_mass(G, manifold: BoundaryManifold, collar: TangentialCollar,
                          t: float, testfn: Optional[ScalarTestFunction] = None,
                          j_range: Sequence[int] = DELTA_J_RANGE,
                          breaks_radii: Sequence[float] = ()) -> tuple[float, float, StokesResult]:
    """Boundary pairing <<G . nu, psi>> by ramp limits, and the induced mass.

    Returns (pairing, mass, diagnostics); mass = -<<G . nu, 1>>.
    """
    res_one = stokes_tangential(G, manifold, collar, t, testfn=None,
                                j_range=j_range, breaks_radii=breaks_radii)
    if not res_one.converged:
        raise StokesRefusal("boundary pairing did not converge at this parameter")
    mass = float(res_one.extrapolated)  # already -(limit)
    if testfn is None:
        pairing = -mass
    else:
        res = stokes_tangential(G, manifold, collar, t, testfn=testfn,
                                j_range=j_range, breaks_radii=breaks_radii)
        if not res.converged:
            raise StokesRefusal("boundary pairing did not converge for this test function")
        pairing = -float(res.extrapolated)
    return pairing, mass, res_one


def divergence_free_residual(G1, G2, manifold: BoundaryManifold,
                             dictionary: Sequence[ScalarTestFunction]) -> float:
    """Sup over the dictionary of the pairing of div(G1 - G2) with the entries.

    Entries must be supported in the interior of the manifold: the
    distributional surface divergence pairs against compactly supported test
    functions, and edge-supported entries would see a spurious boundary flux.
    """
    nu = manifold.patch.normal(manifold.patch.rule.nodes)
    worst = 0.0
    for phi in dictionary:
        def integrand(pts):
            g = np.atleast_2d(phi.gradient(pts))
            gt = g - np.einsum("ij,ij->i", g, nu)[:, None] * nu
            diff = np.atleast_2d(G1(pts)) - np.atleast_2d(G2(pts))
            return np.einsum("ij,ij->i", gt, diff)
        worst = max(worst, abs(surface_integral(manifold.patch, integrand)))
    return worst


def mass_representative_independence(G1, G2, manifold: BoundaryManifold,
                                     collar: TangentialCollar, t: float,
                                     dictionary: Sequence[ScalarTestFunction],
                                     precondition_tol: float = 1e-5,
                                     breaks_radii: Sequence[float] = ()) -> float:
    """|mass(G1) - mass(G2)| for representatives differing by a divergence-free
    field; the precondition is verified against the dictionary first."""
    resid = divergence_free_residual(G1, G2, manifold, dictionary)
    if resid > precondition_tol:
        raise StokesRefusal(
            f"representatives do not differ by a divergence-free field (residual {resid:.2e})")
    _, m1, _ = boundary_pairing_mass(G1, manifold, collar, t, breaks_radii=breaks_radii)
    _, m2, _ = boundary_pairing_mass(G2, manifold, collar, t, breaks_radii=breaks_radii)
    return abs(m1 - m2)


def normal_trace_ext(mu: CurlMeasure, region: SolidRegion,
                     testfn: ScalarTestFunction) -> float:
    """Normal trace pairing of a divergence-free measure: -int grad(phi) . dmu."""
    return -float(np.sum(integrate_measure(mu, testfn.gradient, region)))


@dataclass(frozen=True)
class SolidLocalizer:
    """Lipschitz extension of the manifold ramp localizer into the region.

    Vanishes at depth > width; equals the boundary ramp value on the face.
    Built from the region's transversal collar feet, so the normal-trace
    pairing below sees a legitimate extension.
    """

    region: SolidRegion
    collar: TransversalCollar
    face: BoundaryManifold
    tangential: TangentialCollar
    t: float
    delta: float
    width: float

    def value(self, x: np.ndarray) -> np.ndarray:
        from .testfns import cutoff_profile
        x = np.atleast_2d(x)
        slide = self.collar.slide_for(self.face.patch)
        depth = slide.slab_coordinate(x)
        inward = -slide.outward_field(x)
        foot = x - depth[:, None] * inward
        ramp = self._face_ramp(foot)
        prof = cutoff_profile(np.clip(depth, 0.0, None) / self.width)
        prof = np.where(depth < 0.0, 0.0, prof)
        return prof * ramp

    def _face_ramp(self, foot: np.ndarray) -> np.ndarray:
        if self.tangential.empty:
            return np.ones(foot.shape[0])
        center = self.face.meta["center"]
        radius = self.face.meta["radius"]
        rel = np.atleast_2d(foot) - center
        _, _, n = self.face.meta["frame"]
        rel = rel - np.outer(rel @ n, n)
        rho = np.linalg.norm(rel, axis=1)
        s = 1.0 - rho / radius
        return np.clip((s - self.t) / self.delta, 0.0, 1.0)

    def gradient(self, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
        x = np.atleast_2d(x)
        out = np.zeros_like(x)
        for k in range(3):
            e = np.zeros(3)
            e[k] = h
            out[:, k] = (self.value(x + e) - self.value(x - e)) / (2.0 * h)
        return out


def _support_subdisk(patch, phi: ScalarTestFunction, singular_point=None):
    """Disk sub-patch covering the in-plane support of a bump test function;
    None when not applicable.

    Centered at the test function's support unless a singular point of the
    integrand lies on the patch, in which case the polar rule is centered
    there so its area element absorbs the singularity.
    """
    if patch.name != "disk" or getattr(phi, "support", None) is None:
        return None
    from .geometry import disk_patch
    center, radius = np.asarray(phi.support[0], float), float(phi.support[1])
    uv0 = patch.rule.nodes[:1]
    n = patch.normal(uv0)[0]
    ref = patch.param(np.array([[0.0, 0.0]]))[0]
    proj = center - ((center - ref) @ n) * n
    if singular_point is None:
        breaks = tuple(getattr(phi, "support_breaks", ()))
        return disk_patch(proj, radius, n, order=12, n_angular=48,
                          radial_breaks=breaks)
    sing = np.asarray(singular_point, float)
    sing = sing - ((sing - ref) @ n) * n
    rad = float(np.linalg.norm(proj - sing)) + radius
    return disk_patch(sing, rad, n, order=16, n_angular=96)


def vorticity_flux_cm1(mu: CurlMeasure, fld: VectorField, region: SolidRegion,
                       manifold: BoundaryManifold, collar: TangentialCollar,
                       t: float, G_pieces: Sequence[tuple],
                       dictionary: Sequence[ScalarTestFunction],
                       validate_tol: float = 1e-4,
                       breaks_radii: Sequence[float] = ()) -> dict:
    """Vorticity flux by the integrable-representative mass route.

    `G_pieces` lists (patch, values) pairs representing G on the boundary
    patches where the test dictionary is supported. The representative is
    validated by matching divergence pairings of the distributional trace on
    the dictionary; the flux is cross-checked against the localizer extension
    of the normal trace.
    """
    sing = None
    if fld.singular_set is not None and fld.singular_set.kind in ("point", "line"):
        sing = fld.singular_set.point
    worst = 0.0
    for phi in dictionary:
        lhs = 0.0
        for patch, values in G_pieces:
            quad_patch = _support_subdisk(patch, phi, singular_point=sing) or patch
            nu0 = quad_patch.normal(quad_patch.rule.nodes)

            def integrand(pts, values=values, nu=nu0):
                g = np.atleast_2d(phi.gradient(pts))
                gt = g - np.einsum("ij,ij->i", g, nu)[:, None] * nu
                return np.einsum("ij,ij->i", gt, np.atleast_2d(values(pts)))

            lhs += surface_integral(quad_patch, integrand)
        rhs = float(np.sum(integrate_measure(mu, phi.gradient, region)))
        worst = max(worst, abs(-lhs - (-rhs)))
    if worst > validate_tol:
        raise StokesRefusal(
            f"representative fails the divergence pairing validation ({worst:.2e})")

    face_values = next((v for p, v in G_pieces if p is manifold.patch), G_pieces[0][1])
    _, mass, diag = boundary_pairing_mass(face_values, manifold, collar, t,
                                          breaks_radii=breaks_radii)

    tcollar = None
    crosscheck = None
    try:
        from .geometry import build_transversal_collar
        tcollar = build_transversal_collar(region)
        loc = SolidLocalizer(region, tcollar, manifold, collar, t,
                             delta=2.0 ** -8, width=0.05)
        probe = ScalarTestFunction(loc.value, loc.gradient, "solid_localizer")
        crosscheck = normal_trace_ext(mu, region, probe)
    except GeometryError:
        pass
    return {"flux": mass, "validation_residual": worst,
            "crosscheck": crosscheck, "diagnostics": diag}


# ---------------------------------------------------------------------------
# smooth validators, field-theory face check, jump conditions
# ---------------------------------------------------------------------------


def smooth_validators(fld: VectorField, region: SolidRegion,
                      phi: ScalarTestFunction, other: VectorTestField) -> dict:
    """Residuals of the four Gauss-Green-type identities on a region with
    inner normals; both sides by quadrature."""
    if fld.analytic_curl is None:
        raise StokesRefusal("smooth validators need the analytic curl")

    def bd_vec(values):
        total = np.zeros(3)
        for patch in region.boundary:
            uv = patch.rule.nodes
            pts = patch.param(uv)
            nu = patch.normal(uv)
            w = patch.rule.weights * patch.metric_jacobian(uv)
            total = total + np.tensordot(w, values(pts, nu), axes=(0, 0))
        return total

    def bd_scalar(values):
        total = 0.0
        for patch in region.boundary:
            uv = patch.rule.nodes
            pts = patch.param(uv)
            nu = patch.normal(uv)
            w = patch.rule.weights * patch.metric_jacobian(uv)
            total += float(np.sum(w * values(pts, nu)))
        return total

    vol_curl = volume_integral(region, fld.analytic_curl)
    d1 = np.linalg.norm(vol_curl - bd_vec(lambda p, nu: np.cross(fld.eval(p), nu)))

    lhs2 = volume_integral(region, lambda x: phi.value(x)[:, None] * fld.analytic_curl(x)
                           - np.cross(fld.eval(x), phi.gradient(x)))
    rhs2 = bd_vec(lambda p, nu: phi.value(p)[:, None] * np.cross(fld.eval(p), nu))
    d2 = np.linalg.norm(lhs2 - rhs2)

    lhs3 = bd_scalar(lambda p, nu: np.einsum(
        "ij,ij->i", np.cross(fld.eval(p), other.value(p)), nu))
    rhs3 = volume_integral(region, lambda x: np.einsum("ij,ij->i", fld.eval(x), other.curl(x))) \
        - volume_integral(region, lambda x: np.einsum("ij,ij->i", fld.analytic_curl(x),
                                                      other.value(x)))
    d3 = abs(lhs3 - rhs3)

    lhs4 = bd_scalar(lambda p, nu: np.einsum(
        "ij,ij->i", np.cross(fld.eval(p), nu), other.value(p)))
    rhs4 = volume_integral(region, lambda x: np.einsum("ij,ij->i", fld.analytic_curl(x),
                                                       other.value(x))) \
        - volume_integral(region, lambda x: np.einsum("ij,ij->i", fld.eval(x), other.curl(x)))
    d4 = abs(lhs4 - rhs4)
    return {"D1": float(d1), "D2": float(d2), "D3": float(d3), "D4": float(d4)}


def faraday_face_check(E: VectorField, dH_dt, face: BoundaryManifold) -> float:
    """|circulation-route flux of curl E + flux of dH/dt| through a face.

    The circulation route is -loop integral of E . tau with tau induced by
    the face orientation; for an exact field pair the two fluxes cancel.
    """
    s = face.boundary.rule.nodes
    tau = face.tangent(s)
    circ = float(np.sum(face.boundary.rule.weights * face.boundary.speed(s)
                        * np.einsum("ij,ij->i", E.eval(face.boundary.point(s)), tau)))
    def hdotn(pts):
        uv = face.patch.rule.nodes
        nu = face.patch.normal(uv)
        return np.einsum("ij,ij->i", np.atleast_2d(dH_dt(pts)), nu)
    flux_h = surface_integral(face.patch, hdotn)
    return abs(-circ + flux_h)


def rankine_hugoniot_check(pw: PiecewiseField, sheet_density=None) -> tuple[float, float]:
    """(max normal-jump, max tangential-jump mismatch against the sheet density).

    The tangential jump is measured as (u+ - u-) x nu with nu pointing away
    from the plus side, matching the sheet part of the distributional curl.
    """
    pts = pw.interface.points()
    tp, tm = pw.one_sided_traces(pts)
    res_n = float(np.max(np.abs((tp - tm) @ pw.plane_normal)))
    omega = (sheet_density or pw.jump_density)(pts)
    jump_tau = np.cross(tp - tm, -pw.plane_normal)
    res_t = float(np.max(np.linalg.norm(jump_tau - omega, axis=1)))
    return res_n, res_t
