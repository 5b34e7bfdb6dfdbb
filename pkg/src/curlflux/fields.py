"""Vector fields with measure-valued curl: the closed-form catalog, piecewise
glued fields, curl-measure decomposition, and measure integration.

Every catalog entry carries its exact curl decomposition (Lebesgue density,
sheet parts on flat patches, line parts on straight segments) plus, where the
trace on the canonical z-plane faces has a closed form, that trace as well.
Singular sets are declared, never detected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .geometry import (
    GeometryError,
    SolidRegion,
    SurfacePatch,
    disk_patch,
    surface_integral,
    volume_integral,
)
from .quadrature import gauss_legendre, gauss_legendre_split

Array = np.ndarray


class FieldError(ValueError):
    pass


# ---------------------------------------------------------------------------
# singular sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SingularSet:
    """Declared singular locus for quadrature exclusion: point, line, or sheet."""

    kind: str  # "point" | "line" | "sheet"
    point: Array = field(default_factory=lambda: np.zeros(3))
    direction: Array = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def distance(self, x: Array) -> Array:
        x = np.atleast_2d(x)
        rel = x - self.point
        if self.kind == "point":
            return np.linalg.norm(rel, axis=1)
        if self.kind == "line":
            along = rel @ self.direction
            return np.linalg.norm(rel - np.outer(along, self.direction), axis=1)
        if self.kind == "sheet":
            return np.abs(rel @ self.direction)
        raise FieldError(f"unknown singular set kind {self.kind!r}")


# ---------------------------------------------------------------------------
# vector fields and curl measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VectorField:
    eval: Callable[[Array], Array]  # (n,3) -> (n,3)
    analytic_curl: Optional[Callable[[Array], Array]] = None
    integrability: str = "inf"  # exponent tag
    singular_set: Optional[SingularSet] = None
    label: str = ""

    def __call__(self, x: Array) -> Array:
        return self.eval(np.atleast_2d(x))


@dataclass(frozen=True)
class LinePart:
    """Vector line measure on a straight segment: density * H^1 restricted to it."""

    point: Array
    direction: Array  # unit
    lo: float
    hi: float
    density: Callable[[Array], Array]  # points on the line -> (n,3)

    def positions(self, s: Array) -> Array:
        return self.point + np.outer(np.atleast_1d(s), self.direction)

    def clipped(self, region: SolidRegion) -> tuple[float, float]:
        return clip_segment(region, self.point, self.direction, self.lo, self.hi)

    def pair(self, testvec, lo: float, hi: float, order: int = 8,
             panels: int = 24) -> Array:
        # composite rule: kinks of piecewise-polynomial test profiles cost only
        # O(panel_width^3) instead of polluting a single global rule
        if hi <= lo:
            return np.zeros(3)
        edges = np.linspace(lo, hi, panels + 1)
        rule = gauss_legendre_split(order, edges)
        pts = self.positions(rule.nodes)
        dens = np.atleast_2d(self.density(pts))
        vals = np.atleast_2d(testvec(pts))
        return np.tensordot(rule.weights, dens * vals, axes=(0, 0))


@dataclass(frozen=True)
class SheetPart:
    """Vector surface measure: density * H^2 restricted to a patch."""

    patch: SurfacePatch
    density: Callable[[Array], Array]

    def pair(self, testvec, region: Optional[SolidRegion] = None) -> Array:
        uv = self.patch.rule.nodes
        pts = self.patch.param(uv)
        w = self.patch.rule.weights * self.patch.metric_jacobian(uv)
        if region is not None:
            w = w * region.contains(pts).astype(float)
        vals = np.atleast_2d(self.density(pts)) * np.atleast_2d(testvec(pts))
        return np.tensordot(w, vals, axes=(0, 0))


@dataclass(frozen=True)
class CurlMeasure:
    """Decomposition of a curl measure into Lebesgue, sheet, and line parts."""

    lebesgue_density: Optional[Callable[[Array], Array]] = None
    sheet_parts: tuple[SheetPart, ...] = ()
    line_parts: tuple[LinePart, ...] = ()

    @property
    def is_zero(self) -> bool:
        return (self.lebesgue_density is None and not self.sheet_parts
                and not self.line_parts)


ZERO_MEASURE = CurlMeasure()


def clip_segment(region: SolidRegion, point: Array, direction: Array,
                 lo: float, hi: float) -> tuple[float, float]:
    """Exact parameter interval of segment point + s*direction inside a canonical region."""
    p = np.asarray(point, dtype=float)
    d = np.asarray(direction, dtype=float)
    c = region.meta.get("center", region.ambient_center)
    rel = p - c
    if region.name == "ball":
        R = region.meta["radius"]
        b = rel @ d
        cc = rel @ rel - R * R
        disc = b * b - cc
        if disc <= 0:
            return 0.0, 0.0
        s0, s1 = -b - np.sqrt(disc), -b + np.sqrt(disc)
        return max(lo, s0), min(hi, s1)
    if region.name == "half_ball":
        R = region.meta["radius"]
        b = rel @ d
        cc = rel @ rel - R * R
        disc = b * b - cc
        if disc <= 0:
            return 0.0, 0.0
        s0, s1 = -b - np.sqrt(disc), -b + np.sqrt(disc)
        if abs(d[2]) > 1e-15:
            s_face = -rel[2] / d[2]
            if d[2] > 0:
                s0 = max(s0, s_face)
            else:
                s1 = min(s1, s_face)
        elif rel[2] <= 0:
            return 0.0, 0.0
        return max(lo, s0), min(hi, s1)
    if region.name == "cylinder":
        R, z0, z1 = region.meta["radius"], region.meta["z0"], region.meta["z1"]
        s0, s1 = lo, hi
        dxy = d.copy()
        dxy[2] = 0.0
        rxy = rel.copy()
        rxy[2] = 0.0
        a = dxy @ dxy
        if a > 1e-30:
            b = rxy @ dxy
            cc = rxy @ rxy - R * R
            disc = b * b - a * cc
            if disc <= 0:
                return 0.0, 0.0
            s0 = max(s0, (-b - np.sqrt(disc)) / a)
            s1 = min(s1, (-b + np.sqrt(disc)) / a)
        elif rxy @ rxy >= R * R:
            return 0.0, 0.0
        if abs(d[2]) > 1e-15:
            sa, sb = (z0 - rel[2]) / d[2], (z1 - rel[2]) / d[2]
            s0 = max(s0, min(sa, sb))
            s1 = min(s1, max(sa, sb))
        elif not (z0 < rel[2] < z1):
            return 0.0, 0.0
        return s0, s1
    if region.name == "box":
        h = region.meta["half_widths"]
        s0, s1 = lo, hi
        for k in range(3):
            if abs(d[k]) > 1e-15:
                sa, sb = (-h[k] - rel[k]) / d[k], (h[k] - rel[k]) / d[k]
                s0 = max(s0, min(sa, sb))
                s1 = min(s1, max(sa, sb))
            elif abs(rel[k]) >= h[k]:
                return 0.0, 0.0
        return s0, s1
    raise GeometryError(f"segment clipping not implemented for region {region.name!r}")


def integrate_measure(mu: CurlMeasure, testvec, region: SolidRegion) -> Array:
    """Pairing of a curl measure against a vector test function over a region.

    Lebesgue part by volume quadrature, sheet parts by masked surface
    quadrature, line parts by exact segment clipping.
    """
    out = np.zeros(3)
    if mu.lebesgue_density is not None:
        out = out + volume_integral(
            region, lambda x: np.atleast_2d(mu.lebesgue_density(x)) * np.atleast_2d(testvec(x)))
    for sp in mu.sheet_parts:
        out = out + sp.pair(testvec, region)
    for lp in mu.line_parts:
        lo, hi = lp.clipped(region)
        out = out + lp.pair(testvec, lo, hi)
    return out


def measure_total_variation(mu: CurlMeasure, region: SolidRegion) -> float:
    total = 0.0
    if mu.lebesgue_density is not None:
        total += volume_integral(
            region, lambda x: np.linalg.norm(np.atleast_2d(mu.lebesgue_density(x)), axis=1))
    for sp in mu.sheet_parts:
        uv = sp.patch.rule.nodes
        pts = sp.patch.param(uv)
        w = sp.patch.rule.weights * sp.patch.metric_jacobian(uv)
        w = w * region.contains(pts).astype(float)
        total += float(np.sum(w * np.linalg.norm(np.atleast_2d(sp.density(pts)), axis=1)))
    for lp in mu.line_parts:
        lo, hi = lp.clipped(region)
        if hi > lo:
            rule = gauss_legendre(48, lo, hi)
            dens = np.atleast_2d(lp.density(lp.positions(rule.nodes)))
            total += float(np.sum(rule.weights * np.linalg.norm(dens, axis=1)))
    return float(total)


def numeric_curl(fld: VectorField, x, h: float = 1e-3) -> Array:
    """Central-difference curl at a point; O(h^2) at smooth points."""
    x = np.asarray(x, dtype=float).reshape(3)
    if fld.singular_set is not None and fld.singular_set.distance(x[None, :])[0] <= 2.0 * h:
        raise FieldError("difference stencil touches the declared singular set")
    eye = np.eye(3)
    J = np.zeros((3, 3))  # J[i, j] = d F_i / d x_j
    for j in range(3):
        fp = fld.eval((x + h * eye[j])[None, :])[0]
        fm = fld.eval((x - h * eye[j])[None, :])[0]
        J[:, j] = (fp - fm) / (2.0 * h)
    return np.array([J[2, 1] - J[1, 2], J[0, 2] - J[2, 0], J[1, 0] - J[0, 1]])


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    vector_field: VectorField
    curl: Optional[CurlMeasure]
    trace_z_plane: Optional[Callable[[Array], Array]] = None  # interior trace on z-plane faces, nu=+e3
    trace_breaks_radii: tuple[float, ...] = ()
    extras: dict = field(default_factory=dict)


CATALOG_NAMES = ("newtonian", "line_vortex", "annuli", "rigid_rotation",
                 "oscillating_gradient", "plane_wave_em")

LINE_EXTENT = 8.0  # declared extent of the axis filament carrying the line measure


def alternation_profile(rho: Array) -> Array:
    """+1/-1 on the dyadic annuli (1-2^-k, 1-2^-(k+1)), k >= 1; zero elsewhere."""
    rho = np.asarray(rho, dtype=float)
    out = np.zeros_like(rho)
    inside = (rho > 0.5) & (rho < 1.0)
    k = np.floor(-np.log2(np.maximum(1.0 - rho[inside], 1e-300))).astype(int)
    out[inside] = np.where(k % 2 == 1, 1.0, -1.0)
    return out


def alternation_radii(levels: int = 40) -> tuple[float, ...]:
    return tuple(1.0 - 2.0 ** (-k) for k in range(1, levels + 1))


def catalog(name: str, profile: Optional[Callable] = None) -> CatalogEntry:
    """Closed-form fields with exact curl measures and z-plane traces."""
    if name == "newtonian":
        def ev(x):
            x = np.atleast_2d(x)
            r3 = np.linalg.norm(x, axis=1) ** 3
            return -x / (4.0 * np.pi * r3[:, None])

        def trace(pts):
            # F x e3 on a z-plane through the singular point's altitude
            pts = np.atleast_2d(pts)
            r3 = np.linalg.norm(pts, axis=1) ** 3
            out = np.stack([pts[:, 1], -pts[:, 0], np.zeros(len(pts))], axis=1)
            return -out / (4.0 * np.pi * r3[:, None])

        vf = VectorField(ev, analytic_curl=lambda x: np.zeros_like(np.atleast_2d(x)),
                         integrability="p<3/2", singular_set=SingularSet("point"),
                         label="newtonian")
        return CatalogEntry(name, vf, ZERO_MEASURE, trace_z_plane=trace)

    if name == "line_vortex":
        def ev(x):
            x = np.atleast_2d(x)
            rho2 = x[:, 0] ** 2 + x[:, 1] ** 2
            return np.stack([-x[:, 1] / rho2, x[:, 0] / rho2, x[:, 2]], axis=1) / (2.0 * np.pi)

        def trace(pts):
            # (F x e3) = (x, y, 0) / (2 pi rho^2) on any z-plane
            pts = np.atleast_2d(pts)
            rho2 = pts[:, 0] ** 2 + pts[:, 1] ** 2
            out = np.stack([pts[:, 0], pts[:, 1], np.zeros(len(pts))], axis=1)
            return out / (2.0 * np.pi * rho2[:, None])

        line = LinePart(np.zeros(3), np.array([0.0, 0.0, 1.0]), -LINE_EXTENT, LINE_EXTENT,
                        lambda pts: np.broadcast_to(np.array([0.0, 0.0, 1.0]),
                                                    (np.atleast_2d(pts).shape[0], 3)).copy())
        vf = VectorField(ev, analytic_curl=lambda x: np.zeros_like(np.atleast_2d(x)),
                         integrability="p<2", singular_set=SingularSet("line"),
                         label="line_vortex")
        return CatalogEntry(name, vf, CurlMeasure(line_parts=(line,)), trace_z_plane=trace)

    if name == "annuli":
        def surface_data(x):
            x = np.atleast_2d(x)
            rho = np.hypot(x[:, 0], x[:, 1])
            eta = alternation_profile(rho)
            safe = np.where(rho == 0.0, 1.0, rho)
            return (eta / safe)[:, None] * np.stack([x[:, 1], -x[:, 0],
                                                     np.zeros(len(x))], axis=1)

        def trace(pts):
            # g x e3 = -(eta/rho) (x, y, 0)
            pts = np.atleast_2d(pts)
            rho = np.hypot(pts[:, 0], pts[:, 1])
            eta = alternation_profile(rho)
            safe = np.where(rho == 0.0, 1.0, rho)
            return -(eta / safe)[:, None] * np.stack([pts[:, 0], pts[:, 1],
                                                      np.zeros(len(pts))], axis=1)

        # a bounded extension of the boundary data, constant across the face plane;
        # its one-sided limits on z = 0 reproduce the declared data
        vf = VectorField(lambda x: surface_data(x), analytic_curl=None,
                         integrability="inf", singular_set=None, label="annuli")
        return CatalogEntry(name, vf, None, trace_z_plane=trace,
                            trace_breaks_radii=alternation_radii())

    if name == "rigid_rotation":
        def ev(x):
            x = np.atleast_2d(x)
            return np.stack([-x[:, 1], x[:, 0], np.zeros(len(x))], axis=1)

        def trace(pts):
            # F x e3 = (x, y, 0)
            pts = np.atleast_2d(pts)
            return np.stack([pts[:, 0], pts[:, 1], np.zeros(len(pts))], axis=1)

        const = np.array([0.0, 0.0, 2.0])
        vf = VectorField(ev, analytic_curl=lambda x: np.broadcast_to(
            const, (np.atleast_2d(x).shape[0], 3)).copy(), integrability="inf",
            label="rigid_rotation")
        mu = CurlMeasure(lebesgue_density=lambda x: np.broadcast_to(
            const, (np.atleast_2d(x).shape[0], 3)).copy())
        return CatalogEntry(name, vf, mu, trace_z_plane=trace)

    if name == "oscillating_gradient":
        def stripe_sign(z):
            z = np.asarray(z, dtype=float)
            out = np.zeros_like(z)
            inside = (z > 0.0) & (z < 0.5)
            k = np.floor(-np.log2(np.maximum(z[inside], 1e-300))).astype(int)
            out[inside] = np.where(k % 2 == 0, 1.0, -1.0)
            out[z >= 0.5] = 1.0
            return out

        def ev(x):
            x = np.atleast_2d(x)
            return np.stack([np.zeros(len(x)), np.zeros(len(x)),
                             stripe_sign(x[:, 2])], axis=1)

        def trace(pts):
            return np.zeros_like(np.atleast_2d(pts))

        vf = VectorField(ev, analytic_curl=lambda x: np.zeros_like(np.atleast_2d(x)),
                         integrability="inf", label="oscillating_gradient")
        return CatalogEntry(name, vf, ZERO_MEASURE, trace_z_plane=trace,
                            extras={"div_variation": "unbounded"})

    if name == "plane_wave_em":
        f = profile or np.sin
        df = (lambda u: np.cos(u)) if profile is None else extras_derivative(profile)

        def ev(x):
            x = np.atleast_2d(x)
            return np.stack([np.zeros(len(x)), f(x[:, 0]), np.zeros(len(x))], axis=1)

        def crl(x):
            x = np.atleast_2d(x)
            return np.stack([np.zeros(len(x)), np.zeros(len(x)), df(x[:, 0])], axis=1)

        def h_field(x):
            x = np.atleast_2d(x)
            return np.stack([np.zeros(len(x)), np.zeros(len(x)), f(x[:, 0])], axis=1)

        def dhdt(x):
            return -crl(x)

        vf = VectorField(ev, analytic_curl=crl, integrability="inf", label="plane_wave_em")
        return CatalogEntry(name, vf, CurlMeasure(lebesgue_density=crl),
                            extras={"magnetic_field": h_field, "dH_dt": dhdt})

    raise FieldError(f"unknown catalog field {name!r}; choose one of {CATALOG_NAMES}")


def extras_derivative(profile):
    def d(u, h=1e-6):
        return (profile(u + h) - profile(u - h)) / (2.0 * h)
    return d


# ---------------------------------------------------------------------------
# piecewise fields across a flat interface (vortex sheets)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PiecewiseField:
    """Two one-sided fields glued across a flat interface patch."""

    interface: SurfacePatch
    plane_point: Array
    plane_normal: Array  # unit, pointing to the plus side
    plus_field: VectorField
    minus_field: VectorField
    trace_offset: float = 1e-6

    def side(self, x: Array) -> Array:
        return (np.atleast_2d(x) - self.plane_point) @ self.plane_normal

    def eval(self, x: Array) -> Array:
        x = np.atleast_2d(x)
        s = self.side(x)
        out = np.empty_like(x)
        plus = s > 0
        if np.any(plus):
            out[plus] = self.plus_field.eval(x[plus])
        if np.any(~plus):
            out[~plus] = self.minus_field.eval(x[~plus])
        return out

    def one_sided_traces(self, pts: Array) -> tuple[Array, Array]:
        """(plus, minus) limits at interface points, via normal offsets."""
        pts = np.atleast_2d(pts)
        h = self.trace_offset * self.plane_normal
        return self.plus_field.eval(pts + h), self.minus_field.eval(pts - h)

    def jump_density(self, pts: Array) -> Array:
        """Sheet density of the distributional curl: (tr_minus - tr_plus) x nu."""
        tp, tm = self.one_sided_traces(pts)
        return np.cross(tm - tp, self.plane_normal)


def make_vortex_sheet(u_plus: VectorField, u_minus: VectorField,
                      interface: SurfacePatch) -> tuple[PiecewiseField, CurlMeasure]:
    """Glue two one-sided fields; the curl gains a sheet part carrying the
    tangential jump of the traces."""
    uv0 = interface.rule.nodes[:1]
    n = interface.normal(uv0)[0]
    p0 = interface.param(uv0)[0]
    nrm = interface.normal(interface.rule.nodes)
    if np.max(np.linalg.norm(nrm - n, axis=1)) > 1e-12:
        raise FieldError("vortex sheet interface must be a flat patch")
    pw = PiecewiseField(interface, p0 - ((p0 - interface.param(uv0)[0]) @ n) * n, n,
                        u_plus, u_minus)

    sheet = SheetPart(interface, pw.jump_density)
    parts_lebesgue = None
    if u_plus.analytic_curl is not None or u_minus.analytic_curl is not None:
        def interior_curl(x):
            x = np.atleast_2d(x)
            s = pw.side(x)
            out = np.zeros_like(x)
            plus = s > 0
            if u_plus.analytic_curl is not None and np.any(plus):
                out[plus] = u_plus.analytic_curl(x[plus])
            if u_minus.analytic_curl is not None and np.any(~plus):
                out[~plus] = u_minus.analytic_curl(x[~plus])
            return out
        parts_lebesgue = interior_curl
    mu = CurlMeasure(lebesgue_density=parts_lebesgue, sheet_parts=(sheet,))
    return pw, mu


def gluing_total_variation(pw: PiecewiseField, region: SolidRegion) -> float:
    """|curl| of the glued field over a region: interior parts plus the
    integrated magnitude of the tangential trace jump across the interface."""
    total = 0.0
    for fld, sign in ((pw.plus_field, 1.0), (pw.minus_field, -1.0)):
        if fld.analytic_curl is None:
            continue
        def dens(x, fld=fld, sign=sign):
            mags = np.linalg.norm(np.atleast_2d(fld.analytic_curl(x)), axis=1)
            side = pw.side(x)
            mask = side > 0 if sign > 0 else side < 0
            return mags * mask.astype(float)
        total += volume_integral(region, dens)
    total += surface_integral(pw.interface,
                              lambda pts: np.linalg.norm(pw.jump_density(pts), axis=1))
    return float(total)


# ---------------------------------------------------------------------------
# mollification
# ---------------------------------------------------------------------------


def _poly_bump_weights(delta: float, order: int = 10, n_angular: int = 16):
    """Nodes/weights of the radially symmetric polynomial bump c (1-|y/d|^2)^4
    on the ball of radius delta, normalized to unit mass by the same rule."""
    from .quadrature import periodic_trapezoid, tensor_product_3d
    rr = gauss_legendre(order, 0.0, delta)
    ru = gauss_legendre(order, -1.0, 1.0)
    rp = periodic_trapezoid(n_angular)
    rule = tensor_product_3d(rr, ru, rp)
    r, u, phi = rule.nodes[:, 0], rule.nodes[:, 1], rule.nodes[:, 2]
    st = np.sqrt(np.clip(1.0 - u * u, 0.0, None))
    pts = np.stack([r * st * np.cos(phi), r * st * np.sin(phi), r * u], axis=1)
    w = rule.weights * r * r * (1.0 - (r / delta) ** 2) ** 4
    return pts, w / np.sum(w)


def mollify(fld: VectorField, delta: float, order: int = 10) -> VectorField:
    """Convolution with a radially symmetric polynomial bump at scale delta.

    Evaluation is by quadrature per point; exact for fields polynomial in x.
    """
    if delta <= 0:
        raise FieldError("mollification scale must be positive")
    offs, w = _poly_bump_weights(delta, order)

    def ev(x):
        x = np.atleast_2d(x)
        out = np.empty_like(x)
        for i, xi in enumerate(x):
            out[i] = np.tensordot(w, fld.eval(xi - offs), axes=(0, 0))
        return out

    return VectorField(ev, analytic_curl=None, integrability=fld.integrability,
                       singular_set=None, label=f"mollified({fld.label},{delta:g})")


def mollified_measure_density(mu: CurlMeasure, delta: float, order: int = 10):
    """Lebesgue density of the mollified curl measure (bump convolved with mu)."""
    from .quadrature import periodic_trapezoid

    def norm_const(d):
        rr = gauss_legendre(32, 0.0, d)
        mass = np.sum(rr.weights * rr.nodes ** 2 * (1.0 - (rr.nodes / d) ** 2) ** 4) * 4.0 * np.pi
        return 1.0 / mass

    c = norm_const(delta)

    def bump(r):
        v = np.clip(1.0 - (r / delta) ** 2, 0.0, None)
        return c * v ** 4

    def density(x):
        x = np.atleast_2d(x)
        out = np.zeros_like(x)
        for lp in mu.line_parts:
            for i, xi in enumerate(x):
                # the bump only sees the segment within delta of the target
                s_mid = (xi - lp.point) @ lp.direction
                lo = max(lp.lo, s_mid - delta)
                hi = min(lp.hi, s_mid + delta)
                if hi <= lo:
                    continue
                rule = gauss_legendre(24, lo, hi)
                pts = lp.positions(rule.nodes)
                dens = np.atleast_2d(lp.density(pts))
                r = np.linalg.norm(xi - pts, axis=1)
                out[i] += np.tensordot(rule.weights * bump(r), dens, axes=(0, 0))
        for sp in mu.sheet_parts:
            uv = sp.patch.rule.nodes
            pts = sp.patch.param(uv)
            w = sp.patch.rule.weights * sp.patch.metric_jacobian(uv)
            dens = np.atleast_2d(sp.density(pts))
            for i, xi in enumerate(x):
                r = np.linalg.norm(xi - pts, axis=1)
                out[i] += np.tensordot(w * bump(r), dens, axes=(0, 0))
        if mu.lebesgue_density is not None:
            offs, w = _poly_bump_weights(delta, order)
            for i, xi in enumerate(x):
                out[i] += np.tensordot(w, np.atleast_2d(mu.lebesgue_density(xi - offs)),
                                       axes=(0, 0))
        return out

    return density


def unit_disk_interface(order: int = 24, n_angular: int = 96) -> SurfacePatch:
    """Unit disk in the z=0 plane oriented by +e3 (plus side above)."""
    return disk_patch((0.0, 0.0, 0.0), 1.0, (0.0, 0.0, 1.0), order, n_angular)


def constant_field(vec) -> VectorField:
    vec = np.asarray(vec, dtype=float)
    return VectorField(lambda x: np.broadcast_to(vec, (np.atleast_2d(x).shape[0], 3)).copy(),
                       analytic_curl=lambda x: np.zeros_like(np.atleast_2d(x)),
                       label=f"const{tuple(vec)}")
