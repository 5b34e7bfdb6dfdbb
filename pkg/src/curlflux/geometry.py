"""Parametrized surface patches, boundary curves, collar maps, localizer ramps,
solid regions with volume rules, and the boundary-to-volume extension operator.

All shapes are closed-form parametrizations (no meshes); collar maps for the
canonical catalog (disk, spherical cap, sphere, cylinder side, planar faces)
are exact, which keeps the localizer-limit computations free of mesh noise.
Conventions fixed once and used everywhere:

* regions carry the *inner* unit normal on their boundary;
* the conormal nu_gamma of a boundary curve points *into* the surface;
* the curve tangent is tau = nu_sigma x nu_gamma (right-hand rule).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .quadrature import (
    QuadratureRule,
    gauss_legendre,
    gauss_legendre_split,
    periodic_trapezoid,
    tensor_product,
    tensor_product_3d,
)

POSITION_TOL = 1e-9  # "lies on patch" node tolerance, absolute

DEFAULT_ORDER = 24
DEFAULT_ANGULAR = 96


def _unit(v, axis=-1):
    n = np.linalg.norm(v, axis=axis, keepdims=True)
    return v / np.where(n == 0.0, 1.0, n)


def frame_from_normal(normal) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Right-handed orthonormal frame (e1, e2, n) with n the given direction."""
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    a = np.array([0.0, 0.0, 1.0]) if abs(n[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(a, n)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return e1, e2, n


class GeometryError(ValueError):
    pass


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Curve:
    """Closed (or degenerate) parametrized curve with arclength weights."""

    point: Callable[[np.ndarray], np.ndarray]  # (n,) params -> (n,3)
    speed: Callable[[np.ndarray], np.ndarray]  # |gamma'(s)|
    rule: QuadratureRule
    closed: bool = True

    @property
    def nodes(self) -> np.ndarray:
        return self.point(self.rule.nodes)

    def length(self) -> float:
        return float(np.sum(self.rule.weights * self.speed(self.rule.nodes)))

    def integrate(self, integrand) -> float | np.ndarray:
        s = self.rule.nodes
        vals = np.asarray(integrand(self.point(s)))
        w = self.rule.weights * self.speed(s)
        if vals.ndim == 1:
            return float(np.sum(w * vals))
        return np.tensordot(w, vals, axes=(0, 0))


def circle_curve(center, radius: float, e1, e2, n_nodes: int = DEFAULT_ANGULAR) -> Curve:
    center = np.asarray(center, dtype=float)
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)

    def point(s):
        s = np.atleast_1d(s)
        return center + radius * (np.cos(s)[:, None] * e1 + np.sin(s)[:, None] * e2)

    def speed(s):
        return np.full(np.atleast_1d(s).shape, float(radius))

    return Curve(point, speed, periodic_trapezoid(n_nodes), closed=True)


def arc_curve(center, radius: float, e1, e2, angle_lo: float, angle_hi: float,
              n_nodes: int = 48) -> Curve:
    """Circular arc with a Gauss-Legendre rule; for window-localized integrands."""
    center = np.asarray(center, dtype=float)
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)

    def point(s):
        s = np.atleast_1d(s)
        return center + radius * (np.cos(s)[:, None] * e1 + np.sin(s)[:, None] * e2)

    def speed(s):
        return np.full(np.atleast_1d(s).shape, float(radius))

    return Curve(point, speed, gauss_legendre(n_nodes, angle_lo, angle_hi), closed=False)


def empty_curve() -> Curve:
    """Zero-length placeholder for boundaryless (closed) surfaces."""
    rule = QuadratureRule(np.array([0.0]), np.array([1.0]), order=0)
    return Curve(lambda s: np.zeros((np.atleast_1d(s).size, 3)),
                 lambda s: np.zeros(np.atleast_1d(s).shape), rule, closed=True)


def line_integral(curve: Curve, integrand) -> float | np.ndarray:
    """Arclength integral of a pointwise integrand over a curve."""
    vals = curve.integrate(integrand)
    arr = np.atleast_1d(np.asarray(vals, dtype=float))
    if not np.all(np.isfinite(arr)):
        raise GeometryError("non-finite line integrand")
    return vals


# ---------------------------------------------------------------------------
# surface patches
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SurfacePatch:
    """Parametrized patch (u, v) -> R^3 with unit normal and area element.

    `metric_jacobian` is |X_u x X_v| in the patch parameters, so a surface
    integral is sum(w * f(X(u)) * jac(u)) over the rule nodes.
    """

    name: str
    param: Callable[[np.ndarray], np.ndarray]  # (n,2) -> (n,3)
    normal: Callable[[np.ndarray], np.ndarray]  # (n,2) -> (n,3), unit
    metric_jacobian: Callable[[np.ndarray], np.ndarray]  # (n,2) -> (n,)
    rule: QuadratureRule
    regularity: str = "C2"

    def points(self) -> np.ndarray:
        return self.param(self.rule.nodes)

    def area(self) -> float:
        return float(np.sum(self.rule.weights * self.metric_jacobian(self.rule.nodes)))

    def integrate(self, integrand) -> float | np.ndarray:
        uv = self.rule.nodes
        vals = np.asarray(integrand(self.param(uv)))
        w = self.rule.weights * self.metric_jacobian(uv)
        if vals.ndim == 1:
            return float(np.sum(w * vals))
        return np.tensordot(w, vals, axes=(0, 0))


def surface_integral(patch: SurfacePatch, integrand, rule: Optional[QuadratureRule] = None):
    """Surface integral over a patch; raises on non-finite integrand values."""
    if rule is not None:
        patch = SurfacePatch(patch.name, patch.param, patch.normal,
                             patch.metric_jacobian, rule, patch.regularity)
    uv = patch.rule.nodes
    pts = patch.param(uv)
    vals = np.asarray(integrand(pts), dtype=float)
    if not np.all(np.isfinite(vals)):
        bad = np.argwhere(~np.isfinite(np.atleast_1d(vals)))[0]
        raise GeometryError(f"non-finite surface integrand at node index {bad}")
    w = patch.rule.weights * patch.metric_jacobian(uv)
    if vals.ndim == 1:
        return float(np.sum(w * vals))
    return np.tensordot(w, vals, axes=(0, 0))


def disk_patch(center, radius: float, normal=(0.0, 0.0, 1.0),
               order: int = DEFAULT_ORDER, n_angular: int = DEFAULT_ANGULAR,
               radial_breaks: Sequence[float] = (), inner_radius: float = 0.0) -> SurfacePatch:
    """Flat disk (or annulus) in the plane through `center` with given normal.

    Polar parameters (rho, phi); Gauss-Legendre radially (split at the given
    break radii) x trapezoid in angle.
    """
    center = np.asarray(center, dtype=float)
    e1, e2, n = frame_from_normal(normal)
    bp = sorted({float(inner_radius), float(radius), *(float(b) for b in radial_breaks
                                                       if inner_radius < b < radius)})
    r_rule = gauss_legendre_split(order, np.asarray(bp))
    rule = tensor_product(r_rule, periodic_trapezoid(n_angular))

    def param(uv):
        uv = np.atleast_2d(uv)
        rho, phi = uv[:, 0], uv[:, 1]
        return center + rho[:, None] * (np.cos(phi)[:, None] * e1 + np.sin(phi)[:, None] * e2)

    def nrm(uv):
        return np.broadcast_to(n, (np.atleast_2d(uv).shape[0], 3)).copy()

    def jac(uv):
        return np.atleast_2d(uv)[:, 0]

    return SurfacePatch("disk", param, nrm, jac, rule)


def sphere_patch(center, radius: float, order: int = DEFAULT_ORDER,
                 n_angular: int = DEFAULT_ANGULAR, inner_normal: bool = True,
                 u_range=(-1.0, 1.0)) -> SurfacePatch:
    """Sphere (or cap-band) of the given radius; parameters (u, phi), u = cos(colatitude).

    The area element is R^2 du dphi exactly, so the product rule is exact for
    polynomial integrands. `inner_normal` orients nu toward the center.
    """
    center = np.asarray(center, dtype=float)
    sign = -1.0 if inner_normal else 1.0
    rule = tensor_product(gauss_legendre(order, u_range[0], u_range[1]),
                          periodic_trapezoid(n_angular))

    def param(uv):
        uv = np.atleast_2d(uv)
        u, phi = uv[:, 0], uv[:, 1]
        st = np.sqrt(np.clip(1.0 - u * u, 0.0, None))
        return center + radius * np.stack([st * np.cos(phi), st * np.sin(phi), u], axis=1)

    def nrm(uv):
        pts = param(uv)
        return sign * _unit(pts - center)

    def jac(uv):
        return np.full(np.atleast_2d(uv).shape[0], radius * radius)

    name = "sphere" if u_range == (-1.0, 1.0) else "spherical_cap"
    return SurfacePatch(name, param, nrm, jac, rule)


def spherical_cap_patch(center, radius: float, colatitude: float,
                        order: int = DEFAULT_ORDER, n_angular: int = DEFAULT_ANGULAR,
                        inner_normal: bool = True) -> SurfacePatch:
    """Cap around the +z pole: colatitude in (0, pi)."""
    return sphere_patch(center, radius, order, n_angular, inner_normal,
                        u_range=(float(np.cos(colatitude)), 1.0))


def cylinder_side_patch(center, radius: float, z0: float, z1: float,
                        order: int = DEFAULT_ORDER, n_angular: int = DEFAULT_ANGULAR,
                        inner_normal: bool = True) -> SurfacePatch:
    center = np.asarray(center, dtype=float)
    sign = -1.0 if inner_normal else 1.0
    rule = tensor_product(gauss_legendre(order, z0, z1), periodic_trapezoid(n_angular))

    def param(uv):
        uv = np.atleast_2d(uv)
        z, phi = uv[:, 0], uv[:, 1]
        return center + np.stack([radius * np.cos(phi), radius * np.sin(phi), z], axis=1)

    def nrm(uv):
        uv = np.atleast_2d(uv)
        phi = uv[:, 1]
        out = np.stack([np.cos(phi), np.sin(phi), np.zeros_like(phi)], axis=1)
        return sign * out

    def jac(uv):
        return np.full(np.atleast_2d(uv).shape[0], float(radius))

    return SurfacePatch("cylinder_side", param, nrm, jac, rule)


def rectangle_patch(corner, e1, e2, extent1: float, extent2: float, normal_sign: float = 1.0,
                    order: int = DEFAULT_ORDER) -> SurfacePatch:
    corner = np.asarray(corner, dtype=float)
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)
    n = normal_sign * np.cross(e1, e2)
    n /= np.linalg.norm(n)
    rule = tensor_product(gauss_legendre(order, 0.0, extent1), gauss_legendre(order, 0.0, extent2))

    def param(uv):
        uv = np.atleast_2d(uv)
        return corner + uv[:, 0:1] * e1 + uv[:, 1:2] * e2

    def nrm(uv):
        return np.broadcast_to(n, (np.atleast_2d(uv).shape[0], 3)).copy()

    def jac(uv):
        cr = np.linalg.norm(np.cross(e1, e2))
        return np.full(np.atleast_2d(uv).shape[0], cr)

    return SurfacePatch("rectangle", param, nrm, jac, rule)


# ---------------------------------------------------------------------------
# boundary manifolds and tangential collars
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryManifold:
    """Oriented patch with boundary curve, inward conormal and induced tangent."""

    patch: SurfacePatch
    boundary: Curve
    conormal: Callable[[np.ndarray], np.ndarray]  # curve params -> unit, points into the patch
    kind: str = "generic"
    meta: dict = field(default_factory=dict)

    def boundary_normal(self, s) -> np.ndarray:
        """Surface normal evaluated along the boundary curve."""
        return self.meta["normal_on_curve"](np.atleast_1d(s))

    def tangent(self, s) -> np.ndarray:
        """tau = nu_sigma x nu_gamma along the boundary."""
        return np.cross(self.boundary_normal(s), self.conormal(np.atleast_1d(s)))

    @property
    def closed(self) -> bool:
        return self.kind == "closed"


@dataclass(frozen=True)
class TangentialCollar:
    """Bi-Lipschitz sliding of the boundary curve into the surface.

    Layer s=0 is the boundary itself; layers foliate a neighborhood inside the
    patch. `grad_s` is the surface gradient of the collar parameter (its
    magnitude is the localizer slope per unit delta); `layer_jacobian`
    converts ds x arclength to surface area.
    """

    layer: Callable[[float], Curve]
    grad_s: Callable[[np.ndarray, float], np.ndarray]  # points, s -> (n,3)
    layer_jacobian: Callable[[float], float]
    s_max: float
    bilip: float  # fitted comparability constant, >= 1
    param_of_radius: Optional[Callable[[float], float]] = None  # shape-specific break mapping
    empty: bool = False

    def layer_distance(self, s0: float, s1: float) -> float:
        """min distance between two layer curves, sampled at the rule nodes."""
        a = self.layer(s0).nodes
        b = self.layer(s1).nodes
        d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
        return float(d.min())


def _fit_bilip(collar: TangentialCollar, n_samples: int = 6) -> float:
    ss = np.linspace(0.0, 0.45 * collar.s_max / 0.5, n_samples + 1)[: n_samples + 1]
    ss = np.linspace(0.0, min(0.45, collar.s_max * 0.9), n_samples)
    theta = 1.0
    for i in range(len(ss)):
        for j in range(i + 1, len(ss)):
            gap = abs(ss[j] - ss[i])
            if gap == 0:
                continue
            d = collar.layer_distance(ss[i], ss[j])
            if d == 0:
                continue
            theta = max(theta, d / gap, gap / d)
    return theta


def disk_manifold(center, radius: float, normal=(0.0, 0.0, 1.0), order: int = DEFAULT_ORDER,
                  n_angular: int = DEFAULT_ANGULAR, radial_breaks: Sequence[float] = ()) -> BoundaryManifold:
    """Flat disk whose boundary circle slides radially toward the center."""
    center = np.asarray(center, dtype=float)
    e1, e2, n = frame_from_normal(normal)
    patch = disk_patch(center, radius, normal, order, n_angular, radial_breaks)
    curve = circle_curve(center, radius, e1, e2, n_angular)

    def conormal(s):
        s = np.atleast_1d(s)
        return -(np.cos(s)[:, None] * e1 + np.sin(s)[:, None] * e2)

    def normal_on_curve(s):
        return np.broadcast_to(n, (np.atleast_1d(s).size, 3)).copy()

    return BoundaryManifold(patch, curve, conormal, kind="disk",
                            meta={"center": center, "radius": float(radius),
                                  "frame": (e1, e2, n), "normal_on_curve": normal_on_curve})


def spherical_cap_manifold(center, radius: float, colatitude: float,
                           order: int = DEFAULT_ORDER, n_angular: int = DEFAULT_ANGULAR,
                           inner_normal: bool = True) -> BoundaryManifold:
    """Cap around the +z pole; its boundary circle slides along meridians."""
    center = np.asarray(center, dtype=float)
    patch = spherical_cap_patch(center, radius, colatitude, order, n_angular, inner_normal)
    rim_r = radius * np.sin(colatitude)
    rim_c = center + np.array([0.0, 0.0, radius * np.cos(colatitude)])
    e1 = np.array([1.0, 0.0, 0.0])
    e2 = np.array([0.0, 1.0, 0.0])
    curve = circle_curve(rim_c, rim_r, e1, e2, n_angular)
    sign = -1.0 if inner_normal else 1.0

    def normal_on_curve(s):
        s = np.atleast_1d(s)
        pts = curve.point(s)
        return sign * _unit(pts - center)

    def conormal(s):
        # unit tangent to the sphere pointing toward the pole (decreasing colatitude)
        s = np.atleast_1d(s)
        ct, st = np.cos(colatitude), np.sin(colatitude)
        e_theta = np.stack([ct * np.cos(s), ct * np.sin(s), -st * np.ones_like(s)], axis=1)
        return -e_theta

    return BoundaryManifold(patch, curve, conormal, kind="spherical_cap",
                            meta={"center": center, "radius": float(radius),
                                  "colatitude": float(colatitude), "inner_normal": inner_normal,
                                  "normal_on_curve": normal_on_curve})


def closed_sphere_manifold(center, radius: float, order: int = DEFAULT_ORDER,
                           n_angular: int = DEFAULT_ANGULAR, inner_normal: bool = True) -> BoundaryManifold:
    patch = sphere_patch(center, radius, order, n_angular, inner_normal)
    curve = empty_curve()

    def conormal(s):
        return np.zeros((np.atleast_1d(s).size, 3))

    def normal_on_curve(s):
        return np.zeros((np.atleast_1d(s).size, 3))

    return BoundaryManifold(patch, curve, conormal, kind="closed",
                            meta={"center": np.asarray(center, dtype=float),
                                  "radius": float(radius),
                                  "normal_on_curve": normal_on_curve})


def build_tangential_collar(manifold: BoundaryManifold,
                            n_angular: int = DEFAULT_ANGULAR) -> TangentialCollar:
    """Closed-form collar for the canonical catalog shapes.

    For a closed surface (empty boundary) the collar is empty and the
    localizer degenerates to the constant 1.
    """
    if manifold.closed:
        return TangentialCollar(lambda s: empty_curve(),
                                lambda pts, s: np.zeros_like(np.atleast_2d(pts)),
                                lambda s: 0.0, s_max=1.0, bilip=1.0, empty=True)
    if manifold.boundary.length() <= 0.0:
        raise GeometryError("degenerate boundary curve")

    if manifold.kind == "disk":
        center = manifold.meta["center"]
        radius = manifold.meta["radius"]
        e1, e2, _ = manifold.meta["frame"]

        def layer(s):
            return circle_curve(center, radius * (1.0 - s), e1, e2, n_angular)

        def grad_s(pts, s):
            pts = np.atleast_2d(pts)
            rel = pts - center
            rho = _unit(rel - np.outer(rel @ np.cross(e1, e2), np.cross(e1, e2)))
            return -rho / radius

        collar = TangentialCollar(layer, grad_s, lambda s: float(radius), s_max=1.0, bilip=1.0,
                                  param_of_radius=lambda r: 1.0 - r / radius)
        return TangentialCollar(collar.layer, collar.grad_s, collar.layer_jacobian,
                                collar.s_max, _fit_bilip(collar), collar.param_of_radius)

    if manifold.kind == "spherical_cap":
        center = manifold.meta["center"]
        R = manifold.meta["radius"]
        th0 = manifold.meta["colatitude"]
        e1 = np.array([1.0, 0.0, 0.0])
        e2 = np.array([0.0, 1.0, 0.0])

        def layer(s):
            th = th0 * (1.0 - s)
            c = center + np.array([0.0, 0.0, R * np.cos(th)])
            return circle_curve(c, R * np.sin(th), e1, e2, n_angular)

        def grad_s(pts, s):
            pts = np.atleast_2d(pts)
            rel = _unit(pts - center)
            phi = np.arctan2(rel[:, 1], rel[:, 0])
            th = np.arccos(np.clip(rel[:, 2], -1.0, 1.0))
            e_theta = np.stack([np.cos(th) * np.cos(phi), np.cos(th) * np.sin(phi),
                                -np.sin(th)], axis=1)
            return -e_theta / (R * th0)

        collar = TangentialCollar(layer, grad_s, lambda s: float(R * th0), s_max=1.0, bilip=1.0)
        return TangentialCollar(collar.layer, collar.grad_s, collar.layer_jacobian,
                                collar.s_max, _fit_bilip(collar))

    raise GeometryError(f"no collar construction for manifold kind {manifold.kind!r}")


def shrink_tangential(manifold: BoundaryManifold, collar: TangentialCollar,
                      t: float) -> BoundaryManifold:
    """Remove the collar band of depth t; returns the shrunk manifold."""
    if not 0.0 <= t < 0.5:
        raise GeometryError("shrink parameter must satisfy 0 <= t < 1/2")
    if manifold.closed or t == 0.0:
        return manifold
    if manifold.kind == "disk":
        r = manifold.meta["radius"] * (1.0 - t)
        _, _, n = manifold.meta["frame"]
        return disk_manifold(manifold.meta["center"], r, n,
                             order=int(np.sqrt(manifold.patch.rule.nodes.shape[0])) or DEFAULT_ORDER)
    if manifold.kind == "spherical_cap":
        return spherical_cap_manifold(manifold.meta["center"], manifold.meta["radius"],
                                      manifold.meta["colatitude"] * (1.0 - t),
                                      inner_normal=manifold.meta["inner_normal"])
    raise GeometryError(f"cannot shrink manifold kind {manifold.kind!r}")


# ---------------------------------------------------------------------------
# localizer ramps (interior height functions)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HeightFunction:
    """Lipschitz ramp localizer: 0 outside the shrunk patch, 1 past depth t+delta,
    linear in the collar parameter on the ramp band."""

    manifold: BoundaryManifold
    collar: TangentialCollar
    t: float
    delta: float

    def value_at_parameter(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if self.collar.empty:
            return np.ones_like(s)
        return np.clip((s - self.t) / self.delta, 0.0, 1.0)

    def gradient_at_layer(self, pts: np.ndarray, s: float) -> np.ndarray:
        if self.collar.empty or not (self.t < s < self.t + self.delta):
            return np.zeros_like(np.atleast_2d(pts))
        return self.collar.grad_s(pts, s) / self.delta

    def sup_gradient(self) -> float:
        if self.collar.empty:
            return 0.0
        s_mid = self.t + 0.5 * self.delta
        pts = self.collar.layer(s_mid).nodes
        return float(np.linalg.norm(self.collar.grad_s(pts, s_mid), axis=1).max() / self.delta)


def height_function(manifold: BoundaryManifold, collar: TangentialCollar,
                    t: float, delta: float) -> HeightFunction:
    if not 0.0 <= t < 0.5:
        raise GeometryError("height function requires 0 <= t < 1/2")
    if not 0.0 < delta < 0.25:
        raise GeometryError("height function requires 0 < delta < 1/4")
    return HeightFunction(manifold, collar, t, delta)


def ramp_integral(manifold: BoundaryManifold, collar: TangentialCollar, t: float, delta: float,
                  covector_field, scalar=None, s_order: int = 8,
                  breaks: Sequence[float] = ()) -> float:
    """Integral of scalar * (field . grad ramp) over the collar band (t, t+delta).

    `covector_field` maps points (n,3) to vectors (n,3); `scalar` maps points
    to (n,). Discontinuity parameters of the integrand may be passed in
    `breaks` (collar parameter values); the band quadrature splits there.
    The band is parametrized as (s, curve), with dH^2 = layer_jacobian ds dH^1.
    """
    if collar.empty:
        return 0.0
    if not (0.0 < delta and t >= 0.0 and t + delta <= collar.s_max):
        raise GeometryError("ramp band outside collar range")
    bp = sorted({t, t + delta, *(b for b in breaks if t < b < t + delta)})
    s_rule = gauss_legendre_split(s_order, np.asarray(bp))
    total = 0.0
    for s, w in zip(s_rule.nodes, s_rule.weights):
        curve = collar.layer(s)
        pts = curve.nodes
        g = collar.grad_s(pts, s) / delta
        vals = np.einsum("ij,ij->i", np.asarray(covector_field(pts), dtype=float), g)
        if scalar is not None:
            vals = vals * np.asarray(scalar(pts), dtype=float)
        line = np.sum(curve.rule.weights * curve.speed(curve.rule.nodes) * vals)
        total += w * float(collar.layer_jacobian(s)) * line
    return float(total)


def band_area(collar: TangentialCollar, t: float, delta: float, s_order: int = 8) -> float:
    """Surface area of the collar band Psi((t, t+delta) x Gamma)."""
    if collar.empty:
        return 0.0
    s_rule = gauss_legendre(s_order, t, t + delta)
    total = 0.0
    for s, w in zip(s_rule.nodes, s_rule.weights):
        total += w * float(collar.layer_jacobian(s)) * collar.layer(s).length()
    return float(total)


def band_mass(collar: TangentialCollar, lo: float, hi: float, density,
              s_order: int = 8, breaks: Sequence[float] = ()) -> float:
    """Integral of a scalar surface density over the collar band (lo, hi)."""
    if collar.empty or hi <= lo:
        return 0.0
    lo = max(lo, 0.0)
    hi = min(hi, collar.s_max)
    if hi <= lo:
        return 0.0
    bp = sorted({lo, hi, *(b for b in breaks if lo < b < hi)})
    s_rule = gauss_legendre_split(s_order, np.asarray(bp))
    total = 0.0
    for s, w in zip(s_rule.nodes, s_rule.weights):
        curve = collar.layer(s)
        vals = np.asarray(density(curve.nodes), dtype=float)
        line = np.sum(curve.rule.weights * curve.speed(curve.rule.nodes) * vals)
        total += w * float(collar.layer_jacobian(s)) * line
    return float(total)


# ---------------------------------------------------------------------------
# boundary-to-volume extension operator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryExtension:
    """Extension of flat-face boundary data into the adjacent volume.

    value(x) = cutoff(depth/delta) * (data mollified in-plane at scale depth);
    agrees with the data on the face, vanishes at depth > delta, and carries
    a reported gradient bound of the form c (|grad_tau f| + |f|/delta).
    """

    origin: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    inward: np.ndarray
    data: Callable[[np.ndarray], np.ndarray]
    delta: float
    stencil: np.ndarray  # (m, 2) in-plane mollifier offsets at unit scale
    stencil_weights: np.ndarray

    def value(self, x: np.ndarray) -> np.ndarray:
        from .testfns import cutoff_profile
        x = np.atleast_2d(x)
        rel = x - self.origin
        depth = rel @ self.inward
        foot = x - np.outer(depth, self.inward)
        out = np.empty(x.shape[0])
        for i in range(x.shape[0]):
            d = max(depth[i], 0.0)
            if d == 0.0:
                out[i] = float(np.asarray(self.data(foot[i][None, :]))[0])
                continue
            pts = (foot[i] + d * (np.outer(self.stencil[:, 0], self.e1)
                                  + np.outer(self.stencil[:, 1], self.e2)))
            out[i] = float(self.stencil_weights @ np.asarray(self.data(pts)))
        ramp = cutoff_profile(np.clip(depth, 0.0, None) / self.delta)
        ramp = np.where(depth < 0.0, 0.0, ramp)
        return out * ramp

    def gradient(self, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
        x = np.atleast_2d(x)
        out = np.zeros_like(x)
        for k in range(3):
            e = np.zeros(3)
            e[k] = h
            out[:, k] = (self.value(x + e) - self.value(x - e)) / (2.0 * h)
        return out

    def gradient_bound_report(self, n_samples: int = 12, span: float = 0.5,
                              seed: int = 7) -> dict:
        """Measured sup |grad| against the structural bound shape."""
        rng = np.random.default_rng(seed)
        uv = span * rng.uniform(-1.0, 1.0, size=(n_samples, 2))
        depths = rng.uniform(1e-4, self.delta, size=n_samples)
        pts = (self.origin + np.outer(uv[:, 0], self.e1) + np.outer(uv[:, 1], self.e2)
               + np.outer(depths, self.inward))
        grads = np.linalg.norm(self.gradient(pts), axis=1)
        face = self.origin + np.outer(uv[:, 0], self.e1) + np.outer(uv[:, 1], self.e2)
        f_vals = np.abs(np.asarray(self.data(face)))
        h = 1e-5
        gt = []
        for d in (self.e1, self.e2):
            gt.append((np.asarray(self.data(face + h * d))
                       - np.asarray(self.data(face - h * d))) / (2.0 * h))
        grad_tau = np.hypot(*gt)
        denom = grad_tau.max() + f_vals.max() / self.delta
        return {"sup_gradient": float(grads.max()),
                "structural_bound_scale": float(denom),
                "fitted_constant": float(grads.max() / denom) if denom > 0 else 0.0}


def extend_boundary_function(face: BoundaryManifold, data, delta: float,
                             mollifier_order: int = 8,
                             sample_spacing: Optional[float] = None) -> BoundaryExtension:
    """Extend scalar data on a flat face into the volume on its inward side.

    `data` maps face points (n,3) -> (n,); alternatively pass a (points,
    values) tuple of samples, in which case the mollification stencil must be
    finer than the sample spacing or the construction is rejected.
    """
    if not 0.0 < delta < 1.0:
        raise GeometryError("extension depth must lie in (0, 1)")
    if face.kind != "disk":
        raise GeometryError("extension operator implemented for flat faces")
    e1, e2, n = face.meta["frame"]
    origin = face.meta["center"]
    if isinstance(data, tuple):
        pts_s, vals_s = data
        pts_s = np.atleast_2d(np.asarray(pts_s, dtype=float))
        vals_s = np.asarray(vals_s, dtype=float)
        spacing = sample_spacing
        if spacing is None:
            d = np.linalg.norm(pts_s[:, None, :] - pts_s[None, :, :], axis=2)
            np.fill_diagonal(d, np.inf)
            spacing = float(d.min(axis=1).max())
        # the mollifier averages over a disk of radius = depth; depths below the
        # sample spacing cannot be resolved by nearest-sample lookup
        if spacing > 0.5 * delta:
            raise GeometryError(
                f"boundary sampling (spacing {spacing:.3g}) too coarse for the "
                f"mollification stencil at depth {delta:.3g}")

        def data_fn(q):
            q = np.atleast_2d(q)
            idx = np.argmin(np.linalg.norm(q[:, None, :] - pts_s[None, :, :], axis=2),
                            axis=1)
            return vals_s[idx]
    else:
        data_fn = data

    # radially symmetric polynomial bump on the unit disk, quadrature-normalized
    rr = gauss_legendre(mollifier_order, 0.0, 1.0)
    aa = periodic_trapezoid(4 * mollifier_order)
    r, a = np.meshgrid(rr.nodes, aa.nodes, indexing="ij")
    w = np.outer(rr.weights, aa.weights) * r * (1.0 - r ** 2) ** 4
    stencil = np.stack([(r * np.cos(a)).ravel(), (r * np.sin(a)).ravel()], axis=1)
    weights = w.ravel()
    weights = weights / weights.sum()
    return BoundaryExtension(origin, e1, e2, n, data_fn, float(delta),
                             stencil, weights)


# ---------------------------------------------------------------------------
# solid regions and transversal collars
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PatchSlide:
    """Inward normal sliding of one boundary patch: Phi(t, x) = x - t h(x)."""

    patch: SurfacePatch
    shift_point: Callable[[np.ndarray, float], np.ndarray]
    shifted_normal: Callable[[np.ndarray, float], np.ndarray]
    outward_field: Callable[[np.ndarray], np.ndarray]  # h, unit
    area_scale: Callable[[float], float]  # H^2(Phi(t, patch)) / H^2(patch)
    depth_range: float
    slab_coordinate: Optional[Callable[[np.ndarray], np.ndarray]] = None  # depth of arbitrary points


def planar_slide(patch: SurfacePatch, inward) -> PatchSlide:
    inward = np.asarray(inward, dtype=float)
    base = patch.param(patch.rule.nodes[:1])[0]

    def shift(pts, t):
        return np.atleast_2d(pts) + t * inward

    def nrm(pts, t):
        uv0 = patch.rule.nodes[:1]
        n = patch.normal(uv0)[0]
        return np.broadcast_to(n, (np.atleast_2d(pts).shape[0], 3)).copy()

    def slab(pts):
        return (np.atleast_2d(pts) - base) @ inward

    return PatchSlide(patch, shift, nrm, lambda pts: np.broadcast_to(-inward, (np.atleast_2d(pts).shape[0], 3)).copy(),
                      lambda t: 1.0, depth_range=np.inf, slab_coordinate=slab)


def spherical_slide(patch: SurfacePatch, center, radius: float) -> PatchSlide:
    center = np.asarray(center, dtype=float)

    def shift(pts, t):
        pts = np.atleast_2d(pts)
        return center + (1.0 - t / radius) * (pts - center)

    def nrm(pts, t):
        return -_unit(np.atleast_2d(pts) - center)

    def outward(pts):
        return _unit(np.atleast_2d(pts) - center)

    def slab(pts):
        return radius - np.linalg.norm(np.atleast_2d(pts) - center, axis=1)

    return PatchSlide(patch, shift, nrm, outward, lambda t: (1.0 - t / radius) ** 2,
                      depth_range=radius, slab_coordinate=slab)


def cylinder_slide(patch: SurfacePatch, center, radius: float) -> PatchSlide:
    center = np.asarray(center, dtype=float)

    def radial(pts):
        rel = np.atleast_2d(pts) - center
        rel = rel.copy()
        rel[:, 2] = 0.0
        return _unit(rel)

    def shift(pts, t):
        pts = np.atleast_2d(pts)
        return pts - t * radial(pts)

    def nrm(pts, t):
        return -radial(pts)

    def slab(pts):
        rel = np.atleast_2d(pts) - center
        return radius - np.hypot(rel[:, 0], rel[:, 1])

    return PatchSlide(patch, shift, nrm, radial, lambda t: (1.0 - t / radius),
                      depth_range=radius, slab_coordinate=slab)


def star_slide(patch: SurfacePatch, center) -> PatchSlide:
    """Generic star-shaped slide along the normalized ray field from an interior point."""
    center = np.asarray(center, dtype=float)

    def outward(pts):
        return _unit(np.atleast_2d(pts) - center)

    def shift(pts, t):
        pts = np.atleast_2d(pts)
        return pts - t * outward(pts)

    def nrm(pts, t):
        uv = patch.rule.nodes
        # transported normal approximated by the base patch normal; adequate for
        # small t on the star-shaped fallback
        ref = patch.points()
        d = np.linalg.norm(np.atleast_2d(pts)[:, None, :] - ref[None, :, :], axis=2)
        idx = np.argmin(d, axis=1)
        return patch.normal(uv)[idx]

    avg = None
    return PatchSlide(patch, shift, nrm, outward, lambda t: 1.0, depth_range=np.inf)


@dataclass(frozen=True)
class TransversalCollar:
    """Per-patch inward slides with a globally transversal outward field h."""

    slides: tuple[PatchSlide, ...]
    kappa: float

    def slide_for(self, patch: SurfacePatch) -> PatchSlide:
        for s in self.slides:
            if s.patch is patch or s.patch.name == patch.name:
                return s
        raise GeometryError(f"no slide registered for patch {patch.name!r}")


@dataclass(frozen=True)
class SolidRegion:
    """Bounded region with patch boundary, a volume rule, and an ambient ball."""

    name: str
    boundary: tuple[SurfacePatch, ...]
    volume_nodes: np.ndarray  # (n, 3) physical points
    volume_weights: np.ndarray  # plain weights including metric factor
    contains: Callable[[np.ndarray], np.ndarray]
    ambient_radius: float
    ambient_center: np.ndarray
    meta: dict = field(default_factory=dict)

    def volume(self) -> float:
        return float(np.sum(self.volume_weights))

    def integrate(self, integrand) -> float | np.ndarray:
        vals = np.asarray(integrand(self.volume_nodes))
        if vals.ndim == 1:
            return float(np.sum(self.volume_weights * vals))
        return np.tensordot(self.volume_weights, vals, axes=(0, 0))

    def boundary_area(self) -> float:
        return sum(p.area() for p in self.boundary)


def volume_integral(region: SolidRegion, integrand) -> float | np.ndarray:
    vals = np.asarray(integrand(region.volume_nodes), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise GeometryError("non-finite volume integrand")
    if vals.ndim == 1:
        return float(np.sum(region.volume_weights * vals))
    return np.tensordot(region.volume_weights, vals, axes=(0, 0))


def _spherical_volume_nodes(center, radius, order, n_angular, u_range=(-1.0, 1.0),
                            radial_breaks=()):
    center = np.asarray(center, dtype=float)
    bp = sorted({0.0, float(radius), *(float(b) for b in radial_breaks if 0.0 < b < radius)})
    rr = gauss_legendre_split(order, np.asarray(bp))
    ru = gauss_legendre(order, u_range[0], u_range[1])
    rp = periodic_trapezoid(n_angular)
    rule = tensor_product_3d(rr, ru, rp)
    r, u, phi = rule.nodes[:, 0], rule.nodes[:, 1], rule.nodes[:, 2]
    st = np.sqrt(np.clip(1.0 - u * u, 0.0, None))
    pts = center + np.stack([r * st * np.cos(phi), r * st * np.sin(phi), r * u], axis=1)
    w = rule.weights * r * r
    return pts, w


def ball_region(center=(0.0, 0.0, 0.0), radius: float = 1.0, order: int = DEFAULT_ORDER,
                n_angular: int = DEFAULT_ANGULAR, ambient_radius: Optional[float] = None,
                radial_breaks=()) -> SolidRegion:
    center = np.asarray(center, dtype=float)
    pts, w = _spherical_volume_nodes(center, radius, order, n_angular, radial_breaks=radial_breaks)
    sphere = sphere_patch(center, radius, order, n_angular, inner_normal=True)

    def contains(x):
        return np.linalg.norm(np.atleast_2d(x) - center, axis=1) < radius

    return SolidRegion("ball", (sphere,), pts, w, contains,
                       ambient_radius or 2.0 * radius, center,
                       meta={"center": center, "radius": float(radius)})


def half_ball_region(center=(0.0, 0.0, 0.0), radius: float = 1.0, order: int = DEFAULT_ORDER,
                     n_angular: int = DEFAULT_ANGULAR,
                     ambient_radius: Optional[float] = None) -> SolidRegion:
    """Upper half ball {x3 > c3}; flat face oriented by the inner normal +e3."""
    center = np.asarray(center, dtype=float)
    pts, w = _spherical_volume_nodes(center, radius, order, n_angular, u_range=(0.0, 1.0))
    dome = sphere_patch(center, radius, order, n_angular, inner_normal=True, u_range=(0.0, 1.0))
    face = disk_patch(center, radius, normal=(0.0, 0.0, 1.0), order=order, n_angular=n_angular)

    def contains(x):
        rel = np.atleast_2d(x) - center
        return (np.linalg.norm(rel, axis=1) < radius) & (rel[:, 2] > 0.0)

    return SolidRegion("half_ball", (face, dome), pts, w, contains,
                       ambient_radius or 2.0 * radius, center,
                       meta={"center": center, "radius": float(radius)})


def cylinder_region(center=(0.0, 0.0, 0.0), radius: float = 1.0, z0: float = 0.0, z1: float = 1.0,
                    order: int = DEFAULT_ORDER, n_angular: int = DEFAULT_ANGULAR,
                    ambient_radius: Optional[float] = None,
                    radial_breaks=(), z_breaks=()) -> SolidRegion:
    """Cylinder {rho < radius, z0 < z < z1} relative to `center` in the xy plane.

    Break lists split the radial and axial rules so coordinate-aligned
    piecewise-polynomial integrands are integrated exactly.
    """
    center = np.asarray(center, dtype=float)
    bp_r = sorted({0.0, float(radius), *(float(b) for b in radial_breaks if 0.0 < b < radius)})
    bp_z = sorted({float(z0), float(z1), *(float(b) for b in z_breaks if z0 < b < z1)})
    rr = gauss_legendre_split(order, np.asarray(bp_r))
    rz = gauss_legendre_split(order, np.asarray(bp_z))
    rp = periodic_trapezoid(n_angular)
    rule = tensor_product_3d(rr, rp, rz)
    rho, phi, z = rule.nodes[:, 0], rule.nodes[:, 1], rule.nodes[:, 2]
    pts = center + np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)
    w = rule.weights * rho
    bottom = disk_patch(center + np.array([0, 0, z0]), radius, normal=(0, 0, 1.0),
                        order=order, n_angular=n_angular)
    top = disk_patch(center + np.array([0, 0, z1]), radius, normal=(0, 0, -1.0),
                     order=order, n_angular=n_angular)
    side = cylinder_side_patch(center, radius, z0, z1, order, n_angular, inner_normal=True)

    def contains(x):
        rel = np.atleast_2d(x) - center
        return (np.hypot(rel[:, 0], rel[:, 1]) < radius) & (rel[:, 2] > z0) & (rel[:, 2] < z1)

    amb = ambient_radius or 2.0 * max(radius, abs(z0), abs(z1))
    return SolidRegion("cylinder", (bottom, top, side), pts, w, contains, amb, center,
                       meta={"center": center, "radius": float(radius),
                             "z0": float(z0), "z1": float(z1)})


def box_region(center=(0.0, 0.0, 0.0), half_widths=(1.0, 1.0, 1.0), order: int = 16,
               ambient_radius: Optional[float] = None) -> SolidRegion:
    center = np.asarray(center, dtype=float)
    h = np.asarray(half_widths, dtype=float)
    rx = gauss_legendre(order, -h[0], h[0])
    ry = gauss_legendre(order, -h[1], h[1])
    rz = gauss_legendre(order, -h[2], h[2])
    rule = tensor_product_3d(rx, ry, rz)
    pts = center + rule.nodes
    faces = []
    axes = np.eye(3)
    for k in range(3):
        for sgn in (+1.0, -1.0):
            e1 = axes[(k + 1) % 3] * h[(k + 1) % 3]
            e2 = axes[(k + 2) % 3] * h[(k + 2) % 3]
            corner = center + sgn * axes[k] * h[k] - e1 - e2
            faces.append(rectangle_patch(corner, 2 * e1 / (2 * h[(k + 1) % 3]),
                                         2 * e2 / (2 * h[(k + 2) % 3]),
                                         2 * h[(k + 1) % 3], 2 * h[(k + 2) % 3],
                                         normal_sign=-sgn * (1 if k != 1 else 1), order=order))
    # fix normals to point inward
    fixed = []
    for f in faces:
        uv0 = f.rule.nodes[:1]
        n = f.normal(uv0)[0]
        p = f.param(uv0)[0]
        if np.dot(n, center - p) < 0:
            fixed.append(SurfacePatch(f.name, f.param,
                                      (lambda ff: (lambda uv: -ff.normal(uv)))(f),
                                      f.metric_jacobian, f.rule, f.regularity))
        else:
            fixed.append(f)

    def contains(x):
        rel = np.abs(np.atleast_2d(x) - center)
        return np.all(rel < h, axis=1)

    return SolidRegion("box", tuple(fixed), pts, rule.weights, contains,
                       ambient_radius or 2.0 * float(np.max(h)), center,
                       meta={"center": center, "half_widths": h})


def build_transversal_collar(region: SolidRegion) -> TransversalCollar:
    """Per-patch inward slides; reports the transversality margin kappa > 0."""
    slides = []
    if region.name == "ball":
        slides.append(spherical_slide(region.boundary[0], region.meta["center"],
                                      region.meta["radius"]))
    elif region.name == "half_ball":
        face, dome = region.boundary
        slides.append(planar_slide(face, inward=np.array([0.0, 0.0, 1.0])))
        slides.append(spherical_slide(dome, region.meta["center"], region.meta["radius"]))
    elif region.name == "cylinder":
        bottom, top, side = region.boundary
        slides.append(planar_slide(bottom, inward=np.array([0.0, 0.0, 1.0])))
        slides.append(planar_slide(top, inward=np.array([0.0, 0.0, -1.0])))
        slides.append(cylinder_slide(side, region.meta["center"], region.meta["radius"]))
    elif region.name == "box":
        for p in region.boundary:
            slides.append(star_slide(p, region.meta["center"]))
    else:
        raise GeometryError(f"no transversal collar for region {region.name!r}")

    kappa = np.inf
    for sl in slides:
        uv = sl.patch.rule.nodes
        pts = sl.patch.param(uv)
        nu = sl.patch.normal(uv)
        h = sl.outward_field(pts)
        kappa = min(kappa, float(np.min(-np.einsum("ij,ij->i", nu, h))))
    if not kappa > 0.0:
        raise GeometryError("failed to find a transversal field with kappa > 0")
    return TransversalCollar(tuple(slides), kappa)


def shift_transversal(manifold: BoundaryManifold, collar: TransversalCollar,
                      t: float) -> BoundaryManifold:
    """Slide a canonical manifold inward by t along its region collar."""
    if not abs(t) < 0.5:
        raise GeometryError("transversal shift requires |t| < 1/2")
    slide = collar.slide_for(manifold.patch)
    if t >= slide.depth_range:
        raise GeometryError("shift leaves the collar neighborhood")
    if manifold.kind == "disk":
        center = manifold.meta["center"]
        _, _, n = manifold.meta["frame"]
        new_center = slide.shift_point(center[None, :], t)[0]
        return disk_manifold(new_center, manifold.meta["radius"], n)
    if manifold.kind == "closed":
        center = manifold.meta["center"]
        return closed_sphere_manifold(center, manifold.meta["radius"] - t)
    raise GeometryError(f"cannot shift manifold kind {manifold.kind!r}")


def shell_integral(region: SolidRegion, collar: TransversalCollar, eps: float,
                   integrand, s_order: int = 8) -> float | np.ndarray:
    """Volume integral over the inward shell of depth eps, via per-patch slides.

    `integrand(base_pts, shifted_pts, slide, s)` returns per-node values at the
    slid points; base points identify the boundary feet. Overlaps near patch
    junctions contribute O(eps^2) volume and vanish in the localizer limits
    this is used for.
    """
    total = None
    for sl in collar.slides:
        s_rule = gauss_legendre(s_order, 0.0, eps)
        uv = sl.patch.rule.nodes
        base = sl.patch.param(uv)
        warea = sl.patch.rule.weights * sl.patch.metric_jacobian(uv)
        acc = None
        for s, w in zip(s_rule.nodes, s_rule.weights):
            pts = sl.shift_point(base, s)
            vals = np.asarray(integrand(base, pts, sl, s))
            contrib = w * sl.area_scale(s) * np.tensordot(warea, vals, axes=(0, 0))
            acc = contrib if acc is None else acc + contrib
        total = acc if total is None else total + acc
    return total
