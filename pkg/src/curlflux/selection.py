"""Maximal functions over collar parameters and good-manifold scans.

The maximal value at a collar parameter is the supremum over a geometric
half-width grid of layer mass divided by half-width; the grid supremum is a
lower bound of the true maximal function, which keeps the weak-(1,1) check
one-sided valid. Concentration on a single layer is flagged as infinite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .fields import CurlMeasure, LinePart, SheetPart
from .geometry import (
    BoundaryManifold,
    PatchSlide,
    TangentialCollar,
    TransversalCollar,
    band_mass,
)
from .quadrature import gauss_legendre

DEFAULT_EPS_GRID = tuple(2.0 ** (-k) for k in range(2, 13))


@dataclass(frozen=True)
class MaximalScan:
    t_grid: tuple[float, ...]
    values: tuple[float, ...]  # may contain inf
    variant: str  # "transversal"/"tangential" x "two_sided"/"plus"/"minus"
    epsilon_grid: tuple[float, ...]
    collar_mass: float  # |mu| of the full collar image, for the weak-(1,1) bound

    def finite(self) -> np.ndarray:
        return np.isfinite(np.asarray(self.values))


def _line_slab_mass(lp: LinePart, slide: PatchSlide, lo: float, hi: float,
                    order: int = 64) -> float:
    """Mass of a straight line measure inside the slab lo < depth < hi.

    Planar slides give an affine depth along the segment, solved exactly;
    other slides fall back to masked quadrature.
    """
    if slide.slab_coordinate is None:
        return 0.0
    a = slide.slab_coordinate(lp.positions(np.array([lp.lo])))[0]
    b = slide.slab_coordinate(lp.positions(np.array([lp.hi])))[0]
    dens_mag = np.linalg.norm(np.atleast_2d(lp.density(lp.positions(np.array([0.0]))))[0])
    if abs(b - a) < 1e-14:
        # segment parallel to the layers: zero unless it sits inside the slab,
        # in which case the mass concentrates and is handled by the caller
        return float(dens_mag * (lp.hi - lp.lo)) if lo < a < hi else 0.0
    # affine depth: invert exactly
    s_of = lambda depth: lp.lo + (depth - a) * (lp.hi - lp.lo) / (b - a)
    s0, s1 = sorted((s_of(lo), s_of(hi)))
    s0, s1 = max(s0, lp.lo), min(s1, lp.hi)
    if s1 <= s0:
        return 0.0
    rule = gauss_legendre(order, s0, s1)
    dens = np.atleast_2d(lp.density(lp.positions(rule.nodes)))
    return float(np.sum(rule.weights * np.linalg.norm(dens, axis=1)))


def _sheet_slab_mass(sp: SheetPart, slide: PatchSlide, lo: float, hi: float) -> float:
    if slide.slab_coordinate is None:
        return 0.0
    uv = sp.patch.rule.nodes
    pts = sp.patch.param(uv)
    depth = slide.slab_coordinate(pts)
    w = sp.patch.rule.weights * sp.patch.metric_jacobian(uv)
    mask = (depth > lo) & (depth < hi)
    dens = np.linalg.norm(np.atleast_2d(sp.density(pts)), axis=1)
    return float(np.sum(w * mask * dens))


def _sheet_layer_mass(sp: SheetPart, slide: PatchSlide, t: float,
                      tol: float = 1e-10) -> float:
    """Mass carried by the single layer at depth t (concentration detector)."""
    if slide.slab_coordinate is None:
        return 0.0
    uv = sp.patch.rule.nodes
    pts = sp.patch.param(uv)
    depth = slide.slab_coordinate(pts)
    w = sp.patch.rule.weights * sp.patch.metric_jacobian(uv)
    mask = np.abs(depth - t) < tol
    dens = np.linalg.norm(np.atleast_2d(sp.density(pts)), axis=1)
    return float(np.sum(w * mask * dens))


def _lebesgue_slab_mass(density, slide: PatchSlide, lo: float, hi: float,
                        s_order: int = 8) -> float:
    lo = max(lo, 0.0)
    hi = min(hi, slide.depth_range)
    if hi <= lo:
        return 0.0
    s_rule = gauss_legendre(s_order, lo, hi)
    uv = slide.patch.rule.nodes
    base = slide.patch.param(uv)
    warea = slide.patch.rule.weights * slide.patch.metric_jacobian(uv)
    total = 0.0
    for s, w in zip(s_rule.nodes, s_rule.weights):
        pts = slide.shift_point(base, s)
        mags = np.linalg.norm(np.atleast_2d(density(pts)), axis=1)
        total += w * slide.area_scale(s) * float(np.sum(warea * mags))
    return total


def measure_slab_mass(mu: CurlMeasure, slide: PatchSlide, lo: float, hi: float) -> float:
    total = 0.0
    if mu.lebesgue_density is not None:
        total += _lebesgue_slab_mass(mu.lebesgue_density, slide, lo, hi)
    for sp in mu.sheet_parts:
        total += _sheet_slab_mass(sp, slide, lo, hi)
    for lp in mu.line_parts:
        total += _line_slab_mass(lp, slide, lo, hi)
    return total


def single_layer_mass(mu: CurlMeasure, slide: PatchSlide, t: float) -> float:
    return sum(_sheet_layer_mass(sp, slide, t) for sp in mu.sheet_parts)


def maximal_transversal(mu: CurlMeasure, manifold: BoundaryManifold,
                        collar: TransversalCollar, t_grid: Sequence[float],
                        eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
                        variant: str = "two_sided") -> MaximalScan:
    """Layer-mass maximal function along the transversal slides of a manifold."""
    slide = collar.slide_for(manifold.patch)
    vals = []
    for t in t_grid:
        if single_layer_mass(mu, slide, t) > 0.0:
            vals.append(np.inf)
            continue
        best = 0.0
        for eps in eps_grid:
            if variant == "plus":
                lo, hi = t, t + eps
            elif variant == "minus":
                lo, hi = t - eps, t
            else:
                lo, hi = t - eps, t + eps
            best = max(best, measure_slab_mass(mu, slide, lo, hi) / eps)
        vals.append(best)
    collar_mass = measure_slab_mass(mu, slide, -0.75, min(0.75, slide.depth_range))
    for sp in mu.sheet_parts:
        # concentrated layers inside the collar contribute their full mass
        if slide.slab_coordinate is None:
            continue
        pts = sp.patch.param(sp.patch.rule.nodes)
        layer_t = float(np.median(slide.slab_coordinate(pts)))
        if -0.75 < layer_t < 0.75:
            collar_mass += _sheet_layer_mass(sp, slide, layer_t)
    return MaximalScan(tuple(t_grid), tuple(vals), f"transversal_{variant}",
                       tuple(eps_grid), collar_mass)


def maximal_tangential(surface_density, manifold: BoundaryManifold,
                       collar: TangentialCollar, t_grid: Sequence[float],
                       eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
                       variant: str = "two_sided",
                       breaks: Sequence[float] = ()) -> MaximalScan:
    """Layer-mass maximal function of an integrable surface density over the
    tangential collar bands of the boundary curve."""
    def mag(pts):
        return np.linalg.norm(np.atleast_2d(surface_density(pts)), axis=1)

    vals = []
    for t in t_grid:
        best = 0.0
        for eps in eps_grid:
            if variant == "plus":
                lo, hi = t, t + eps
            elif variant == "minus":
                lo, hi = t - eps, t
            else:
                lo, hi = t - eps, t + eps
            m = band_mass(collar, lo, hi, mag, breaks=breaks)
            best = max(best, m / eps)
        vals.append(best)
    collar_mass = band_mass(collar, 0.0, min(0.75, collar.s_max), mag, breaks=breaks)
    return MaximalScan(tuple(t_grid), tuple(vals), f"tangential_{variant}",
                       tuple(eps_grid), collar_mass)


@dataclass(frozen=True)
class GoodSetReport:
    lam: float
    good_t: tuple[float, ...]
    complement_measure: float
    weak_bound: float  # 10 |mu|(collar) / lambda

    @property
    def holds(self) -> bool:
        return self.complement_measure <= self.weak_bound + 1e-12


def good_set_scan(scan: MaximalScan, lam: float) -> GoodSetReport:
    """Threshold scan with the empirical weak-(1,1) bound at constant 10."""
    t = np.asarray(scan.t_grid)
    v = np.asarray(scan.values)
    if len(t) > 1:
        cell = float(np.median(np.diff(np.sort(t))))
    else:
        cell = 1.0
    bad = ~((v <= lam) & np.isfinite(v))
    good = tuple(float(x) for x in t[~bad])
    return GoodSetReport(lam, good, float(np.sum(bad) * cell),
                         10.0 * scan.collar_mass / lam)
