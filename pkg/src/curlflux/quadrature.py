"""Gauss-Legendre and trapezoid quadrature rules on reference domains.

Weights are plain parameter-measure weights; metric factors (area/volume
elements) are applied by the caller, so a rule sums to the measure of its
reference parameter domain.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes in parameter space with positive weights."""

    nodes: np.ndarray  # (n,) or (n, d)
    weights: np.ndarray  # (n,)
    order: int

    def __post_init__(self):
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")


def gauss_legendre(n: int, a: float, b: float) -> QuadratureRule:
    """n-point Gauss-Legendre rule on [a, b]; exact on polynomials of degree 2n-1."""
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return QuadratureRule(mid + half * x, half * w, order=2 * n - 1)


def periodic_trapezoid(n: int, period: float = 2.0 * np.pi) -> QuadratureRule:
    """Equispaced rule on [0, period); spectrally accurate for periodic integrands."""
    s = np.arange(n) * (period / n)
    w = np.full(n, period / n)
    return QuadratureRule(s, w, order=n - 1)


def tensor_product(rule_u: QuadratureRule, rule_v: QuadratureRule) -> QuadratureRule:
    u, v = np.meshgrid(rule_u.nodes, rule_v.nodes, indexing="ij")
    wu, wv = np.meshgrid(rule_u.weights, rule_v.weights, indexing="ij")
    nodes = np.stack([u.ravel(), v.ravel()], axis=1)
    return QuadratureRule(nodes, (wu * wv).ravel(), order=min(rule_u.order, rule_v.order))


def tensor_product_3d(ru: QuadratureRule, rv: QuadratureRule, rw: QuadratureRule) -> QuadratureRule:
    u, v, w = np.meshgrid(ru.nodes, rv.nodes, rw.nodes, indexing="ij")
    a, b, c = np.meshgrid(ru.weights, rv.weights, rw.weights, indexing="ij")
    nodes = np.stack([u.ravel(), v.ravel(), w.ravel()], axis=1)
    return QuadratureRule(nodes, (a * b * c).ravel(), order=min(ru.order, rv.order, rw.order))


def gauss_legendre_split(n: int, breakpoints: np.ndarray) -> QuadratureRule:
    """Composite GL rule with subintervals split at the given sorted breakpoints."""
    bp = np.asarray(breakpoints, dtype=float)
    segs = [gauss_legendre(n, bp[i], bp[i + 1]) for i in range(len(bp) - 1) if bp[i + 1] > bp[i]]
    if not segs:
        raise ValueError("empty breakpoint partition")
    nodes = np.concatenate([s.nodes for s in segs])
    weights = np.concatenate([s.weights for s in segs])
    return QuadratureRule(nodes, weights, order=2 * n - 1)
