"""Smooth test functions and vector fields with analytic derivatives.

Dual bounds, tangentiality checks, and divergence dictionaries all pair
against these. The dictionary mixes radial quintic bumps at three scales with
low-order trigonometric fields; every entry carries closed-form gradient and
curl so the pairings never fall back to finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


def smoothstep(u):
    """Quintic smoothstep: 0 at u<=0, 1 at u>=1, C^2 at the ends."""
    u = np.clip(u, 0.0, 1.0)
    return u ** 3 * (10.0 - 15.0 * u + 6.0 * u * u)


def smoothstep_prime(u):
    inside = (u > 0.0) & (u < 1.0)
    u = np.clip(u, 0.0, 1.0)
    return np.where(inside, 30.0 * u ** 2 * (1.0 - u) ** 2, 0.0)


def cutoff_profile(u, plateau: float = 0.5):
    """Decreasing C^2 profile: 1 for u <= plateau, 0 for u >= 1; |slope| <= 3.75
    at the default plateau 1/2."""
    return 1.0 - smoothstep((u - plateau) / (1.0 - plateau))


def cutoff_profile_prime(u, plateau: float = 0.5):
    return -smoothstep_prime((u - plateau) / (1.0 - plateau)) / (1.0 - plateau)


@dataclass(frozen=True)
class ScalarTestFunction:
    """Compactly supported scalar with analytic gradient.

    `support` optionally records an enclosing ball (center, radius) so
    pairings can integrate over it instead of a whole region.
    """

    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    label: str = ""
    support: "tuple | None" = None
    support_breaks: tuple = ()


def _exp_profile(u, plateau: float = 0.5):
    """C-infinity profile: 1 for u <= plateau, exp(1 - 1/(1-v^2)) decay to 0 at u = 1."""
    u = np.asarray(u, dtype=float)
    v = np.clip((u - plateau) / (1.0 - plateau), 0.0, 1.0)
    out = np.zeros_like(v)
    inside = v < 1.0
    vi = v[inside]
    out[inside] = np.exp(1.0 - 1.0 / np.maximum(1.0 - vi * vi, 1e-300))
    return out


def _exp_profile_prime(u, plateau: float = 0.5):
    u = np.asarray(u, dtype=float)
    v = (u - plateau) / (1.0 - plateau)
    out = np.zeros_like(v)
    inside = (v > 0.0) & (v < 1.0)
    vi = v[inside]
    g = 1.0 - vi * vi
    out[inside] = np.exp(1.0 - 1.0 / g) * (-2.0 * vi / (g * g)) / (1.0 - plateau)
    return out


def smooth_bump(center, radius: float, plateau: float = 0.5) -> ScalarTestFunction:
    """C-infinity bump: 1 on |x-c| <= plateau*radius, 0 outside radius.

    Spectrally friendly for Gauss rules; use where quadrature error must sit
    well below 1e-8.
    """
    center = np.asarray(center, dtype=float)

    def value(x):
        r = np.linalg.norm(np.atleast_2d(x) - center, axis=1)
        return _exp_profile(r / radius, plateau)

    def gradient(x):
        x = np.atleast_2d(x)
        rel = x - center
        r = np.linalg.norm(rel, axis=1)
        mag = _exp_profile_prime(r / radius, plateau) / radius
        safe = np.where(r == 0.0, 1.0, r)
        return mag[:, None] * rel / safe[:, None]

    return ScalarTestFunction(value, gradient, f"smooth_bump(r={radius:g})",
                              support=(tuple(center), radius),
                              support_breaks=(plateau * radius,))


@dataclass(frozen=True)
class VectorTestField:
    """Vector test field with analytic curl (and gradient action where needed)."""

    value: Callable[[np.ndarray], np.ndarray]
    curl: Callable[[np.ndarray], np.ndarray]
    label: str = ""


def constant_one(radius: float = np.inf, center=(0.0, 0.0, 0.0)) -> ScalarTestFunction:
    """Cutoff that equals 1 on the ball of half the radius (or globally)."""
    center = np.asarray(center, dtype=float)

    if np.isinf(radius):
        return ScalarTestFunction(lambda x: np.ones(np.atleast_2d(x).shape[0]),
                                  lambda x: np.zeros_like(np.atleast_2d(x)), "one")

    def value(x):
        r = np.linalg.norm(np.atleast_2d(x) - center, axis=1)
        return cutoff_profile(r / radius)

    def gradient(x):
        x = np.atleast_2d(x)
        rel = x - center
        r = np.linalg.norm(rel, axis=1)
        mag = cutoff_profile_prime(r / radius) / radius
        safe = np.where(r == 0.0, 1.0, r)
        return mag[:, None] * rel / safe[:, None]

    return ScalarTestFunction(value, gradient, "cutoff_one")


def radial_bump(center, radius: float, plateau: float = 0.5) -> ScalarTestFunction:
    """Bump equal to 1 on |x-c| <= plateau*radius, 0 outside radius."""
    center = np.asarray(center, dtype=float)

    def value(x):
        r = np.linalg.norm(np.atleast_2d(x) - center, axis=1)
        return cutoff_profile(r / radius, plateau)

    def gradient(x):
        x = np.atleast_2d(x)
        rel = x - center
        r = np.linalg.norm(rel, axis=1)
        mag = cutoff_profile_prime(r / radius, plateau) / radius
        safe = np.where(r == 0.0, 1.0, r)
        return mag[:, None] * rel / safe[:, None]

    return ScalarTestFunction(value, gradient, f"bump(r={radius:g})",
                              support=(tuple(center), radius),
                              support_breaks=(plateau * radius,))


def trig_scalar(k, phase: float = 0.0, amplitude: float = 1.0) -> ScalarTestFunction:
    k = np.asarray(k, dtype=float)

    def value(x):
        return amplitude * np.sin(np.atleast_2d(x) @ k + phase)

    def gradient(x):
        c = amplitude * np.cos(np.atleast_2d(x) @ k + phase)
        return c[:, None] * k

    return ScalarTestFunction(value, gradient, "trig")


def trig_vector(modes) -> VectorTestField:
    """Sum of plane-wave modes (amplitude a, wavevector k, phase p); analytic curl."""
    modes = [(np.asarray(a, float), np.asarray(k, float), float(p)) for a, k, p in modes]

    def value(x):
        x = np.atleast_2d(x)
        out = np.zeros_like(x)
        for a, k, p in modes:
            out += np.sin(x @ k + p)[:, None] * a
        return out

    def curl(x):
        x = np.atleast_2d(x)
        out = np.zeros_like(x)
        for a, k, p in modes:
            out += np.cos(x @ k + p)[:, None] * np.cross(k, a)
        return out

    return VectorTestField(value, curl, "trig_vector")


def random_trig_vector(seed: int, n_modes: int = 3, kmax: float = 2.0) -> VectorTestField:
    rng = np.random.default_rng(seed)
    modes = [(rng.standard_normal(3), kmax * rng.standard_normal(3),
              float(rng.uniform(0, 2 * np.pi))) for _ in range(n_modes)]
    return trig_vector(modes)


def gradient_field(phi: ScalarTestFunction) -> VectorTestField:
    """Curl-free vector field grad(phi)."""
    return VectorTestField(phi.gradient,
                           lambda x: np.zeros_like(np.atleast_2d(x)),
                           f"grad({phi.label})")


def bump_vector(center, radius: float, direction) -> VectorTestField:
    """Constant direction modulated by a radial bump; curl = grad(bump) x direction."""
    d = np.asarray(direction, dtype=float)
    bump = radial_bump(center, radius)

    def value(x):
        return bump.value(x)[:, None] * d

    def curl(x):
        return np.cross(bump.gradient(x), d)

    return VectorTestField(value, curl, "bump_vector")


def cylindrical_bump(axis_point, rho_radius: float, z_half_width: float,
                     plateau: float = 0.5) -> ScalarTestFunction:
    """Product bump g(planar radius) h(axial offset) around a point on the z axis.

    Coordinate-aligned kinks (cylinders and planes), so cylinder rules split
    at the recorded breaks integrate it exactly.
    """
    axis_point = np.asarray(axis_point, dtype=float)

    def parts(x):
        x = np.atleast_2d(x)
        rel = x - axis_point
        rho = np.hypot(rel[:, 0], rel[:, 1])
        return rel, rho

    def value(x):
        rel, rho = parts(x)
        return (cutoff_profile(rho / rho_radius, plateau)
                * cutoff_profile(np.abs(rel[:, 2]) / z_half_width, plateau))

    def gradient(x):
        rel, rho = parts(x)
        g = cutoff_profile(rho / rho_radius, plateau)
        h = cutoff_profile(np.abs(rel[:, 2]) / z_half_width, plateau)
        gp = cutoff_profile_prime(rho / rho_radius, plateau) / rho_radius
        hp = (cutoff_profile_prime(np.abs(rel[:, 2]) / z_half_width, plateau)
              * np.sign(rel[:, 2]) / z_half_width)
        safe = np.where(rho == 0.0, 1.0, rho)
        out = np.zeros_like(np.atleast_2d(x))
        out[:, 0] = gp * h * rel[:, 0] / safe
        out[:, 1] = gp * h * rel[:, 1] / safe
        out[:, 2] = g * hp
        return out

    fn = ScalarTestFunction(value, gradient, f"cyl_bump(r={rho_radius:g})",
                            support=(tuple(axis_point), rho_radius),
                            support_breaks=(plateau * rho_radius, rho_radius))
    object.__setattr__(fn, "z_breaks",
                       (axis_point[2] - z_half_width, axis_point[2] - plateau * z_half_width,
                        axis_point[2] + plateau * z_half_width, axis_point[2] + z_half_width))
    return fn


def windowed(field: VectorTestField, window: ScalarTestFunction) -> VectorTestField:
    """Compactly supported version of a vector field: value = w v,
    curl = w curl(v) + grad(w) x v."""

    def value(x):
        return window.value(x)[:, None] * field.value(x)

    def curl(x):
        return (window.value(x)[:, None] * field.curl(x)
                + np.cross(window.gradient(x), field.value(x)))

    return VectorTestField(value, curl, f"windowed({field.label})")


def scalar_dictionary(center, scale: float, seed: int = 1234) -> list[ScalarTestFunction]:
    """Bumps at three scales around offset centers plus two trig entries."""
    center = np.asarray(center, dtype=float)
    rng = np.random.default_rng(seed)
    entries: list[ScalarTestFunction] = []
    for level in (1.0, 0.5, 0.25):
        for _ in range(2):
            off = scale * 0.3 * rng.uniform(-1.0, 1.0, size=3)
            entries.append(radial_bump(center + off, level * scale))
    entries.append(trig_scalar(rng.standard_normal(3) / scale))
    entries.append(trig_scalar(rng.standard_normal(3) / scale, phase=0.7))
    return entries


def vector_dictionary(center, scale: float, seed: int = 99, n: int = 5) -> list[VectorTestField]:
    rng = np.random.default_rng(seed)
    entries: list[VectorTestField] = []
    for i in range(n):
        if i % 2 == 0:
            entries.append(random_trig_vector(int(rng.integers(1 << 30)), n_modes=2,
                                              kmax=1.5 / scale))
        else:
            off = np.asarray(center, float) + scale * 0.2 * rng.uniform(-1, 1, size=3)
            entries.append(bump_vector(off, scale, rng.standard_normal(3)))
    return entries
