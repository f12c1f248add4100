"""Pseudo-hyperbolic geometry of the unit disk."""

import cmath
import math

import numpy as np

from compcap.symbols.primitive import SymbolError


def pseudo_hyperbolic(z, w):
    """rho(z, w) = |z - w| / |1 - conj(z) w|, vectorized over numpy arrays"""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return np.abs(z - w) / np.abs(1 - np.conj(z) * w)


def disk_automorphism(a: complex, z):
    """Phi_a(z) = (a - z) / (1 - conj(a) z)"""
    z = np.asarray(z, dtype=complex)
    return (a - z) / (1 - np.conj(a) * z)


def circumcircle(z1: complex, z2: complex, z3: complex) -> tuple[complex, float]:
    """Center and radius of the circle through three points"""
    denominator = (
        z1.conjugate() * (z2 - z3) + z2.conjugate() * (z3 - z1) + z3.conjugate() * (z1 - z2)
    )
    scale = max(abs(z1 - z2), abs(z2 - z3), abs(z3 - z1))
    if scale == 0 or abs(denominator) <= 1e-14 * scale**2:
        raise SymbolError(f"Points {z1}, {z2}, {z3} are collinear or coincide: no circumcircle")
    numerator = abs(z1) ** 2 * (z2 - z3) + abs(z2) ** 2 * (z3 - z1) + abs(z3) ** 2 * (z1 - z2)
    center = numerator / denominator
    return center, abs(z1 - center)


def ph_disk_to_euclid(w: complex, r: float) -> tuple[complex, float]:
    """Euclidean center and radius of the pseudo-hyperbolic disk of center w and radius r"""
    if not (abs(w) < 1 and 0 < r < 1):
        raise SymbolError(f"Invalid pseudo-hyperbolic disk: center {w}, radius {r}")
    scale = 1 - r * r * abs(w) ** 2
    return w * (1 - r * r) / scale, r * (1 - abs(w) ** 2) / scale


def euclid_disk_to_ph(b: complex, a: float) -> tuple[complex, float]:
    """Pseudo-hyperbolic center and radius of the closed Euclidean disk D(b, a) inside the unit disk"""
    if not (a > 0 and abs(b) + a < 1):
        raise SymbolError(f"The disk D({b}, {a}) is not relatively compact in the unit disk")
    rotation = cmath.exp(1j * cmath.phase(b)) if b != 0 else 1
    near, far = abs(b) - a, abs(b) + a
    diameter = (far - near) / (1 - near * far)
    radius = (1 - math.sqrt(1 - diameter * diameter)) / diameter
    center = (near + radius) / (1 + radius * near)
    return rotation * center, radius


def ph_diameter_of_disk(b: complex, a: float) -> float:
    """Pseudo-hyperbolic diameter of D(b, a): 2r / (1 + r^2) for its pseudo-hyperbolic radius r"""
    _, radius = euclid_disk_to_ph(b, a)
    return 2 * radius / (1 + radius * radius)
