"""
Closed-form Green capacities: pseudo-hyperbolic disks, Euclidean disks and segments on a diameter.
"""

import math
from typing import Sequence

import numpy as np

from compcap.capacity.compact_set import CompactSet, Curve, EuclidDisk, PhDisk, Segment
from compcap.capacity.estimate import CapacityError, CapacityEstimate

AGM_TOL = 1e-14
AGM_MAX_ITERATIONS = 64


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two positive numbers"""
    if not (a > 0 and b > 0):
        raise CapacityError(f"The AGM needs positive arguments, got {a}, {b}")
    for _ in range(AGM_MAX_ITERATIONS):
        if abs(a - b) <= AGM_TOL * a:
            return 0.5 * (a + b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    raise CapacityError(f"AGM did not converge for ({a}, {b})")


def complete_elliptic_k(k: float) -> float:
    """Complete elliptic integral of the first kind for the modulus k, 0 <= k < 1"""
    if not 0 <= k < 1:
        raise CapacityError(f"The modulus must be in [0, 1), got {k}")
    return math.pi / (2.0 * agm(1.0, math.sqrt(1.0 - k * k)))


def _closed(value: float) -> CapacityEstimate:
    return CapacityEstimate(value=value, method="closed_form")


def cap_ph_disk(r: float) -> CapacityEstimate:
    """cap = 1 / log(1/r) for a pseudo-hyperbolic disk of radius r, whatever its center"""
    if not 0 < r < 1:
        raise CapacityError(f"The pseudo-hyperbolic radius must be in (0, 1), got {r}")
    return _closed(1.0 / math.log(1.0 / r))


def cap_euclid_disk(b: float, a: float) -> CapacityEstimate:
    """
    Capacity of the closed Euclidean disk of center b and radius a.

    lambda > 1 is the largest root of a z^2 - (1 + a^2 - b^2) z + a and cap = 1 / log(lambda);
    equivalently exp(-1/cap) = (1 + a^2 - b^2 - sqrt(delta)) / (2a) with
    delta = (1 + a^2 - b^2)^2 - 4 a^2.

    Args:
        b (float): The distance from the center to 0; complex centers are rotated onto [0, 1)
        a (float): The radius, a + |b| < 1
    """
    b = abs(b)
    if not (a > 0 and a + b < 1):
        raise CapacityError(f"The disk D({b}, {a}) is not relatively compact in the unit disk")
    delta = (1 + a * a - b * b) ** 2 - 4 * a * a
    m_value = (1 + a * a - b * b - math.sqrt(delta)) / (2 * a)
    return _closed(1.0 / math.log(1.0 / m_value))


def cap_segment(h: float) -> CapacityEstimate:
    """
    Capacity of the segment [0, h]: K(k') / (pi K(k)) with k = (1 - h) / (1 + h).

    Args:
        h (float): The right endpoint, 0 < h < 1
    """
    if not 0 < h < 1:
        raise CapacityError(f"The segment end must be in (0, 1), got {h}")
    k = (1 - h) / (1 + h)
    k_prime = math.sqrt((1 - k) * (1 + k))
    return _closed(complete_elliptic_k(k_prime) / (math.pi * complete_elliptic_k(k)))


def cap_closed_form(compact_set: CompactSet) -> CapacityEstimate:
    """
    Closed-form capacity of a set, when there is one.

    Segments on a diameter are moved onto [0, rho(start, end)] by a disk automorphism.

    Raises:
        CapacityError: For curves and for segments off a diameter
    """
    if isinstance(compact_set, PhDisk):
        return cap_ph_disk(compact_set.ph_radius)
    if isinstance(compact_set, EuclidDisk):
        return cap_euclid_disk(abs(compact_set.center), compact_set.radius)
    if isinstance(compact_set, Segment) and compact_set.on_diameter:
        return cap_segment(compact_set.ph_diameter())
    if isinstance(compact_set, (Segment, Curve)):
        raise CapacityError(f"No closed-form capacity for {compact_set}")
    raise CapacityError(f"Unsupported compact set {compact_set!r}")


def fit_segment_growth_constant(hs: Sequence[float], caps: Sequence[float]) -> float:
    """The largest c with cap_j >= c log(1 / (1 - h_j)) for every j"""
    hs = np.asarray(hs, dtype=float)
    caps = np.asarray(caps, dtype=float)
    if hs.size == 0 or hs.shape != caps.shape:
        raise CapacityError("Need matching non-empty sequences of endpoints and capacities")
    return float(np.min(caps / np.log(1.0 / (1.0 - hs))))


def diameter_lower_bound(diameter: float, c: float) -> float:
    """
    exp(-1 / (c log(1 / (1 - diameter)))), a lower bound for beta that tends to 1 with the diameter.

    c is a segment growth constant, cap_segment(h) >= c log(1 / (1 - h)) at h = diameter, such as
    fit_segment_growth_constant returns when the diameter is among its lengths.
    """
    if not 0 < diameter < 1:
        raise CapacityError(f"The pseudo-hyperbolic diameter must be in (0, 1), got {diameter}")
    if not c > 0:
        raise CapacityError(f"The growth constant must be positive, got {c}")
    return math.exp(-1.0 / (c * math.log(1.0 / (1.0 - diameter))))
