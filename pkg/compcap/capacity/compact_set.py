"""
Compact subsets of the unit disk whose Green capacity is computed.

Like the symbol primitives, each kind of set is a subclass matched by its ``identifier``
in the text form, e.g. ``disk(0.4,0.3)``, ``phdisk(0,0.5)`` or ``segment(0,0.5)``.
"""

import re
from typing import Optional, Sequence

import numpy as np
from matplotlib.path import Path
from scipy.spatial import cKDTree

from compcap.capacity.estimate import CapacityError
from compcap.symbols import Symbol, euclid_disk_to_ph, image_disk, ph_disk_to_euclid, pseudo_hyperbolic
from compcap.symbols.primitive import SymbolError, format_number, parse_complex

_TEXT_FORM = re.compile(r"^\s*([a-zA-Z_]+)\s*\(([^()]*)\)\s*$")
CLOSED_GAP = 1e-6


class CompactSet:
    """CompactSet base class

    The closure of every set lies in the open unit disk.
    """

    identifier: Optional[str] = None
    has_interior = True

    @classmethod
    def get_compact_set(cls, name: str) -> type["CompactSet"]:
        """Get the CompactSet class for a text-form name

        Raises:
            CapacityError: If no set has that name
        """
        for compact_set in cls.__subclasses__():
            if compact_set.identifier == name.lower():
                return compact_set
            try:
                return compact_set.get_compact_set(name)
            except CapacityError:
                continue
        raise CapacityError(f"Unknown compact set {name!r}")

    @classmethod
    def parse(cls, text: str) -> "CompactSet":
        """Build a set from its text form"""
        if not (match := _TEXT_FORM.match(text)):
            raise CapacityError(f"Cannot parse compact set {text!r}")
        name, raw_args = match.groups()
        compact_set = cls.get_compact_set(name)
        try:
            args = [parse_complex(arg) for arg in raw_args.split(",") if arg.strip()]
            return compact_set.from_args(args)
        except (ValueError, TypeError) as err:
            raise CapacityError(f"Invalid arguments for {name}: {raw_args!r}") from err

    @classmethod
    def from_args(cls, args: Sequence[complex]) -> "CompactSet":
        raise CapacityError(f"{cls.__name__} has no text form")

    def max_modulus(self) -> float:
        raise NotImplementedError

    def contains(self, points: np.ndarray, tolerance: float = 0.0) -> np.ndarray:
        """Mask of the points lying in the set, or within ``tolerance`` of it"""
        raise NotImplementedError

    def ph_diameter(self) -> float:
        """Pseudo-hyperbolic diameter"""
        raise CapacityError(f"No pseudo-hyperbolic diameter formula for {self}")

    def _check_inside(self) -> None:
        if not self.max_modulus() < 1:
            raise CapacityError(f"{self} is not relatively compact in the unit disk")


class EuclidDisk(CompactSet):
    """The closed disk |z - center| <= radius"""

    identifier = "disk"

    def __init__(self, center: complex, radius: float):
        self.center = complex(center)
        self.radius = float(np.real(radius))
        if not self.radius > 0:
            raise CapacityError(f"The disk radius must be positive, got {radius}")
        self._check_inside()

    @classmethod
    def from_args(cls, args: Sequence[complex]) -> "EuclidDisk":
        center, radius = args
        return cls(center, radius.real)

    @classmethod
    def image_of(cls, phi: Symbol) -> "EuclidDisk":
        """The closure of phi(D) for a fractional-linear symbol"""
        return cls(*image_disk(phi))

    def max_modulus(self) -> float:
        return abs(self.center) + self.radius

    def contains(self, points: np.ndarray, tolerance: float = 0.0) -> np.ndarray:
        return np.abs(points - self.center) <= self.radius + tolerance

    def boundary_length(self) -> float:
        return 2 * np.pi * self.radius

    def ph_diameter(self) -> float:
        _, radius = euclid_disk_to_ph(self.center, self.radius)
        return 2 * radius / (1 + radius * radius)

    def __repr__(self) -> str:
        return f"disk({format_number(self.center)},{format_number(self.radius)})"


class PhDisk(EuclidDisk):
    """The closed pseudo-hyperbolic disk {z : rho(z, center) <= radius}"""

    identifier = "phdisk"

    def __init__(self, center: complex, radius: float):
        radius = float(np.real(radius))
        try:
            euclid_center, euclid_radius = ph_disk_to_euclid(complex(center), radius)
        except SymbolError as err:
            raise CapacityError(str(err)) from err
        self.ph_center = complex(center)
        self.ph_radius = radius
        super().__init__(euclid_center, euclid_radius)

    @classmethod
    def from_args(cls, args: Sequence[complex]) -> "PhDisk":
        center, radius = args
        return cls(center, radius.real)

    def ph_diameter(self) -> float:
        return 2 * self.ph_radius / (1 + self.ph_radius**2)

    def __repr__(self) -> str:
        return f"phdisk({format_number(self.ph_center)},{format_number(self.ph_radius)})"


class Segment(CompactSet):
    """The straight segment [start, end]"""

    identifier = "segment"
    has_interior = False

    def __init__(self, start: complex, end: complex):
        self.start = complex(start)
        self.end = complex(end)
        if self.start == self.end:
            raise CapacityError("A segment needs two distinct endpoints")
        self._check_inside()

    @classmethod
    def from_args(cls, args: Sequence[complex]) -> "Segment":
        return cls(*args)

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    @property
    def on_diameter(self) -> bool:
        """True when the segment lies on a line through 0, a hyperbolic geodesic"""
        cross = (self.start.conjugate() * self.end).imag
        return abs(cross) <= 1e-14 * max(1.0, abs(self.start) * abs(self.end))

    def max_modulus(self) -> float:
        return max(abs(self.start), abs(self.end))

    def distance(self, points: np.ndarray) -> np.ndarray:
        direction = self.end - self.start
        t = np.clip(((points - self.start) * np.conj(direction)).real / abs(direction) ** 2, 0.0, 1.0)
        return np.abs(points - (self.start + t * direction))

    def contains(self, points: np.ndarray, tolerance: float = 0.0) -> np.ndarray:
        return self.distance(points) <= tolerance

    def boundary_length(self) -> float:
        return self.length

    def ph_diameter(self) -> float:
        if not self.on_diameter:
            return super().ph_diameter()
        return float(pseudo_hyperbolic(self.start, self.end))

    def __repr__(self) -> str:
        return f"segment({format_number(self.start)},{format_number(self.end)})"


class Curve(CompactSet):
    """The closed region bounded by a Jordan curve given by boundary samples

    The samples must close up: the first and last points agree within 1e-6.
    """

    identifier = None

    def __init__(self, points: Sequence[complex], label: str = "curve"):
        points = np.asarray(points, dtype=complex)
        if points.ndim != 1 or points.size < 4:
            raise CapacityError("A curve needs at least 4 boundary samples")
        if abs(points[-1] - points[0]) > CLOSED_GAP:
            raise CapacityError(f"The curve is not closed: gap {abs(points[-1] - points[0]):.3g}")
        self.points = points
        self.label = label
        self._check_inside()

    @classmethod
    def from_symbol(cls, phi: Symbol, samples: int = 4096) -> "Curve":
        """The closure of phi(D), bounded by phi(circle), for a univalent symbol"""
        if not phi.declared_univalent:
            raise CapacityError(f"{phi} is not declared univalent: phi(D) is not bounded by phi(circle)")
        return cls(phi.boundary(samples), label=f"image({phi})")

    def max_modulus(self) -> float:
        return float(np.max(np.abs(self.points)))

    def arclength(self) -> np.ndarray:
        """Cumulative arclength at each sample, starting at 0"""
        return np.concatenate([[0.0], np.cumsum(np.abs(np.diff(self.points)))])

    def boundary_length(self) -> float:
        return float(self.arclength()[-1])

    def contains(self, points: np.ndarray, tolerance: float = 0.0) -> np.ndarray:
        path = Path(np.column_stack([self.points.real, self.points.imag]), closed=True)
        flat = np.asarray(points).ravel()
        inside = path.contains_points(np.column_stack([flat.real, flat.imag]))
        if tolerance > 0:
            # the samples are dense, so the nearest sample stands in for the nearest boundary point
            tree = cKDTree(np.column_stack([self.points.real, self.points.imag]))
            distance, _ = tree.query(np.column_stack([flat.real, flat.imag]))
            inside |= distance <= tolerance
        return inside.reshape(np.shape(points))

    def __repr__(self) -> str:
        return self.label


def parse_compact_set(text: str) -> CompactSet:
    return CompactSet.parse(text)
