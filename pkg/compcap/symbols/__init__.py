"""Symbol Classes

This module contains imports for the primitives a symbol chain is made of, the chain itself
and the disk geometry they share. Each primitive, like an affine map or a disk automorphism,
has a class that evaluates it, substitutes a power series into it and reports its
fractional-linear matrix when it has one.
"""

from .affine import Affine, Dilation
from .geometry import (
    circumcircle,
    disk_automorphism,
    euclid_disk_to_ph,
    ph_diameter_of_disk,
    ph_disk_to_euclid,
    pseudo_hyperbolic,
)
from .mobius import Automorphism, Moebius
from .polynomial import Polynomial
from .primitive import PoleError, Primitive, SymbolError
from .symbol import Symbol, evaluate, image_disk, series_norm, space_norm, sup_norm, taylor

__all__ = [
    "Affine",
    "Automorphism",
    "Dilation",
    "Moebius",
    "PoleError",
    "Polynomial",
    "Primitive",
    "Symbol",
    "SymbolError",
    "circumcircle",
    "disk_automorphism",
    "euclid_disk_to_ph",
    "evaluate",
    "image_disk",
    "ph_diameter_of_disk",
    "ph_disk_to_euclid",
    "pseudo_hyperbolic",
    "series_norm",
    "space_norm",
    "sup_norm",
    "taylor",
]
