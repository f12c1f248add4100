"""
Symbols: analytic self-maps of the unit disk, written as composition chains of primitives.

The text form composes with ``*`` read as the composition sign, so ``auto(0.5)*dil(0.5)``
applies the dilation first. ``Symbol.chain`` stores the primitives in application order.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from compcap.series import PowerSeries
from compcap.symbols.affine import Affine
from compcap.symbols.geometry import circumcircle
from compcap.symbols.mobius import Moebius
from compcap.symbols.primitive import PoleError, Primitive, SymbolError
from compcap.weights import CoefWeights

logger = logging.getLogger(__name__)

SUP_NORM_SAMPLES = 512
BOUNDARY_PULL_IN = 1 - 1e-9
NORM_TAIL = 1e-15
MAX_ORDER = 4096


@dataclass(frozen=True)
class Symbol:
    """An analytic self-map of the disk"""

    chain: tuple[Primitive, ...]
    declared_univalent: bool = False
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "chain", tuple(self.chain))
        if not self.chain:
            raise SymbolError("A symbol needs at least one primitive")
        if self.validate:
            self._validate()

    def _validate(self) -> None:
        if self.is_fractional_linear:
            matrix = self.matrix()
            if matrix[1, 0] != 0 and abs(matrix[1, 1] / matrix[1, 0]) < 1:
                raise SymbolError(f"{self} has a pole inside the unit disk at {-matrix[1, 1] / matrix[1, 0]}")
        if (norm := self.sup_norm) > 1 + 1e-9:
            raise SymbolError(f"{self} does not map the disk into itself: sup norm {norm:.12g}")

    @classmethod
    def parse(cls, text: str, declared_univalent: Optional[bool] = None) -> "Symbol":
        """Parse the text form, e.g. ``auto(0.5)*dil(0.5)``

        Fractional-linear chains are univalent, so ``declared_univalent`` defaults to True for them.
        """
        parts = [part for part in text.split("*") if part.strip()]
        if not parts:
            raise SymbolError(f"Empty symbol text {text!r}")
        chain = tuple(Primitive.parse(part) for part in reversed(parts))
        if declared_univalent is None:
            declared_univalent = all(primitive.matrix() is not None for primitive in chain)
        return cls(chain, declared_univalent=declared_univalent)

    @classmethod
    def of(cls, *primitives: Primitive, declared_univalent: bool = False) -> "Symbol":
        """Build a symbol from primitives written outermost first, like the text form"""
        return cls(tuple(reversed(primitives)), declared_univalent=declared_univalent)

    def to_text(self) -> str:
        return "*".join(primitive.to_text() for primitive in reversed(self.chain))

    def __str__(self) -> str:
        return self.to_text()

    def __call__(self, z):
        return reduce(lambda value, primitive: primitive(value), self.chain, np.asarray(z, dtype=complex))

    @property
    def is_real(self) -> bool:
        return all(primitive.is_real for primitive in self.chain)

    @property
    def is_fractional_linear(self) -> bool:
        return all(primitive.matrix() is not None for primitive in self.chain)

    def matrix(self) -> np.ndarray:
        """The 2x2 matrix of the whole chain; only for fractional-linear chains"""
        if not self.is_fractional_linear:
            raise SymbolError(f"{self} is not fractional-linear")
        return reduce(lambda total, primitive: primitive.matrix() @ total, self.chain, np.eye(2, dtype=complex))

    def canonical(self) -> "Symbol":
        """Replace a lone affine map a z + b by |a| z + |b| (same approximation numbers)"""
        if len(self.chain) == 1 and isinstance(self.chain[0], Affine):
            return Symbol((self.chain[0].canonical(),), declared_univalent=self.declared_univalent)
        return self

    @cached_property
    def boundary_radius(self) -> float:
        """1, or slightly less when a pole sits on the unit circle"""
        theta = np.linspace(0.0, 2 * np.pi, SUP_NORM_SAMPLES, endpoint=False)
        try:
            values = self(np.exp(1j * theta))
            if np.all(np.isfinite(values)) and not self.has_boundary_pole():
                return 1.0
        except PoleError:
            pass
        logger.info("%s has a pole on the unit circle, sampling at radius %r", self, BOUNDARY_PULL_IN)
        return BOUNDARY_PULL_IN

    def has_boundary_pole(self) -> bool:
        if self.is_fractional_linear:
            matrix = self.matrix()
            return matrix[1, 0] != 0 and abs(abs(matrix[1, 1] / matrix[1, 0]) - 1) < 1e-12
        return any(isinstance(primitive, Moebius) and abs(primitive.c) >= abs(primitive.d) for primitive in self.chain)

    def boundary(self, m: int) -> np.ndarray:
        """phi at m + 1 equally spaced points of the circle, closed (first point repeated)"""
        theta = np.linspace(0.0, 2 * np.pi, m + 1)
        values = self(self.boundary_radius * np.exp(1j * theta))
        values[-1] = values[0]
        return values

    @cached_property
    def sup_norm(self) -> float:
        return sup_norm(self, SUP_NORM_SAMPLES)


def evaluate(phi: Symbol, z):
    """phi(z), through the chain in application order"""
    return phi(z)


def taylor(phi: Symbol, order: int) -> PowerSeries:
    """
    Taylor coefficients of phi about 0, truncated at the given order.

    Args:
        phi (Symbol): The symbol
        order (int): The number of coefficients N

    Returns:
        PowerSeries: c_0..c_{N-1}

    Raises:
        SymbolError: If a fractional-linear primitive has |c| >= |d|
    """
    if order < 1:
        raise SymbolError(f"The truncation order must be >= 1, got {order}")
    series = PowerSeries.identity(max(order, 2))
    for primitive in phi.chain:
        series = primitive.substitute(series)
    return PowerSeries(series.coeffs[:order])


def sup_norm(phi: Symbol, m: int = SUP_NORM_SAMPLES) -> float:
    """
    Estimate ||phi||_inf by sampling |phi| on m points of the circle and refining around the arg-max.

    The estimate is biased downwards: sampling can only miss the maximum, never exceed it.
    """
    if m < 64:
        raise SymbolError(f"sup_norm needs at least 64 samples, got {m}")
    radius = phi.boundary_radius
    theta = np.linspace(0.0, 2 * np.pi, m, endpoint=False)
    modulus = np.abs(phi(radius * np.exp(1j * theta)))
    best = int(np.argmax(modulus))
    step = 2 * np.pi / m
    refined = minimize_scalar(
        lambda t: -float(np.abs(phi(radius * np.exp(1j * t)))),
        bounds=(theta[best] - step, theta[best] + step),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return max(float(modulus[best]), -float(refined.fun))


def image_disk(phi: Symbol) -> tuple[complex, float]:
    """
    The Euclidean disk phi(D) of a fractional-linear symbol.

    Affine chains use the direct formula (center b, radius |a|); other chains map
    1, i, -1 and take the circumcircle.

    Returns:
        tuple: (center, radius)
    """
    if not phi.is_fractional_linear:
        raise SymbolError(f"{phi} is not fractional-linear: its image is not a disk")
    matrix = phi.matrix()
    if matrix[1, 0] == 0:
        slope, intercept = matrix[0, 0] / matrix[1, 1], matrix[0, 1] / matrix[1, 1]
        if slope == 0:
            raise SymbolError(f"{phi} is constant: its image is a point")
        return complex(intercept), float(abs(slope))
    if phi.has_boundary_pole():
        raise SymbolError(f"{phi} has a pole on the unit circle: its image is unbounded")
    center, radius = circumcircle(*(complex(phi(point)) for point in (1, 1j, -1)))
    return complex(center), float(radius)


def series_norm(series: PowerSeries, weights: CoefWeights) -> float:
    """(sum |c_n|^2 w_n)^(1/2)"""
    weights = weights.extended(series.order - 1)
    return float(np.sqrt(np.sum(np.abs(series.coeffs) ** 2 * weights.values[: series.order])))


def default_order(rho: float) -> int:
    """Truncation order with rho^N below 1e-15, capped"""
    if rho <= 0:
        return 2
    if rho >= 1:
        return MAX_ORDER
    return min(MAX_ORDER, max(2, math.ceil(math.log(NORM_TAIL) / math.log(rho))))


def space_norm(phi: Symbol, weights: CoefWeights, order: Optional[int] = None) -> float:
    """
    ||phi||_omega = (sum |b_n|^2 w_n)^(1/2) from the Taylor coefficients of phi.

    Args:
        phi (Symbol): The symbol
        weights (CoefWeights): The weights of the space
        order (int): The truncation order, chosen from the sup norm when omitted
    """
    rho = phi.sup_norm
    if rho >= 1:
        logger.warning("%s has sup norm %.12g >= 1: the norm series tail may not converge", phi, rho)
    order = order or default_order(rho)
    return series_norm(taylor(phi, order), weights)

