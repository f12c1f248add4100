"""Truncated power series about 0, with arithmetic closed under the truncation order."""

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from numpy.polynomial import polynomial
from scipy.signal import lfilter

Scalar = Union[int, float, complex]


@dataclass(frozen=True, eq=False)
class PowerSeries:
    """Coefficients c_0..c_{N-1} of a series truncated at order N"""

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValueError("A power series needs a non-empty 1-d coefficient array")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("Power series coefficients must be finite")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[Scalar], order: int) -> "PowerSeries":
        """Pad or cut the coefficients to the given order"""
        padded = np.zeros(order, dtype=complex)
        values = np.asarray(coeffs, dtype=complex)[:order]
        padded[: values.size] = values
        return cls(padded)

    @classmethod
    def constant(cls, value: Scalar, order: int) -> "PowerSeries":
        return cls.from_coeffs([value], order)

    @classmethod
    def identity(cls, order: int) -> "PowerSeries":
        """The series of z"""
        return cls.from_coeffs([0, 1], order)

    @property
    def order(self) -> int:
        return self.coeffs.size

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.coeffs.imag == 0))

    def _other_coeffs(self, other: Union["PowerSeries", Scalar]) -> np.ndarray:
        if isinstance(other, PowerSeries):
            if other.order != self.order:
                raise ValueError(f"Order mismatch: {self.order} != {other.order}")
            return other.coeffs
        return PowerSeries.constant(other, self.order).coeffs

    def __add__(self, other):
        return PowerSeries(self.coeffs + self._other_coeffs(other))

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(-self.coeffs)

    def __sub__(self, other):
        return PowerSeries(self.coeffs - self._other_coeffs(other))

    def __rsub__(self, other):
        return PowerSeries(self._other_coeffs(other) - self.coeffs)

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries(self.coeffs * other)
        return PowerSeries(np.convolve(self.coeffs, self._other_coeffs(other))[: self.order])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries(self.coeffs / other)
        denominator = self._other_coeffs(other)
        if denominator[0] == 0:
            raise ZeroDivisionError("Series division needs a non-zero constant term in the denominator")
        impulse = np.zeros(self.order, dtype=complex)
        impulse[0] = 1.0
        # the impulse response of num/den is the Taylor expansion of the quotient
        return PowerSeries(lfilter(self.coeffs, denominator, impulse))

    def __pow__(self, k: int):
        return series_pow(self, k, self.order)

    def __call__(self, z):
        """Evaluate the truncated series (Horner), vectorized over z"""
        return polynomial.polyval(z, self.coeffs)

    def __repr__(self) -> str:
        return f"PowerSeries(order={self.order}, coeffs={np.array2string(self.coeffs[:6], precision=6)}...)"


def series_pow(series: PowerSeries, k: int, order: int) -> PowerSeries:
    """
    Coefficients of series^k modulo z^order, by binary exponentiation.

    Args:
        series (PowerSeries): The base series
        k (int): The exponent, k >= 0
        order (int): The truncation order of the result

    Returns:
        PowerSeries: The truncated power
    """
    if k < 0:
        raise ValueError(f"The exponent must be >= 0, got {k}")
    base = PowerSeries.from_coeffs(series.coeffs, order)
    result = PowerSeries.constant(1, order)
    while k:
        if k & 1:
            result = result * base
        k >>= 1
        if k:
            base = base * base
    return result


def series_powers(series: PowerSeries, count: int) -> np.ndarray:
    """
    Matrix whose column k holds the coefficients of series^k, for 0 <= k < count.

    Successive truncated products give the same coefficients as series_pow for each k
    with a single multiplication per column.
    """
    order = series.order
    columns = np.zeros((order, count), dtype=complex)
    column = PowerSeries.constant(1, order)
    for k in range(count):
        columns[:, k] = column.coeffs
        column = column * series
    return columns
