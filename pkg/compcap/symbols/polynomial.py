from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial

from compcap.series import PowerSeries
from compcap.symbols.primitive import Primitive, SymbolError


class Polynomial(Primitive):
    """z -> p_0 + p_1 z + ... + p_m z^m"""

    identifier = "poly"

    def __init__(self, *coeffs: complex):
        if not coeffs:
            raise SymbolError("A polynomial needs at least one coefficient")
        super().__init__(*coeffs)

    @classmethod
    def from_args(cls, args: Sequence[complex]) -> "Polynomial":
        return cls(*args)

    def __call__(self, z):
        return polynomial.polyval(np.asarray(z, dtype=complex), np.array(self.params))

    def substitute(self, inner: PowerSeries) -> PowerSeries:
        result = PowerSeries.constant(self.params[-1], inner.order)
        for coeff in reversed(self.params[:-1]):
            result = result * inner + coeff
        return result
