import numpy as np

from compcap.series import PowerSeries
from compcap.symbols.primitive import Primitive, SymbolError


class Affine(Primitive):
    """z -> a z + b"""

    identifier = "affine"
    arity = 2

    def __init__(self, a: complex, b: complex):
        super().__init__(a, b)
        self.a, self.b = self.params

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [0, 1]], dtype=complex)

    def __call__(self, z):
        return self.a * np.asarray(z, dtype=complex) + self.b

    def substitute(self, inner: PowerSeries) -> PowerSeries:
        return inner * self.a + self.b

    def canonical(self) -> "Affine":
        """The map |a| z + |b|, whose composition operator is unitarily equivalent to this one's"""
        return Affine(abs(self.a), abs(self.b))


class Dilation(Affine):
    """z -> r z, with 0 < r < 1"""

    identifier = "dil"
    arity = 1

    def __init__(self, r: complex):
        r = complex(r)
        if r.imag != 0 or not 0 < r.real < 1:
            raise SymbolError(f"A dilation needs a real ratio 0 < r < 1, got {r}")
        super().__init__(r, 0)
        self.params = (r,)
        self.r = r.real

    def canonical(self) -> "Dilation":
        return self
