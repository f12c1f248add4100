import numpy as np

from compcap.series import PowerSeries
from compcap.symbols.primitive import PoleError, Primitive, SymbolError


class Moebius(Primitive):
    """z -> (a z + b) / (c z + d)

    With ``disk_preserving=True`` the construction checks the conditions
    |a|^2 + |b|^2 + 2|conj(a) b - conj(c) d| <= |c|^2 + |d|^2 and |c| <= |d|.
    """

    identifier = "mobius"
    arity = 4

    def __init__(self, a: complex, b: complex, c: complex, d: complex, disk_preserving: bool = False):
        super().__init__(a, b, c, d)
        self.a, self.b, self.c, self.d = self.params
        if self.a * self.d - self.b * self.c == 0:
            raise SymbolError(f"Degenerate fractional-linear map {self.to_text()}: ad - bc = 0")
        if disk_preserving and not self.maps_disk_into_disk():
            raise SymbolError(f"{self.to_text()} does not map the unit disk into itself")

    def maps_disk_into_disk(self, tolerance: float = 1e-12) -> bool:
        """Check the two conditions under which the map sends the disk into the disk"""
        a, b, c, d = self.params
        lhs = abs(a) ** 2 + abs(b) ** 2 + 2 * abs(a.conjugate() * b - c.conjugate() * d)
        return lhs <= abs(c) ** 2 + abs(d) ** 2 + tolerance and abs(c) <= abs(d) + tolerance

    @property
    def pole(self):
        return None if self.c == 0 else -self.d / self.c

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        denominator = self.c * z + self.d
        if np.any(denominator == 0):
            raise PoleError(f"{self.to_text()} evaluated at its pole {self.pole}")
        return (self.a * z + self.b) / denominator

    def substitute(self, inner: PowerSeries) -> PowerSeries:
        if abs(self.c) >= abs(self.d):
            raise SymbolError(f"{self.to_text()} has |c| >= |d|: its geometric expansion does not converge")
        return (inner * self.a + self.b) / (inner * self.c + self.d)


class Automorphism(Moebius):
    """The involutive disk automorphism z -> (a - z) / (1 - conj(a) z), |a| < 1"""

    identifier = "auto"
    arity = 1

    def __init__(self, a: complex):
        a = complex(a)
        if not abs(a) < 1:
            raise SymbolError(f"An automorphism needs |a| < 1, got {a}")
        super().__init__(-1, a, -a.conjugate(), 1)
        self.params = (a,)
        self.point = a

    @property
    def is_real(self) -> bool:
        return self.point.imag == 0

    def matrix(self) -> np.ndarray:
        return np.array([[-1, self.point], [-self.point.conjugate(), 1]], dtype=complex)
