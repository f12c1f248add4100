import re
from typing import Optional, Sequence

import numpy as np

from compcap.series import PowerSeries

_TEXT_FORM = re.compile(r"^\s*([a-zA-Z_]+)\s*\(([^()]*)\)\s*$")


class SymbolError(ValueError):
    """Exception raised for an invalid symbol or an unsupported operation on it"""


class PoleError(SymbolError):
    """Exception raised when a fractional-linear map is evaluated at its pole"""


def parse_complex(token: str) -> complex:
    """Parse a number written as ``0.3``, ``-0.2+0.1j`` or ``0.1i``"""
    token = token.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(token)
    except ValueError as err:
        raise SymbolError(f"Cannot parse number {token!r}") from err


class Primitive:
    """Primitive base class

    This class represents one closed-form analytic map of a symbol chain.
    Subclasses are matched against the text form by their ``identifier``.
    """

    identifier: Optional[str] = None
    arity: Optional[int] = None

    def __init__(self, *params: complex):
        self.params = tuple(complex(param) for param in params)

    @classmethod
    def get_primitive(cls, name: str) -> type["Primitive"]:
        """Get the primitive class for a text-form name

        Args:
            name (str): The name, e.g. ``affine`` or ``dil``

        Returns:
            type[Primitive]: The primitive class

        Raises:
            SymbolError: If no primitive has that name
        """
        for primitive in cls.__subclasses__():
            if primitive.match(name):
                return primitive
            try:
                return primitive.get_primitive(name)
            except SymbolError:
                continue
        raise SymbolError(f"Unknown symbol primitive {name!r}")

    @classmethod
    def match(cls, name: str) -> bool:
        """Check if the name is this primitive's identifier"""
        return cls.identifier is not None and cls.identifier == name.lower()

    @classmethod
    def parse(cls, text: str) -> "Primitive":
        """Build a primitive from its text form, e.g. ``mobius(1,0,0.5,2)``"""
        if not (match := _TEXT_FORM.match(text)):
            raise SymbolError(f"Cannot parse symbol primitive {text!r}")
        name, raw_args = match.groups()
        primitive = cls.get_primitive(name)
        args = [parse_complex(arg) for arg in raw_args.split(",") if arg.strip()]
        if primitive.arity is not None and len(args) != primitive.arity:
            raise SymbolError(f"{name} takes {primitive.arity} arguments, got {len(args)}")
        return primitive.from_args(args)

    @classmethod
    def from_args(cls, args: Sequence[complex]) -> "Primitive":
        return cls(*args)

    @property
    def is_real(self) -> bool:
        """True when every parameter is real"""
        return all(param.imag == 0 for param in self.params)

    def matrix(self) -> Optional[np.ndarray]:
        """The 2x2 matrix [[a, b], [c, d]] of a fractional-linear primitive, None otherwise"""
        return None

    def __call__(self, z):
        raise NotImplementedError

    def substitute(self, inner: PowerSeries) -> PowerSeries:
        """Taylor coefficients of self(inner(z)), truncated at the order of inner"""
        raise NotImplementedError

    def to_text(self) -> str:
        return f"{self.identifier}({','.join(format_number(param) for param in self.params)})"

    def __repr__(self) -> str:
        return self.to_text()

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.params == other.params

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.params))


def format_number(value: complex) -> str:
    if value.imag == 0:
        return repr(value.real)
    return repr(value).strip("()")
