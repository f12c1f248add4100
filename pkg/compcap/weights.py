"""
Coefficient weights of weighted analytic Hilbert spaces.

A radial weight omega on [0, 1) turns ``||f||^2 = |f(0)|^2 + int |f'|^2 omega dA`` into the
sequence norm ``sum |b_n|^2 w_n`` with ``w_0 = 1`` and ``w_n = 2 n^2 int_0^1 r^(2n-1) omega(r) dr``.
"""

import csv
import io
import logging
import math
import re
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy.special import betaln

logger = logging.getLogger(__name__)

CLASSICAL_KINDS = ("hardy", "bergman", "dirichlet")
QUAD_RTOL = 1e-12


class WeightError(ValueError):
    """Exception raised for an invalid weight or an ill-posed weight quadrature"""


@dataclass(frozen=True)
class WeightSpec:
    """
    Description of the space H_omega.

    Exactly one variant is populated:
      - ``alpha``: omega(r) = (1 - r^2)^alpha, alpha > -1
      - ``kind``: a classical coefficient sequence (hardy, bergman, dirichlet)
      - ``omega``: a custom radial weight, positive and integrable on [0, 1)
    """

    alpha: Optional[float] = None
    kind: Optional[str] = None
    omega: Optional[Callable[[float], float]] = field(default=None, compare=False)
    label: Optional[str] = None

    def __post_init__(self):
        populated = sum(value is not None for value in (self.alpha, self.kind, self.omega))
        if populated != 1:
            raise WeightError("A weight spec needs exactly one of alpha, kind or omega")
        if self.alpha is not None and not self.alpha > -1:
            raise WeightError(f"alpha must be > -1, got {self.alpha}")
        if self.kind is not None and self.kind not in CLASSICAL_KINDS:
            raise WeightError(f"Unknown classical weight {self.kind!r}, expected one of {CLASSICAL_KINDS}")

    @classmethod
    def Alpha(cls, alpha: float) -> "WeightSpec":
        return cls(alpha=float(alpha))

    @classmethod
    def ClassicalSequence(cls, kind: str) -> "WeightSpec":
        return cls(kind=kind)

    @classmethod
    def CustomRadial(cls, omega: Callable[[float], float], label: str = "custom") -> "WeightSpec":
        _validate_radial(omega)
        return cls(omega=omega, label=label)

    @classmethod
    def parse(cls, text: str) -> "WeightSpec":
        """Parse ``hardy``, ``bergman``, ``dirichlet`` or ``alpha(<real>)``"""
        text = text.strip().lower()
        if text in CLASSICAL_KINDS:
            return cls.ClassicalSequence(text)
        if match := re.fullmatch(r"alpha\(\s*([-+0-9.eE]+)\s*\)", text):
            return cls.Alpha(float(match.group(1)))
        raise WeightError(f"Cannot parse weight spec {text!r}")

    @property
    def is_integral(self) -> bool:
        """True when the weights come from a radial integral (w_0 = 1 exactly)"""
        return self.kind is None

    def __str__(self) -> str:
        if self.alpha is not None:
            return f"alpha({self.alpha:g})"
        if self.kind is not None:
            return self.kind
        return f"radial({self.label})"


@dataclass(frozen=True, eq=False)
class CoefWeights:
    """The weights w_0..w_{n_max} of a WeightSpec"""

    spec: WeightSpec
    values: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, n):
        return self.values[n]

    def extended(self, n_max: int) -> "CoefWeights":
        """Return these weights, recomputed up to n_max if they are shorter"""
        if n_max <= self.n_max:
            return self
        return coef_weights(self.spec, n_max)

    def to_csv(self) -> str:
        """Dump (n, w_n) rows for debugging"""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["n", "w_n"])
        for n, w_n in enumerate(self.values):
            writer.writerow([n, repr(float(w_n))])
        return buffer.getvalue()


def _validate_radial(omega: Callable[[float], float]) -> None:
    samples = np.linspace(0.0, 1.0, 1025)[:-1]
    values = np.array([omega(r) for r in samples], dtype=float)
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise WeightError("omega must be strictly positive and finite on [0, 1)")
    mass = _quad(omega, 0)
    if not (math.isfinite(mass) and mass > 0):
        raise WeightError(f"omega is not integrable on [0, 1): quadrature gave {mass}")


def _quad(omega: Callable[[float], float], n: int) -> float:
    """int_0^1 r^(2n-1) omega(r) dr (int_0^1 omega for n = 0), split near r = 1"""
    power = 2 * n - 1

    def integrand(r: float) -> float:
        return omega(r) if n == 0 else r**power * omega(r)

    # the integrand concentrates in a boundary layer of width ~1/n at r = 1
    split = 1.0 - 1.0 / (2.0 * max(n, 1))
    total = 0.0
    for lower, upper in ((0.0, split), (split, 1.0)):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            result = integrate.quad(integrand, lower, upper, epsabs=0.0, epsrel=QUAD_RTOL, limit=500, full_output=1)
        if len(result) > 3:
            raise WeightError(f"Weight quadrature did not converge for n={n} on [{lower}, {upper}]: {result[3]}")
        total += result[0]
    return total


def _alpha_weights(alpha: float, n_max: int) -> np.ndarray:
    n = np.arange(1, n_max + 1, dtype=float)
    values = np.empty(n_max + 1)
    values[0] = 1.0
    # w_n = n^2 B(n, alpha + 1), through log-Gamma so that large n does not overflow
    values[1:] = np.exp(2.0 * np.log(n) + betaln(n, alpha + 1.0))
    return values


def _classical_weights(kind: str, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1, dtype=float)
    if kind == "hardy":
        return np.ones(n_max + 1)
    if kind == "bergman":
        return 1.0 / (n + 1.0)
    values = n.copy()
    values[0] = 1.0
    return values


def coef_weights(spec: WeightSpec, n_max: int) -> CoefWeights:
    """
    Compute the coefficient weights w_0..w_{n_max}.

    Args:
        spec (WeightSpec): The space description
        n_max (int): The last index

    Returns:
        CoefWeights: The weights

    Raises:
        WeightError: If n_max < 1 or the quadrature of a custom weight does not converge
    """
    if n_max < 1:
        raise WeightError(f"n_max must be >= 1, got {n_max}")
    if spec.alpha is not None:
        values = _alpha_weights(spec.alpha, n_max)
    elif spec.kind is not None:
        values = _classical_weights(spec.kind, n_max)
    else:
        values = np.empty(n_max + 1)
        values[0] = 1.0
        for n in range(1, n_max + 1):
            values[n] = 2.0 * n * n * _quad(spec.omega, n)
        logger.debug("Computed %d radial weights for %s by quadrature", n_max, spec)
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise WeightError(f"Weights for {spec} are not all positive and finite")
    values.setflags(write=False)
    return CoefWeights(spec=spec, values=values)


def check_siz_bounds(weights: CoefWeights, epsilon: float) -> tuple[float, float, bool]:
    """
    Empirical constants of the two-sided bound delta_eps e^(-eps n) <= w_n <= C n^2.

    Args:
        weights (CoefWeights): The weights to scan
        epsilon (float): The exponential rate of the lower bound

    Returns:
        tuple: (delta_eps, C, ok) over 1 <= n <= n_max
    """
    n = np.arange(1, weights.n_max + 1, dtype=float)
    w_n = weights.values[1:]
    constant = float(np.max(w_n / n**2))
    delta = float(np.min(w_n * np.exp(epsilon * n)))
    ok = all(math.isfinite(x) and x > 0 for x in (delta, constant))
    return delta, constant, ok
