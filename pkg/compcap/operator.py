"""
Truncated matrices of composition operators and their approximation numbers.

In the orthonormal basis e_k = z^k / sqrt(w_k) of H_omega, the column k of C_phi holds the
coefficients of phi^k: A[j, k] = c_{j,k} sqrt(w_j / w_k). On a Hilbert space the approximation
numbers are the singular values, a_1 = ||T|| >= a_2 >= ...
"""

import csv
import io
import logging
import math
from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np
from scipy import linalg, stats

from compcap.series import series_powers
from compcap.symbols import Symbol, space_norm, taylor
from compcap.weights import CoefWeights

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 128
MAX_ORDER = 4096
MIN_ORDER = 8
WINDOW = (1e-10, 1e-2)
WINDOW_MARGIN = 5
MIN_WINDOW_POINTS = 10
CERTIFY_FACTOR = 1e-12
CLAMP = 1e-300


class OperatorError(ArithmeticError):
    """Exception raised when a composition operator cannot be assembled or decomposed"""


class BetaWindowError(OperatorError):
    """Exception raised when too few approximation numbers fall in the fit window

    The decay rate is too close to 0 or 1 for the truncation order and the precision;
    change N or the precision.
    """


@dataclass(frozen=True, eq=False)
class CompositionMatrix:
    """The N x N truncation of C_phi on H_omega"""

    matrix: np.ndarray
    symbol: Symbol
    weights: CoefWeights

    @property
    def order(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class SingularSpectrum:
    """Descending singular values; values[n - 1] is a_n"""

    values: np.ndarray

    def __len__(self) -> int:
        return self.values.size

    def a(self, n: int) -> float:
        """The n-th approximation number, n >= 1"""
        return float(self.values[n - 1])

    def to_csv(self) -> str:
        """(n, a_n, log a_n) rows"""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["n", "a_n", "log_a_n"])
        for n, value in enumerate(self.values, start=1):
            writer.writerow([n, repr(float(value)), repr(math.log(value)) if value > 0 else "-inf"])
        return buffer.getvalue()


@dataclass(frozen=True)
class BetaEstimate:
    """exp(slope) of the least-squares line log a_n against n over the window"""

    beta: float
    window: tuple[int, int]
    slope_stderr: float
    fit_r2: float
    order: Optional[int] = None

    @property
    def points(self) -> int:
        return self.window[1] - self.window[0] + 1

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "window": list(self.window),
            "slope_stderr": self.slope_stderr,
            "fit_r2": self.fit_r2,
            "N": self.order,
        }


def assemble_matrix(phi: Symbol, weights: CoefWeights, order: int) -> CompositionMatrix:
    """
    Assemble the truncated matrix of C_phi.

    Args:
        phi (Symbol): The symbol, with ||phi||_inf < 1
        weights (CoefWeights): The weights, with n_max >= N
        order (int): The truncation order N >= 8

    Returns:
        CompositionMatrix: A[j, k] = c_{j,k} sqrt(w_j / w_k), 0 <= j, k < N

    Raises:
        OperatorError: If ||phi||_inf >= 1, N < 8 or the weights are too short
    """
    if order < MIN_ORDER:
        raise OperatorError(f"The truncation order must be >= {MIN_ORDER}, got {order}")
    if weights.n_max < order:
        raise OperatorError(f"Weights go up to n={weights.n_max}, the matrix needs n={order}")
    if (rho := phi.sup_norm) >= 1:
        raise OperatorError(f"{phi} has sup norm {rho:.12g} >= 1: the matrix entries are unbounded in k")
    phi = phi.canonical()
    coefficients = series_powers(taylor(phi, order), order)
    scale = np.sqrt(weights.values[:order])
    matrix = coefficients * scale[:, None] / scale[None, :]
    if phi.is_real:
        matrix = matrix.real.copy()
    logger.debug("Assembled %dx%d matrix of C_phi for %s on %s", order, order, phi, weights.spec)
    return CompositionMatrix(matrix=matrix, symbol=phi, weights=weights)


def _extended_singular_values(matrix: np.ndarray, digits: int = 30) -> np.ndarray:
    with mpmath.workdps(digits):
        values = mpmath.svd(mpmath.matrix(matrix.tolist()), compute_uv=False)
        return np.array([float(abs(value)) for value in values])


def approximation_numbers(composition: CompositionMatrix, extended: bool = False) -> SingularSpectrum:
    """
    Singular values of the truncated matrix, in descending order.

    The LAPACK divide-and-conquer driver is tried first, then the QR-iteration driver, then an
    extended-precision decomposition. ``extended=True`` goes straight to the last one.
    Values below 1e-300 are clamped to 0.
    """
    matrix = composition.matrix
    if not np.all(np.isfinite(matrix)):
        raise OperatorError("The matrix has non-finite entries")
    values = None
    if not extended:
        for driver in ("gesdd", "gesvd"):
            try:
                values = linalg.svd(matrix, compute_uv=False, lapack_driver=driver)
                break
            except linalg.LinAlgError as err:
                logger.warning("SVD with %s did not converge (%s), retrying", driver, err)
    if values is None:
        logger.warning("Falling back to the extended-precision SVD for N=%d", composition.order)
        values = _extended_singular_values(matrix)
    values = np.sort(np.asarray(values, dtype=float))[::-1].copy()
    values[values < CLAMP] = 0.0
    values.setflags(write=False)
    return SingularSpectrum(values)


def truncation_tail_bound(phi: Symbol, weights: CoefWeights, order: int) -> float:
    """
    Upper bound on the operator-norm error of cutting C_phi at N columns.

    Sums sum_{k >= N} w_k^(-1/2) rho^k sqrt(1 + k^2 rho^-2) ||phi||_omega, explicitly while the terms
    matter and with a closed geometric tail after that.
    """
    rho = phi.sup_norm
    if rho >= 1:
        return math.inf
    if rho == 0:
        return 0.0
    norm = space_norm(phi, weights)
    # terms past `last` are below 1e-40 of the first
    last = order + max(16, math.ceil(math.log(1e-40) / math.log(rho)))
    weights = weights.extended(last)
    k = np.arange(order, last + 1, dtype=float)
    log_terms = -0.5 * np.log(weights.values[order : last + 1]) + k * math.log(rho) + 0.5 * np.log1p(k * k / rho**2)
    explicit = float(np.sum(np.exp(log_terms)))
    # beyond `last`: w_k^(-1/2) <= w_last^(-1/2) (k/last)^2, which holds for w_k >= w_last (last/k)^4,
    # and sqrt(1 + k^2 rho^-2) <= 2k/rho
    scale = weights.values[last] ** -0.5 * 2.0 / (rho * last * last)
    first = last + 1
    cubic_tail = rho**first * sum(
        math.comb(3, j) * first ** (3 - j) * _polylog_moment(rho, j) for j in range(4)
    )
    return norm * (explicit + scale * cubic_tail)


def _polylog_moment(rho: float, j: int) -> float:
    """sum_{m >= 0} m^j rho^m for j <= 3"""
    q = 1 - rho
    return (
        1 / q,
        rho / q**2,
        rho * (1 + rho) / q**3,
        rho * (1 + 4 * rho + rho * rho) / q**4,
    )[j]


def estimate_beta(
    spectrum: SingularSpectrum, window: tuple[float, float] = WINDOW, margin: int = WINDOW_MARGIN
) -> BetaEstimate:
    """
    Fit log a_n = slope n + intercept over the window and return beta = exp(slope).

    The window is {n : lo <= a_n <= hi} intersected with [margin, N - margin], taken as the
    longest run of consecutive indices.

    Raises:
        BetaWindowError: If fewer than 10 values fall in the window
    """
    lo, hi = window
    values = spectrum.values
    n = np.arange(1, values.size + 1)
    selected = (values >= lo) & (values <= hi) & (n >= margin) & (n <= values.size - margin)
    indices = n[selected]
    if indices.size < MIN_WINDOW_POINTS:
        raise BetaWindowError(
            f"Only {indices.size} approximation numbers in [{lo:g}, {hi:g}] for N={values.size}; "
            f"need {MIN_WINDOW_POINTS}"
        )
    # longest consecutive run
    breaks = np.flatnonzero(np.diff(indices) != 1)
    runs = np.split(indices, breaks + 1)
    run = max(runs, key=len)
    if run.size < MIN_WINDOW_POINTS:
        raise BetaWindowError(f"The fit window is not contiguous: longest run has {run.size} points")
    fit = stats.linregress(run.astype(float), np.log(values[run - 1]))
    return BetaEstimate(
        beta=float(math.exp(fit.slope)),
        window=(int(run[0]), int(run[-1])),
        slope_stderr=float(fit.stderr),
        fit_r2=float(fit.rvalue**2),
        order=int(values.size),
    )


def compute_beta(
    phi: Symbol,
    weights: CoefWeights,
    order: int = DEFAULT_ORDER,
    auto_grow: bool = True,
    window: tuple[float, float] = WINDOW,
) -> tuple[BetaEstimate, SingularSpectrum]:
    """
    Assemble, decompose and fit, doubling N until the truncation tail is negligible against the
    lower end of the fit window.
    """
    target = CERTIFY_FACTOR * window[0]
    while auto_grow and (bound := truncation_tail_bound(phi, weights, order)) >= target:
        if order >= MAX_ORDER:
            logger.warning("Tail bound %.3g at N=%d: the truncation of %s is not certified", bound, order, phi)
            break
        logger.info("Tail bound %.3g at N=%d is not below %.3g, doubling N", bound, order, target)
        order *= 2
    weights = weights.extended(order)
    spectrum = approximation_numbers(assemble_matrix(phi, weights, order))
    return estimate_beta(spectrum, window=window), spectrum


def clifford_dabkowski(a: float, b: float, n: int) -> float:
    """
    Exact a_n of C_phi for phi(z) = a z + b on the Hardy space: a^(n-1) Q^(n-1/2).

    Args:
        a (float): The slope, a > 0
        b (float): The intercept, b > 0, a + b < 1
        n (int): The index, n >= 1
    """
    return a ** (n - 1) * _cd_q(a, b) ** (n - 0.5)


def cd_beta(a: float, b: float) -> float:
    """beta = a Q for the affine map a z + b"""
    return a * _cd_q(a, b)


def cd_discriminant(a: float, b: float) -> float:
    """(a^2 - b^2 - 1)^2 - 4 b^2"""
    return (a * a - b * b - 1) ** 2 - 4 * b * b


def _cd_q(a: float, b: float) -> float:
    if not (a > 0 and b > 0 and a + b < 1):
        raise OperatorError(f"Need a, b > 0 and a + b < 1, got a={a}, b={b}")
    delta = cd_discriminant(a, b)
    # (1 + a + b)(1 + a - b)(1 - a + b)(1 - a - b) > 0 under the preconditions
    assert delta > 0, f"Negative discriminant {delta} for a={a}, b={b}"
    return (1 + a * a - b * b - math.sqrt(delta)) / (2 * a * a)
