"""
The Green function of the unit disk and its averages over flat panels.

g(z, w) = log|1 - conj(w) z| - log|z - w|. The first term is smooth on D x D; the second
carries the logarithmic singularity and is integrated exactly over straight panels.
"""

import numpy as np
from scipy.special import xlogy

CHUNK = 1024


def green_kernel(z, w):
    """
    g(z, w) = log|(1 - conj(w) z) / (z - w)|, vectorized.

    Returns +inf where z == w; panel corrections handle the diagonal, not this function.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(1 - np.conj(w) * z)) - np.log(np.abs(z - w))


def _log_antiderivative(u: np.ndarray, y: np.ndarray) -> np.ndarray:
    """int_0^u log sqrt(s^2 + y^2) ds"""
    return 0.5 * xlogy(u, u * u + y * y) - u + y * np.arctan2(u, y)


def panel_log_average(z, start, end):
    """
    Mean of log|z - w| for w uniform on the straight panel [start, end], vectorized.

    Exact for every z, including points on the panel itself.
    """
    z = np.asarray(z, dtype=complex)
    start = np.asarray(start, dtype=complex)
    end = np.asarray(end, dtype=complex)
    length = np.abs(end - start)
    tangent = (end - start) / length
    local = (z - start) * np.conj(tangent)
    t, y = local.real, np.abs(local.imag)
    return (_log_antiderivative(t, y) - _log_antiderivative(t - length, y)) / length


def self_energy(nodes: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Panel average of g(z_i, .) over a flat panel of length l_i centered at z_i

    log(1 - |z_i|^2) for the smooth part and 1 - log(l_i / 2) for the logarithmic one.
    """
    return np.log1p(-np.abs(nodes) ** 2) + 1.0 - np.log(lengths / 2.0)


def green_matrix(nodes: np.ndarray, lengths: np.ndarray, breakpoints: np.ndarray) -> np.ndarray:
    """
    G[i, j]: the Green potential at node i of a unit mass spread evenly over panel j.

    Panel j runs from breakpoints[j] to breakpoints[j + 1]. The smooth part is taken at the
    node, the singular part is averaged exactly over the panel, and the diagonal uses
    ``self_energy``. The result is symmetrized.
    """
    target = nodes[:, None]
    matrix = np.log(np.abs(1 - np.conj(nodes)[None, :] * target)) - panel_log_average(
        target, breakpoints[None, :-1], breakpoints[None, 1:]
    )
    np.fill_diagonal(matrix, self_energy(nodes, lengths))
    return 0.5 * (matrix + matrix.T)


def panel_potential(points, masses: np.ndarray, nodes: np.ndarray, breakpoints: np.ndarray) -> np.ndarray:
    """sum_j masses_j (log|1 - conj(z_j) z| - mean over panel j of log|z - w|), vectorized over points"""
    points = np.asarray(points, dtype=complex)
    flat = points.ravel()
    result = np.empty(flat.size)
    for first in range(0, flat.size, CHUNK):
        chunk = flat[first : first + CHUNK, None]
        values = np.log(np.abs(1 - np.conj(nodes)[None, :] * chunk)) - panel_log_average(
            chunk, breakpoints[None, :-1], breakpoints[None, 1:]
        )
        result[first : first + CHUNK] = values @ masses
    return result.reshape(points.shape)
