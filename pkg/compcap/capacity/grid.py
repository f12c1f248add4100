"""
Capacity as a Dirichlet energy on a Cartesian grid.

The condenser potential u is 1 on the set, 0 outside the unit disk and discrete-harmonic
in between; cap = (1/2pi) int |grad u|^2.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import cg

from compcap.capacity.compact_set import CompactSet
from compcap.capacity.estimate import CapacityError, CapacityEstimate
from compcap.config import Config

logger = logging.getLogger(__name__)

MAX_SPACING = 1 / 128
CG_RTOL = 1e-10
CG_MAX_ITERATIONS = 50_000


@dataclass(frozen=True, eq=False)
class GridSolution:
    """The discrete condenser potential on the grid x_i = -1 + i h"""

    axis: np.ndarray
    potential: np.ndarray
    energy: float
    iterations: int

    @property
    def spacing(self) -> float:
        return float(self.axis[1] - self.axis[0])

    @property
    def capacity(self) -> float:
        return self.energy / (2 * math.pi)


def _laplacian(count: int) -> sparse.csr_matrix:
    second_difference = sparse.diags([-1.0, 2.0, -1.0], [-1, 0, 1], shape=(count, count))
    identity = sparse.identity(count)
    return (sparse.kron(identity, second_difference) + sparse.kron(second_difference, identity)).tocsr()


def solve_dirichlet_grid(compact_set: CompactSet, spacing: float) -> GridSolution:
    """
    Solve for the condenser potential with the 5-point Laplacian and conjugate gradients.

    The set is the union of the grid cells whose node lies in it; sets without interior are
    thickened by half a cell.

    Raises:
        CapacityError: If the set touches the unit circle, misses every node, or CG does not converge
    """
    count = int(round(2.0 / spacing)) + 1
    axis = np.linspace(-1.0, 1.0, count)
    z = axis[None, :] + 1j * axis[:, None]
    in_disk = np.abs(z) < 1
    in_set = compact_set.contains(z, tolerance=0.0 if compact_set.has_interior else 0.5 * spacing)
    if np.any(in_set & ~in_disk):
        raise CapacityError(f"{compact_set} touches the unit circle at grid spacing {spacing:g}")
    if not np.any(in_set):
        raise CapacityError(f"{compact_set} contains no node of the grid with spacing {spacing:g}")
    free = np.flatnonzero((in_disk & ~in_set).ravel())
    fixed = np.flatnonzero(in_set.ravel())
    laplacian = _laplacian(count)[free]
    rhs = -(laplacian[:, fixed] @ np.ones(fixed.size))
    iterations = 0

    def count_iteration(_):
        nonlocal iterations
        iterations += 1

    values, info = cg(laplacian[:, free], rhs, rtol=CG_RTOL, maxiter=CG_MAX_ITERATIONS, callback=count_iteration)
    if info != 0:
        raise CapacityError(f"CG did not converge on {free.size} unknowns (info={info})")
    potential = np.zeros(count * count)
    potential[free] = values
    potential[fixed] = 1.0
    potential = potential.reshape(count, count)
    energy = float(np.sum(np.diff(potential, axis=0) ** 2) + np.sum(np.diff(potential, axis=1) ** 2))
    logger.debug("Grid h=%g: %d unknowns, %d CG iterations, energy %.12g", spacing, free.size, iterations, energy)
    return GridSolution(axis=axis, potential=potential, energy=energy, iterations=iterations)


def cap_dirichlet_grid(compact_set: CompactSet, spacing: float = 1 / 256) -> CapacityEstimate:
    """
    Capacity from the discrete Dirichlet energy at spacing h.

    The error indicator is |cap_h - cap_2h|, the Richardson estimate of the error of a
    first-order method.

    Args:
        compact_set (CompactSet): The set
        spacing (float): The grid spacing h <= 1/128
    """
    if spacing > MAX_SPACING:
        raise CapacityError(f"The grid spacing must be <= 1/128, got {spacing:g}")
    fine = solve_dirichlet_grid(compact_set, spacing)
    coarse = solve_dirichlet_grid(compact_set, 2 * spacing)
    return CapacityEstimate(
        value=fine.capacity,
        method="grid",
        error_indicator=abs(fine.capacity - coarse.capacity),
        solution=fine,
    )


@Config.call_if("artifacts.grid")
def grid_csv(solution: GridSolution) -> str:
    """(x, y, u) rows for the nodes inside the unit disk"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["x", "y", "u"])
    for row, y in enumerate(solution.axis):
        for column, x in enumerate(solution.axis):
            if x * x + y * y < 1:
                writer.writerow([repr(float(x)), repr(float(y)), repr(float(solution.potential[row, column]))])
    return buffer.getvalue()
