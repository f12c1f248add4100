"""
Discrete equilibrium measures on panel discretizations of compact sets.

The measure lives on the boundary of the set, one mass per panel spread evenly over it.
Minimizing the discrete energy mu^T G mu over the probability simplex gives the energy V
and the capacity 1/V.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from compcap.capacity.compact_set import CompactSet, Curve, EuclidDisk, Segment
from compcap.capacity.estimate import CapacityError, CapacityEstimate
from compcap.capacity.kernel import green_matrix, panel_potential

logger = logging.getLogger(__name__)

MIN_PANELS = 32
NEGATIVE_MASS = -1e-10
KKT_TOL = 1e-8
MAX_ITERATIONS = 100_000
DUAL_GRID = 96


@dataclass(frozen=True, eq=False)
class PanelDiscretization:
    """
    M panels on the boundary of a compact set.

    Panel i is the straight piece from breakpoints[i] to breakpoints[i + 1], with node z_i
    and length l_i. For closed boundaries breakpoints[M] == breakpoints[0].
    """

    nodes: np.ndarray
    lengths: np.ndarray
    breakpoints: np.ndarray
    closed: bool

    @property
    def size(self) -> int:
        return self.nodes.size


@dataclass(frozen=True, eq=False)
class EquilibriumSolution:
    """The discrete equilibrium measure and its energy"""

    masses: np.ndarray
    energy: float
    frostman_residual: float
    method: str = "saddle"
    iterations: int = 0

    @property
    def capacity(self) -> float:
        return 1.0 / self.energy


def discretize(compact_set: CompactSet, panels: int) -> PanelDiscretization:
    """
    Split the boundary of the set into panels.

    Circles and curves get equal-arclength panels with nodes at the arclength midpoints;
    segments get Chebyshev panels, clustered at the endpoints where the equilibrium density
    blows up.

    Args:
        compact_set (CompactSet): The set
        panels (int): The panel count M >= 32

    Returns:
        PanelDiscretization: The panels
    """
    if panels < MIN_PANELS:
        raise CapacityError(f"Need at least {MIN_PANELS} panels, got {panels}")
    if isinstance(compact_set, EuclidDisk):
        theta = 2 * np.pi * np.arange(panels + 1) / panels
        breakpoints = compact_set.center + compact_set.radius * np.exp(1j * theta)
        breakpoints[-1] = breakpoints[0]
        nodes = compact_set.center + compact_set.radius * np.exp(1j * (theta[:-1] + np.pi / panels))
        lengths = np.full(panels, compact_set.boundary_length() / panels)
        return PanelDiscretization(nodes, lengths, breakpoints, closed=True)
    if isinstance(compact_set, Segment):
        middle, half = 0.5 * (compact_set.start + compact_set.end), 0.5 * (compact_set.end - compact_set.start)
        breakpoints = middle - half * np.cos(np.pi * np.arange(panels + 1) / panels)
        nodes = middle - half * np.cos(np.pi * (np.arange(panels) + 0.5) / panels)
        return PanelDiscretization(nodes, np.abs(np.diff(breakpoints)), breakpoints, closed=False)
    if isinstance(compact_set, Curve):
        arclength = compact_set.arclength()
        total = arclength[-1]
        points = compact_set.points

        def at(s: np.ndarray) -> np.ndarray:
            return np.interp(s, arclength, points.real) + 1j * np.interp(s, arclength, points.imag)

        breakpoints = at(total * np.arange(panels + 1) / panels)
        breakpoints[-1] = breakpoints[0]
        nodes = at(total * (np.arange(panels) + 0.5) / panels)
        return PanelDiscretization(nodes, np.full(panels, total / panels), breakpoints, closed=True)
    raise CapacityError(f"Cannot discretize {compact_set!r}")


def project_on_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = 1}, by bisection on the sorted threshold"""
    u = np.sort(v)[::-1]
    u_cumsum = np.cumsum(u)
    lo, hi = 0, u.size - 1
    if u[hi] + (1.0 - u_cumsum[hi]) / (hi + 1.0) > 0:
        rho = hi
    else:
        while hi > lo + 1:
            middle = (lo + hi) // 2
            if u[middle] + (1.0 - u_cumsum[middle]) / (middle + 1.0) < 0:
                hi = middle
            else:
                lo = middle
        rho = lo
    shift = (1.0 - u_cumsum[rho]) / (rho + 1.0)
    return np.maximum(v + shift, 0.0)


def _kkt_residual(masses: np.ndarray, gradient: np.ndarray) -> float:
    return float(np.max(np.abs(masses - project_on_simplex(masses - gradient))))


def _projected_gradient(matrix: np.ndarray, start: np.ndarray) -> tuple[np.ndarray, int]:
    """Accelerated projected gradient for min mu^T G mu on the simplex"""
    lipschitz = 2.0 * linalg.eigvalsh(matrix, subset_by_index=[matrix.shape[0] - 1] * 2)[0]
    step = 1.0 / lipschitz
    masses = project_on_simplex(start)
    momentum, t = masses.copy(), 1.0
    for iteration in range(1, MAX_ITERATIONS + 1):
        updated = project_on_simplex(momentum - step * 2.0 * (matrix @ momentum))
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        momentum = updated + ((t - 1.0) / t_next) * (updated - masses)
        masses, t = updated, t_next
        if _kkt_residual(masses, 2.0 * (matrix @ masses)) < KKT_TOL:
            return masses, iteration
    raise CapacityError(f"Projected gradient did not reach KKT residual {KKT_TOL} in {MAX_ITERATIONS} iterations")


def _test_points(panels: PanelDiscretization) -> np.ndarray:
    # breakpoints sit between nodes, where the potential is not pinned by the solve
    return panels.breakpoints[:-1] if panels.closed else panels.breakpoints


def solve_equilibrium(panels: PanelDiscretization) -> EquilibriumSolution:
    """
    Minimize the discrete energy over probability vectors.

    The saddle system [G, 1; 1^T, 0] [mu; lambda] = [0; 1] is solved first; if a mass comes out
    below -1e-10 the solve falls back to projected gradient descent on the simplex.

    Raises:
        CapacityError: If the system is singular or the fallback does not converge
    """
    matrix = green_matrix(panels.nodes, panels.lengths, panels.breakpoints)
    size = panels.size
    saddle = np.zeros((size + 1, size + 1))
    saddle[:size, :size] = matrix
    saddle[:size, size] = saddle[size, :size] = 1.0
    rhs = np.zeros(size + 1)
    rhs[size] = 1.0
    try:
        masses = linalg.solve(saddle, rhs, assume_a="sym")[:size]
    except (linalg.LinAlgError, ValueError) as err:
        raise CapacityError(f"Singular equilibrium system for {size} panels: duplicate nodes?") from err
    method, iterations = "saddle", 0
    if np.min(masses) < NEGATIVE_MASS:
        logger.warning("Saddle solve gave a negative mass %.3g, falling back to projected gradient", np.min(masses))
        masses, iterations = _projected_gradient(matrix, masses)
        method = "projected_gradient"
    masses = np.maximum(masses, 0.0)
    masses /= masses.sum()
    energy = float(masses @ matrix @ masses)
    if not energy > 0:
        raise CapacityError(f"Non-positive discrete energy {energy}")
    potential = panel_potential(_test_points(panels), masses, panels.nodes, panels.breakpoints)
    residual = float(np.max(np.abs(potential - energy)) / energy)
    logger.debug("Equilibrium on %d panels by %s: V=%.12g, Frostman residual %.3g", size, method, energy, residual)
    return EquilibriumSolution(masses, energy, residual, method=method, iterations=iterations)


def green_potential(solution: EquilibriumSolution, panels: PanelDiscretization, z) -> np.ndarray:
    """
    G_mu(z) = sum_i mu_i g(z, z_i), with each mass spread over its panel.

    Points on a panel, nodes included, get the exact panel-averaged value.
    """
    return panel_potential(z, solution.masses, panels.nodes, panels.breakpoints)


def frostman_residual(solution: EquilibriumSolution, panels: PanelDiscretization, points=None) -> float:
    """max |G_mu - V| / V over points of the set, the panel breakpoints by default"""
    points = _test_points(panels) if points is None else np.asarray(points, dtype=complex)
    potential = green_potential(solution, panels, points)
    return float(np.max(np.abs(potential - solution.energy)) / solution.energy)


def dual_capacity_check(
    solution: EquilibriumSolution, panels: PanelDiscretization, compact_set: Optional[CompactSet] = None
) -> float:
    """
    max G_mu(z) cap over a sample grid of the disk.

    The potential of the equilibrium measure never exceeds V, so the value stays at 1 up to
    discretization error. Grid points of the set itself are skipped when it is given.
    """
    axis = np.linspace(-1.0, 1.0, DUAL_GRID + 1)[1:-1]
    grid = (axis[None, :] + 1j * axis[:, None]).ravel()
    grid = grid[np.abs(grid) < 1]
    if compact_set is not None:
        grid = grid[~compact_set.contains(grid)]
    points = np.concatenate([grid, _test_points(panels)])
    return float(np.max(green_potential(solution, panels, points))) * solution.capacity


def cap_equilibrium(compact_set: CompactSet, panels: int = 512) -> CapacityEstimate:
    """Capacity from the discrete equilibrium measure; the error indicator is the Frostman residual"""
    discretization = discretize(compact_set, panels)
    solution = solve_equilibrium(discretization)
    return CapacityEstimate(
        value=solution.capacity,
        method="equilibrium",
        error_indicator=solution.frostman_residual,
        solution=solution,
    )
