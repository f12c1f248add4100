"""Capacity Classes

This module contains imports for the compact sets whose Green capacity is computed and the
three ways of computing it: closed forms, discrete equilibrium measures on boundary panels,
and the Dirichlet energy of a grid condenser potential.
"""

from .closed_form import (
    agm,
    cap_closed_form,
    cap_euclid_disk,
    cap_ph_disk,
    cap_segment,
    complete_elliptic_k,
    diameter_lower_bound,
    fit_segment_growth_constant,
)
from .compact_set import CompactSet, Curve, EuclidDisk, PhDisk, Segment, parse_compact_set
from .equilibrium import (
    EquilibriumSolution,
    PanelDiscretization,
    cap_equilibrium,
    discretize,
    dual_capacity_check,
    frostman_residual,
    green_potential,
    project_on_simplex,
    solve_equilibrium,
)
from .estimate import METHODS, CapacityError, CapacityEstimate
from .grid import GridSolution, cap_dirichlet_grid, grid_csv, solve_dirichlet_grid
from .kernel import green_kernel, green_matrix, panel_log_average

__all__ = [
    "METHODS",
    "CapacityError",
    "CapacityEstimate",
    "CompactSet",
    "Curve",
    "EquilibriumSolution",
    "EuclidDisk",
    "GridSolution",
    "PanelDiscretization",
    "PhDisk",
    "Segment",
    "agm",
    "cap_closed_form",
    "cap_dirichlet_grid",
    "cap_equilibrium",
    "cap_euclid_disk",
    "cap_ph_disk",
    "cap_segment",
    "complete_elliptic_k",
    "diameter_lower_bound",
    "discretize",
    "dual_capacity_check",
    "fit_segment_growth_constant",
    "frostman_residual",
    "green_kernel",
    "green_matrix",
    "green_potential",
    "grid_csv",
    "panel_log_average",
    "parse_compact_set",
    "project_on_simplex",
    "solve_dirichlet_grid",
    "solve_equilibrium",
]
