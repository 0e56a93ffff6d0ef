"""Constrained gradient flows of curves on surfaces with C^1 cubic Hermite elements."""
from .assembly import BoundaryCondition, bending_matrix, linearized_constraints, mass_matrix
from .energy import bending_energy, constraint_violations, geodesic_energy, indentation_energy
from .errors import (CurveflowError, DegenerateCurveError, InvalidInitialStateError,
                     ProjectionError, SingularSurfacePointError, StepSolveError)
from .flows import FlowConfig, FlowTrace, run, step_bending, step_geodesic, step_indentation
from .initial import (project_to_admissible, random_periodic_admissible, reparametrize_arclength,
                      single_fold_admissible, torus_seed)
from .mesh_hermite import HermiteCurve, Partition, interpolate_31, make_uniform_partition
from .surface import LevelSetSurface, sphere, torus

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition", "CurveflowError", "DegenerateCurveError", "FlowConfig", "FlowTrace",
    "HermiteCurve", "InvalidInitialStateError", "LevelSetSurface", "Partition", "ProjectionError",
    "SingularSurfacePointError", "StepSolveError", "bending_energy", "bending_matrix",
    "constraint_violations", "geodesic_energy", "indentation_energy", "interpolate_31",
    "linearized_constraints", "make_uniform_partition", "mass_matrix", "project_to_admissible",
    "random_periodic_admissible", "reparametrize_arclength", "run", "single_fold_admissible",
    "sphere", "step_bending", "step_geodesic", "step_indentation", "torus", "torus_seed",
]
