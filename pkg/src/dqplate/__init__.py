"""Differential-quadrature solver for nonlinear bending of rectangular plates."""

from .bc_builder import (
    CLAMPED,
    SIMPLY_SUPPORTED,
    BoundaryOperatorSet,
    build_clamped,
    build_delta_rows,
    build_operators,
    build_ss,
)
from .dq_core import (
    CHEBYSHEV,
    UNIFORM,
    DiffMatrices,
    Grid1D,
    chebyshev_fast_weights,
    diff_matrices,
    diff_matrices_higher,
    diff_matrix_first,
    make_grid,
)
from .newton_solver import (
    FINITE_DIFFERENCE,
    SJT_ANALYTIC,
    NewtonReport,
    PlateSolution,
    SweepPoint,
    fd_jacobian,
    load_sweep,
    newton,
    solve_plate,
)
from .plate_model import (
    AssembledSystem,
    DerivedMaterial,
    PlateSpec,
    SolutionField,
    assemble,
    build_system,
    coupled_residual,
    derive_material,
    jacobian,
    l_vectors,
    linear_solve,
    recover_fields,
    recover_inplane,
    residual,
)

__version__ = "0.1.0"

__all__ = [
    "AssembledSystem",
    "BoundaryOperatorSet",
    "CHEBYSHEV",
    "CLAMPED",
    "DerivedMaterial",
    "DiffMatrices",
    "FINITE_DIFFERENCE",
    "Grid1D",
    "NewtonReport",
    "PlateSolution",
    "PlateSpec",
    "SIMPLY_SUPPORTED",
    "SJT_ANALYTIC",
    "SolutionField",
    "SweepPoint",
    "UNIFORM",
    "assemble",
    "build_clamped",
    "build_delta_rows",
    "build_operators",
    "build_ss",
    "build_system",
    "chebyshev_fast_weights",
    "coupled_residual",
    "derive_material",
    "diff_matrices",
    "diff_matrices_higher",
    "diff_matrix_first",
    "fd_jacobian",
    "jacobian",
    "l_vectors",
    "linear_solve",
    "load_sweep",
    "make_grid",
    "newton",
    "recover_fields",
    "recover_inplane",
    "residual",
    "solve_plate",
]
