"""Twisted Neumann-Zagier matrices and the twisted 1-loop invariant."""

from .laurent import (
    CanonicalForm,
    LaurentMatrix,
    LaurentPoly,
    lmat_det_exact,
    lmat_det_numeric,
    lp_canonicalize,
    lp_eq_mod,
    lp_is_palindromic,
)
from .triangulation import (
    Triangulation,
    TriangulationError,
    cyclic_cover,
    pachner_23,
    parse_triangulation,
    serialize_triangulation,
)
from .homology import (
    Cocycle,
    CocycleError,
    Flattening,
    FlatteningError,
    apply_coboundary,
    smith_decomposition,
    solve_cocycle,
    solve_flattening,
)
from .shapes import ShapeSolution, SolverError, solve_shapes, verify_solution, zeta_triple
from .twist import (
    TwistError,
    check_cover_factorization,
    check_pachner_nz,
    check_symplectic,
    circulant_assemble,
    fit_monomial_shifts,
    twisted_gluing_matrices,
    twisted_nz_matrices,
)
from .invariant import (
    InvariantError,
    check_cyclic_product,
    check_derivative,
    check_pachner_invariance,
    check_symmetry,
    one_loop,
    twisted_one_loop,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
