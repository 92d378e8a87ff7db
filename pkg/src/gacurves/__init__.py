"""gacurves: general-affine, equiaffine and projective invariants of curves.

The package computes differential invariants of plane and space curves
from exact Taylor jets, reconstructs curves from curvature data, checks
the extremality equations of the associated length functionals,
classifies curves with constant invariants and solves the Abel equations
that produce graphs with prescribed curvature.

Modules
-------
jet, expr, curves
    truncated Taylor arithmetic, the expression language and curve input
plane, space
    invariants of plane and space curves
reconstruct
    curves from curvature profiles
extremal
    residuals of the extremality equations
classify
    catalogs of curves with constant invariants
abel
    graph immersions via Abel equations
io, cli
    serialization and the ``gacurves`` command
"""

__version__ = "0.1.0"

from .abel import AbelProblem, abel_solve, mu_equation_residual
from .classify import (
    classify_plane_constant,
    classify_projective_constant,
    classify_space_constant,
    verify_catalog,
)
from .curves import (
    BUILTINS,
    CurveSpec,
    builtin,
    eval_curve,
    from_expressions,
    from_jets,
    from_samples,
    reverse_orientation,
)
from .errors import GACurveError
from .expr import parse_expression
from .extremal import (
    equiaffine_space_extremal_check,
    ga_plane_general_residual,
    ga_plane_residual,
    ga_space_residuals,
    linear_complex_extremal_check,
    projective_extremal_residuals,
)
from .jet import Jet, jet_variable
from .plane import plane_graph_invariants, plane_invariants_at, plane_ode_coeffs, scan_curve
from .reconstruct import (
    ga_normalize,
    plane_profile,
    reconstruct,
    reconstruct_plane,
    reconstruct_space,
    space_profile,
)
from .space import (
    equiaffine_space_invariants,
    projective_space_invariants,
    scan_space,
    space_invariants_at,
    space_ode_coeffs,
)

__all__ = [
    "__version__",
    "AbelProblem", "abel_solve", "mu_equation_residual",
    "classify_plane_constant", "classify_projective_constant", "classify_space_constant", "verify_catalog",
    "BUILTINS", "CurveSpec", "builtin", "eval_curve", "from_expressions", "from_jets", "from_samples",
    "reverse_orientation",
    "GACurveError", "parse_expression",
    "equiaffine_space_extremal_check", "ga_plane_general_residual", "ga_plane_residual", "ga_space_residuals",
    "linear_complex_extremal_check", "projective_extremal_residuals",
    "Jet", "jet_variable",
    "plane_graph_invariants", "plane_invariants_at", "plane_ode_coeffs", "scan_curve",
    "ga_normalize", "plane_profile", "reconstruct", "reconstruct_plane", "reconstruct_space", "space_profile",
    "equiaffine_space_invariants", "projective_space_invariants", "scan_space", "space_invariants_at",
    "space_ode_coeffs",
]
