"""
nccell: noncommutative cells and K-theory boundary maps
"""
from .presentations import (parse_presentation, print_presentation,
                            registry_get, validate_presentation)
from .symbolic import NCPoly, normal_form, prove_identity, rewrite_system
from .reps import Rep, apply_genmap, check_relations
from .toeplitz import LaurentPoly, ToepOp, fredholm_oracle, index_boundary
from .conegrid import GridFun, exp_boundary_u, winding
from .boundary import (CELLS, ConeGridModel, ToeplitzModel, boundary_map,
                       class_of_Q_rep, invariance_suite)
from .report import Report
from .suites import run_suite
from .version import version as __version__


__all__ = (
    "parse_presentation",
    "print_presentation",
    "registry_get",
    "validate_presentation",
    "NCPoly",
    "normal_form",
    "prove_identity",
    "rewrite_system",
    "Rep",
    "apply_genmap",
    "check_relations",
    "LaurentPoly",
    "ToepOp",
    "fredholm_oracle",
    "index_boundary",
    "GridFun",
    "exp_boundary_u",
    "winding",
    "CELLS",
    "ConeGridModel",
    "ToeplitzModel",
    "boundary_map",
    "class_of_Q_rep",
    "invariance_suite",
    "Report",
    "run_suite",
)
