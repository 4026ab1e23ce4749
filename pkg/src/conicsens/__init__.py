"""Sensitivity analysis of conic linear programs.

The package solves ``min{c^T x : A x - b in K}`` over products of orthants,
second-order cones and polyhedral cones, and studies how the optimal value
reacts to perturbations of ``b`` and ``c``.
"""
from .cones import (Cone, GeneratedV, Orthant, PolyhedralH, SecondOrder,
                    canonical_interior_point, contains, dual, interior_contains)
from .errors import (ConicSensError, DimensionError, EmptyInterior, HypothesisViolation,
                     NotPolyhedral, NumericalFailure, RangeTestFailed, SchemaError)
from .extreal import INF, NEG_INF, ExtReal
from .problem import (ConicProgram, Perturbation, build_dual, load_problem, parse_problem,
                      perturb, reduce_polyhedral, serialize_problem)
from .solver import (SolverSettings, Solution, certify_strict_dual, certify_strict_primal,
                     solve, solve_any, solve_level_set)

__version__ = "0.1.0"
