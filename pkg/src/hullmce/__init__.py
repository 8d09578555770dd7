"""Matrix code equivalence via one-dimensional hulls.

Solves D = P C Q^{-1} for matrix codes over odd prime fields by matching
normalized characteristic polynomials of hull generators of C A^T and
D B^T, then solving the resulting conjugacy problem.
"""

from .attack import AttackConfig, AttackResult, HullDict, Transform, attack, choose_budgets, preprocess, recover_Q
from .canon import Normalizer, canonicalize_bruteforce, canonicalize_fast, compute_normalized_charpoly, count_sep_classes
from .code import MatrixCode, apply_equivalence, code_equal, conjugate, dual, hull, map_by_A, random_code
from .conjugacy import ConjugacyInstance, find_P_diag, solve_conjugacy, solve_hull_conjugacy, solve_linearized
from .errors import AttackFailure, MCEError, NoSolution
from .field import FieldCtx, extension_field, prime_field
from .instances import Instance, PlantedSolution, gen_instance, read_instance, verify_solution, write_instance

__version__ = "0.1.0"

__all__ = [
    "AttackConfig", "AttackFailure", "AttackResult", "ConjugacyInstance", "FieldCtx", "HullDict", "Instance",
    "MCEError", "MatrixCode", "NoSolution", "Normalizer", "PlantedSolution", "Transform", "apply_equivalence",
    "attack", "canonicalize_bruteforce", "canonicalize_fast", "choose_budgets", "code_equal",
    "compute_normalized_charpoly", "conjugate", "count_sep_classes", "dual", "extension_field", "find_P_diag",
    "gen_instance", "hull", "map_by_A", "preprocess", "prime_field", "random_code", "read_instance", "recover_Q",
    "solve_conjugacy", "solve_hull_conjugacy", "solve_linearized", "verify_solution", "write_instance",
]
