"""Matricial numerical radius norms at finite dimension, with certified brackets."""
from ._search import SearchConfig
from .affiliated import (Factorization, ShiftGenerator, shift_generator, trivial_factorization,
                         two_by_two_generator, w_max, w_min, w_t_norm)
from .axioms import (CbLevel, CheckReport, LinearMap, NormOracle, Violation, cb_norm_estimate,
                     check_oi, check_oii, check_ow, check_wi, check_wii, check_wmin_functor,
                     random_map)
from .errors import (DegenerateInput, DomainError, FormatError, NoConvergence, NotHermitian,
                     SearchFailure, ShapeMismatch, SpaceMismatch, WRadiusError)
from .linalg import (HermitianSpectrum, assemble_block, hermitian_eigenvalues, jacobi_eigenvalues,
                     kron, matrix_from_json, matrix_to_json, operator_norm)
from .opspace import (ConcreteOperatorSpace, MatrixOverX, direct_sum, full_matrix_space, o_norm,
                      off_corner, random_element, random_space, realize, scalar_compress,
                      scalar_element, scalar_space, w_norm)
from .radius import (NormEstimate, amplified_w, numerical_radius, numerical_radius_fast,
                     radius_lower_bound_sampling, rotated_real_part)
from .tensor import (SymmetricRep, TensorRep, haagerup_norm, realize_tensor, tensor_chain,
                     wcb_norm, wh_alt_norm, wh_norm)

__version__ = "0.1.0"

__all__ = [
    "CbLevel", "CheckReport", "ConcreteOperatorSpace", "DegenerateInput", "DomainError",
    "Factorization", "FormatError", "HermitianSpectrum", "LinearMap", "MatrixOverX",
    "NoConvergence", "NormEstimate", "NormOracle", "NotHermitian", "SearchConfig",
    "SearchFailure", "ShapeMismatch", "ShiftGenerator", "SpaceMismatch", "SymmetricRep",
    "TensorRep", "Violation", "WRadiusError", "amplified_w", "assemble_block",
    "cb_norm_estimate", "check_oi", "check_oii", "check_ow", "check_wi", "check_wii",
    "check_wmin_functor", "direct_sum", "full_matrix_space", "haagerup_norm",
    "hermitian_eigenvalues", "jacobi_eigenvalues", "kron", "matrix_from_json", "matrix_to_json",
    "numerical_radius", "numerical_radius_fast", "o_norm", "off_corner", "operator_norm",
    "radius_lower_bound_sampling", "random_element", "random_map", "random_space", "realize",
    "realize_tensor", "rotated_real_part", "scalar_compress", "scalar_element", "scalar_space",
    "shift_generator", "tensor_chain", "trivial_factorization", "two_by_two_generator", "w_max",
    "w_min", "w_norm", "w_t_norm", "wcb_norm", "wh_alt_norm", "wh_norm"
]
