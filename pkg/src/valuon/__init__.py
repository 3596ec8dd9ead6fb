"""Valuations of finite rings into idempotent semirings, the universal
valuation semiring Gamma_R, tropicalization of noncommutative expressions and
tropical linear algebra."""
from .errors import (
    ArgumentError, BrokenInstanceError, ConstructionError, DomainMismatchError, InvalidCongruenceError,
    NonConvergenceError, ParseError, ResourceBoundError, RingValidationError, ValidationError, ValuonError,
)
from .semiring import (
    BOOLEAN, GCDQ, INF, MINMAX, NATURALS, PADICVEC, TROPICAL, Semiring, check_homomorphism,
    check_idempotent, check_laws, congruence_closure, inf_of, leq, quotient_semiring,
)
from .ring import (
    RATIONALS, FiniteRing, abelianize_ring, cyclic, finite_field, matrix_ring, parse_ring_spec, product,
    r8, upper_triangular, zspan,
)
from .gamma import (
    abelianization_correspondence, check_valuation, classify_trop_hom, enumerate_gamma, gamma_add,
    gamma_element, gamma_leq, gamma_mul, nu_padic, nu_universal,
)
from .poly import crease_points, is_crease_point, parse_expression, root_crease_check, roots, tropicalize
from .linalg import is_ultrametric, least_fixed_point, minimax_closure, rep_to_valuation

__version__ = "0.1.0"

__all__ = [
    "ArgumentError", "BrokenInstanceError", "ConstructionError", "DomainMismatchError",
    "InvalidCongruenceError", "NonConvergenceError", "ParseError", "ResourceBoundError",
    "RingValidationError", "ValidationError", "ValuonError",
    "BOOLEAN", "GCDQ", "INF", "MINMAX", "NATURALS", "PADICVEC", "TROPICAL", "Semiring",
    "check_homomorphism", "check_idempotent", "check_laws", "congruence_closure", "inf_of", "leq",
    "quotient_semiring",
    "RATIONALS", "FiniteRing", "abelianize_ring", "cyclic", "finite_field", "matrix_ring",
    "parse_ring_spec", "product", "r8", "upper_triangular", "zspan",
    "abelianization_correspondence", "check_valuation", "classify_trop_hom", "enumerate_gamma",
    "gamma_add", "gamma_element", "gamma_leq", "gamma_mul", "nu_padic", "nu_universal",
    "crease_points", "is_crease_point", "parse_expression", "root_crease_check", "roots", "tropicalize",
    "is_ultrametric", "least_fixed_point", "minimax_closure", "rep_to_valuation",
]
