"""Exact modular invariant theory over F_p and the BF4 verification suite."""

from .ffield import PrimeField
from .gca import (
    Element,
    ExactDivisionError,
    ParseError,
    Signature,
    SignatureError,
    content,
    degree_basis,
    differential,
    exact_div,
    format_element,
    parse_element,
    poly_gcd,
    substitute,
)
from .groups import (
    LinearCharacter,
    MatrixGroup,
    act,
    character_of,
    invariant_space,
    is_invariant,
    minimal_relative_invariant,
    relative_invariant_space,
)
from .forge import (
    CriterionVerdict,
    InvariantSystem,
    construct_M_family,
    dickson_generators,
    jacobian_criterion,
    verify_free_module,
)
from .steenrod import bockstein, power, verify_instability
from .presented import AlgebraHom, PresentedAlgebra, load_presentation
from .report import Report
from .f4 import F4Suite

__version__ = "0.1.0"

__all__ = [
    "PrimeField",
    "Signature",
    "Element",
    "SignatureError",
    "ParseError",
    "ExactDivisionError",
    "differential",
    "poly_gcd",
    "content",
    "exact_div",
    "substitute",
    "degree_basis",
    "format_element",
    "parse_element",
    "MatrixGroup",
    "LinearCharacter",
    "act",
    "is_invariant",
    "character_of",
    "invariant_space",
    "relative_invariant_space",
    "minimal_relative_invariant",
    "InvariantSystem",
    "CriterionVerdict",
    "dickson_generators",
    "jacobian_criterion",
    "construct_M_family",
    "verify_free_module",
    "bockstein",
    "power",
    "verify_instability",
    "PresentedAlgebra",
    "AlgebraHom",
    "load_presentation",
    "Report",
    "F4Suite",
    "__version__",
]
