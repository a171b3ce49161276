"""Theta functions, symplectic symmetry and crossed products on quantum tori."""
from .algebra import (
    AlgebraBundle,
    AlgebraElement,
    CrossedElement,
    LatticePoint,
    algebra_mul,
    cocycle,
    crossed_mul,
    eps_action,
    quantum_theta,
)
from .fock import (
    QuadratureGrid,
    TestFunction,
    algebra_inner,
    check_covariance,
    coherent,
    constant_one,
    lemma2_check,
    scalar_product_invariance,
    monomial,
    op_pi,
    op_u,
    scalar_product,
)
from .siegel import SiegelPoint, embed, hermitian_form, hermitian_invariance_residual, lemma1_residual, symplectic_pairing
from .symplectic import (
    GroupWord,
    SymplecticMatrix,
    act_coord,
    act_real,
    act_siegel,
    generator,
    is_symplectic,
    stabilizer_search,
)
from .theta import TruncationParams, averaged_theta, invariant_theta, modular_ratio, theta

__version__ = "0.1.0"

__all__ = [
    "AlgebraBundle",
    "AlgebraElement",
    "CrossedElement",
    "GroupWord",
    "LatticePoint",
    "QuadratureGrid",
    "SiegelPoint",
    "SymplecticMatrix",
    "TestFunction",
    "TruncationParams",
    "act_coord",
    "act_real",
    "act_siegel",
    "algebra_inner",
    "algebra_mul",
    "averaged_theta",
    "check_covariance",
    "cocycle",
    "coherent",
    "constant_one",
    "crossed_mul",
    "embed",
    "eps_action",
    "generator",
    "hermitian_form",
    "hermitian_invariance_residual",
    "invariant_theta",
    "is_symplectic",
    "lemma1_residual",
    "lemma2_check",
    "modular_ratio",
    "monomial",
    "op_pi",
    "op_u",
    "quantum_theta",
    "scalar_product",
    "scalar_product_invariance",
    "stabilizer_search",
    "symplectic_pairing",
    "theta",
]
