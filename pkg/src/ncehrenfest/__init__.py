"""Symbolic and numerical verification of Heisenberg rates for a Dirac particle
in noncommutative phase space.

The symbolic side (``scalar``, ``expr``, ``operator_ir``, ``nc_algebra``,
``dirac_model``, ``heisenberg``) derives Hamiltonians and rate equations
exactly; ``matrix_rep`` realizes them as finite matrices to cross-check every
identity and to run Ehrenfest evolutions.
"""
from .context import (
    CONVENTIONS, E_SYMBOLS, AlgebraContext, ConventionConfig, FieldSpec, Mode, NCParameters,
    convention,
)
from .dirac_model import DiracConstants, HamiltonianBundle, commutative_hamiltonian, deformed_hamiltonian
from .expr import ExprError, OperatorExpr, a_field, alpha, beta, p, phi_field, x
from .heisenberg import (
    DiscrepancyReport, PaperTemplate, RateResult, commutative_limit, heisenberg_rate,
    kinetic_momentum, kinetic_momentum_rate, paper_form_comparison, position_rate,
    spinor_component_action,
)
from .matrix_rep import (
    FockBasisConfig, MatrixOperator, StateVector, Trajectory, ehrenfest_residual, evolve,
    gaussian_packet, identity_residual, realize,
)
from .nc_algebra import algebra_consistency_report, bopp_shift, effective_planck, star_product
from .operator_ir import UnknownAtomPairError, anticommutator, canonicalize, commutator
from .scalar import Scalar, sym
from .textio import ParseError, parse_expr, render

__all__ = [
    "a_field",
    "algebra_consistency_report",
    "AlgebraContext",
    "alpha",
    "anticommutator",
    "beta",
    "bopp_shift",
    "canonicalize",
    "commutative_hamiltonian",
    "commutative_limit",
    "commutator",
    "convention",
    "ConventionConfig",
    "CONVENTIONS",
    "deformed_hamiltonian",
    "DiracConstants",
    "DiscrepancyReport",
    "E_SYMBOLS",
    "effective_planck",
    "ehrenfest_residual",
    "evolve",
    "ExprError",
    "FieldSpec",
    "FockBasisConfig",
    "gaussian_packet",
    "HamiltonianBundle",
    "heisenberg_rate",
    "identity_residual",
    "kinetic_momentum",
    "kinetic_momentum_rate",
    "MatrixOperator",
    "Mode",
    "NCParameters",
    "OperatorExpr",
    "p",
    "paper_form_comparison",
    "PaperTemplate",
    "parse_expr",
    "ParseError",
    "phi_field",
    "position_rate",
    "RateResult",
    "realize",
    "render",
    "Scalar",
    "spinor_component_action",
    "star_product",
    "StateVector",
    "sym",
    "Trajectory",
    "UnknownAtomPairError",
    "x",
]

__version__ = "0.1.0"
