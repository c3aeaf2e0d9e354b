"""Exact intersection lattices of linear and Hodge cycles on Fermat varieties."""
from .cyclotomic import CyclotomicInt, cyclotomic_polynomial, euler_phi
from .fermat import FermatParams
from .hodge_cycles import build_index_sets, hodge_cycle_basis, pham_intersection_matrix, primitive_hodge_matrix
from .intmatrix import IntMatrix
from .invariants import (
    LatticeMeta,
    LatticeReport,
    discriminant_sign,
    nondegenerate_quotient,
    rank_mod_p,
    table_relation,
)
from .linear_cycles import (
    LinearCycleSpec,
    ResourceCapExceeded,
    enumerate_linear_cycles,
    full_intersection_matrix,
    primitive_intersection_matrix,
)
from .pipeline import RunConfig, VerificationResult, run_hodge_branch, run_linear_branch, verify
from .smith import (
    SmithDecomposition,
    congruent_transform,
    elementary_divisors,
    left_kernel_basis,
    smith_decomposition,
    unimodular_sign,
)

__version__ = "0.1.0"

__all__ = [
    "CyclotomicInt",
    "FermatParams",
    "IntMatrix",
    "LatticeMeta",
    "LatticeReport",
    "LinearCycleSpec",
    "ResourceCapExceeded",
    "RunConfig",
    "SmithDecomposition",
    "VerificationResult",
    "build_index_sets",
    "congruent_transform",
    "cyclotomic_polynomial",
    "discriminant_sign",
    "elementary_divisors",
    "enumerate_linear_cycles",
    "euler_phi",
    "full_intersection_matrix",
    "hodge_cycle_basis",
    "left_kernel_basis",
    "nondegenerate_quotient",
    "pham_intersection_matrix",
    "primitive_hodge_matrix",
    "primitive_intersection_matrix",
    "rank_mod_p",
    "run_hodge_branch",
    "run_linear_branch",
    "smith_decomposition",
    "table_relation",
    "unimodular_sign",
    "verify",
]
