"""Exact computations with invariants of relatively free and enveloping algebras.

The package builds generators of ``F(N_p, V)^G`` and ``U(L)^G`` for finite
rational matrix groups from generators of the commutative invariants of
``S(L)``, and checks the outcome degree by degree against independent
invariant dimensions. All arithmetic is over the rationals.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .algebras import (
    EnvelopingAlgebra,
    RelFreeContext,
    dim_F,
    dim_U,
    expand_brackets,
    gamma,
    iota_alpha,
    nf_F,
    omega,
    pi_F,
    pi_S,
    straighten,
    tideal_component,
)
from .commutative import (
    CommPolynomial,
    GeneratorRecord,
    import_external_generators,
    invariant_basis_alpha,
    minimal_generators,
)
from .errors import (
    CapExceeded,
    ContextMismatch,
    DimensionMismatch,
    NCInvError,
    NotALieElement,
    NotInSubspace,
    OracleMismatch,
    SingularMatrixError,
    ValidationError,
)
from .groups import (
    MatrixGroup,
    close,
    induced_action,
    invariant_dimension,
    invariant_subspace,
    lift_group,
    reynolds,
)
from .lie import (
    FreeNilpotentLie,
    GradedLieAlgebra,
    LieElement,
    bracketing,
    free_nilpotent_lie,
    lie_bracket,
    lyndon_words,
    project_to_lie,
    standard_factorization,
    witt,
)
from .linalg import Matrix, SparseEchelon, Subspace, rank, rref
from .pipeline import (
    BoundReport,
    PipelineResult,
    VerificationReport,
    bound_report,
    construct_invariants_F,
    construct_invariants_U,
    verify_generation,
    verify_invariance,
)
from .polarize import SplitModule, gl_km_action, polarize_set, verify_polarization
from .tensor import NCPolynomial, TensorAlgebra

__all__ = [name for name in dir() if not name.startswith("_")]
