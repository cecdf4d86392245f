"""Planted rank-1 detection in generic matrix subspaces.

The package finds rank-1 matrices planted in a generic linear subspace
of m x n (or symmetric m x m) matrices, produces exact finite-field
certificates for the counting bound governing when detection succeeds,
empirically verifies the block structure behind the genericity
argument, and applies the detection step to CP decomposition of
order-3 and order-4 tensors.
"""

from .bounds import (
    PlantSpec,
    ProblemShape,
    conjecture_holds,
    identifiability_bound,
    num_cols,
    num_rows,
    r_max,
    r_max_given_s,
    s_star,
)
from .certify import (
    Certificate,
    CertifyFailure,
    SweepReport,
    band_shapes,
    certify_case,
    overbound_cases,
    run_sweep,
    sweep_cases,
    verify_certificate,
)
from .errors import (
    BoundError,
    CapacityError,
    DegenerateInputError,
    LengthMismatchError,
    ModeError,
    PlantedRank1Error,
    PreconditionError,
    RankDeficientError,
    RankError,
    SchemaError,
    ShapeError,
    SpecError,
    SymmetryError,
    ZeroInverseError,
)
from .field_arith import (
    EliminationReport,
    eliminate_maximal_minor,
    modular_inverse,
    sample_pairwise_independent,
)
from .minor_forms import (
    ConstraintMatrix,
    MinorIndex,
    build_constraint_matrix,
    constraint_entry,
    minor_form_matrix,
    minor_indices,
    pair_indices,
    symmetric_basis,
    symmetric_form_matrix,
)
from .proof_check import (
    Injection,
    StructureReport,
    allowed_support,
    check_structure,
    make_injection,
    pair_bin,
    partner_pair,
    rows_for_pair,
)
from .recover import (
    IntersectionBasis,
    RecoveryResult,
    intersection_basis,
    matching_error,
    recover_rank_one,
    simultaneous_diagonalization,
)
from .subspaces import (
    PlantedSubspace,
    generate_modular,
    generate_real,
    orthonormal_basis,
    stream,
    sym_unvec,
    sym_vec,
)
from .tensor_decomp import (
    CPDecomposition,
    decompose_order3,
    decompose_order4,
    decompose_symmetric4,
    flatten,
    load_tensor,
    random_cp_tensor,
    save_tensor,
)

__version__ = "0.1.0"
