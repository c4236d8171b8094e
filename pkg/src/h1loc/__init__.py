"""Exact H^1 and local-condition cohomology for subgroups of GL2(Z/p^nZ)."""

from .errors import (
    BudgetExceeded,
    ClosureCapExceeded,
    ContainmentError,
    FalsificationError,
    H1locError,
    InputError,
    ModulusMismatch,
    NoNormalSylow,
    NonSimpleRootError,
    NonUnitError,
    NotCentralError,
    NotSubgroupError,
)
from .residues import PrimePowerModulus, Residue, hensel_lift_root
from .linalg import (
    HowellBasis,
    ModMatrix,
    QuotientInvariants,
    howell_form,
    intersect_spans,
    kernel,
    nullspace,
    quotient_invariants,
    solve_membership,
)
from .matgroup import (
    DiagonalLift,
    FactorWord,
    Group,
    Mat2,
    SylowDecomposer,
    TriangularSlices,
    classify_mod_p_image,
    close,
    commutator,
    congruence_kernel,
    cyclic_subgroups,
    decompose_in_sylow,
    derived_subgroup,
    eigen_split,
    reduce_mod,
    semisimple_diagonal_lift,
    sylow_p,
    triangular_commutator_corner,
    triangular_slices,
)
from .cohomology import (
    Action,
    Cocycle,
    CocycleSpace,
    coboundary_space,
    coboundary_witness,
    cocycle_space,
    h1,
    h1_loc,
    local_witnesses,
    restrict,
    sah_annihilate,
)

__version__ = "0.1.0"
