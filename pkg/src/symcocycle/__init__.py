"""Certification of nontrivial symmetric 2-cocycle classes on finite groups."""

__version__ = "0.1.0"

from .certify import Certificate, certify
from .cocycle import (
    CohomologyGroup,
    SymmetricCochain,
    extract_nontrivial_cocycle,
    symmetric_h2,
    verify_cocycle,
)
from .groups import (
    ConjugacyPartition,
    ElementSet,
    FiniteGroup,
    conjugacy_classes,
    derived_subgroup,
    load_group_file,
    subgroup_closure,
)
from .linalg import (
    SmithResult,
    SparseIntMatrix,
    nullspace_mod_p,
    qz_solution_group,
    rank_mod_p,
    smith_normal_form,
)
from .pquotient import (
    Epimorphism,
    PcGroup,
    consistency_violations,
    p_quotient,
    pc_derived_order,
    pc_subgroup_order,
)
from .presentation import (
    Presentation,
    abelianized_relation_matrix,
    envelope_presentation,
    free_reduce,
)

__all__ = [
    "Certificate",
    "CohomologyGroup",
    "ConjugacyPartition",
    "ElementSet",
    "Epimorphism",
    "FiniteGroup",
    "PcGroup",
    "Presentation",
    "SmithResult",
    "SparseIntMatrix",
    "SymmetricCochain",
    "abelianized_relation_matrix",
    "certify",
    "conjugacy_classes",
    "consistency_violations",
    "derived_subgroup",
    "envelope_presentation",
    "extract_nontrivial_cocycle",
    "free_reduce",
    "load_group_file",
    "nullspace_mod_p",
    "p_quotient",
    "pc_derived_order",
    "pc_subgroup_order",
    "qz_solution_group",
    "rank_mod_p",
    "smith_normal_form",
    "subgroup_closure",
    "symmetric_h2",
    "verify_cocycle",
]
