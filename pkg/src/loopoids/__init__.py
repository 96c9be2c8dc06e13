"""Finite structures with partial multiplication: semiloopoids, loopoids,
groupoids and loops, with checkers, constructors and small-order enumeration."""

from .analysis import (
    BudgetExceeded,
    CanonicalForm,
    EnumerationSpec,
    SizeCapExceeded,
    canonical_form,
    enumerate_structures,
    equivalence_experiment,
    isomorphic,
)
from .axioms import (
    CLASS_NAMES,
    MissingInversion,
    check_anchor_compatibility,
    check_groupoid,
    check_inverse_loop,
    check_inverse_semiloopoid,
    check_left_inverse_semiloopoid,
    check_left_loop,
    check_left_loopoid,
    check_loop,
    check_loopoid,
    check_morphism,
    check_quasigroup,
    check_right_loopoid,
    check_semiloopoid,
    check_unities_associativity,
    classify,
    verify_inverse_identities,
)
from .constructors import (
    GroupTable,
    OddPermutation,
    TransversalData,
    baer_transversal_loop,
    check_transversal,
    extended_trivial_semiloopoid,
    isotropy_loop,
    pair_groupoid,
    phi_left_loopoid,
    product_loop_pair_groupoid,
    transversal_reduce,
    trivial_semiloopoid,
)
from .core import (
    CheckReport,
    MorphismData,
    StructureTable,
    alpha_fiber,
    beta_fiber,
    composable_pairs,
    infer_structure,
    left_translation,
    product,
    relabel,
    right_translation,
)
from .lpd import format_structure, parse

__version__ = "0.1.0"
