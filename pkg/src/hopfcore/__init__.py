"""hopfcore: exact computations with connected truncated bialgebras over Q.

The pipeline: structure constants -> coradical-style filtration -> graded
splitting -> associated graded algebra -> homogeneous generators -> ordered
divided-power basis -> convolution algebras and stable cores of ideals under
module-algebra actions.  Everything is exact rational arithmetic.
"""

from .coalgebra import (
    CoradicalFiltration,
    FilteredBialgebraData,
    GradedSplitting,
    build_grouplike,
    build_ueg,
    build_xyw,
    check_primitivity_defects,
    check_connected,
    check_coradically_graded,
    check_delta_consistency,
    check_level_closure,
    coradical_filtration,
    gr_structure,
    graded_splitting,
    instance_from_json,
    instance_to_json,
    verify_axioms,
    verify_gr_facts,
)
from .convolution import (
    CoefficientRing,
    ConvElement,
    LeadingTerm,
    RingFlags,
    Witness,
    builtin_ring,
    check_leading_law,
    convolve,
    counit_pullback,
    leading,
    prime_witness,
    random_conv_element,
    ring_check,
    ring_from_tables,
    semiprime_witness,
    u_star,
    unit_conv,
)
from .action import (
    DeskAlgebra,
    HCoreResult,
    IdealOracle,
    ModuleAlgebraAction,
    MonomialIdeal,
    PrincipalIdeal,
    QuotientRing,
    SubspaceIdeal,
    core_primeness_probe,
    hcore,
    quotient_ring,
    conv_map,
    verify_module_algebra,
)
from .linalg import QMatrix, Rational, Subspace, Vector, complement, kernel, rat, rat_str, rref
from .monoid import GeneratorSet, MultiIndex, ZERO_INDEX
from .pbw import PBWStructure, extract_generators, lift_generators

__version__ = "0.1.0"

__all__ = [
    "CoefficientRing",
    "ConvElement",
    "CoradicalFiltration",
    "DeskAlgebra",
    "FilteredBialgebraData",
    "GeneratorSet",
    "GradedSplitting",
    "HCoreResult",
    "IdealOracle",
    "LeadingTerm",
    "ModuleAlgebraAction",
    "MonomialIdeal",
    "MultiIndex",
    "PBWStructure",
    "PrincipalIdeal",
    "QMatrix",
    "QuotientRing",
    "Rational",
    "RingFlags",
    "Subspace",
    "SubspaceIdeal",
    "Vector",
    "Witness",
    "ZERO_INDEX",
    "build_grouplike",
    "build_ueg",
    "build_xyw",
    "builtin_ring",
    "check_primitivity_defects",
    "check_connected",
    "check_coradically_graded",
    "check_delta_consistency",
    "check_level_closure",
    "check_leading_law",
    "complement",
    "convolve",
    "coradical_filtration",
    "core_primeness_probe",
    "counit_pullback",
    "extract_generators",
    "gr_structure",
    "graded_splitting",
    "hcore",
    "instance_from_json",
    "instance_to_json",
    "kernel",
    "leading",
    "lift_generators",
    "prime_witness",
    "quotient_ring",
    "random_conv_element",
    "rat",
    "rat_str",
    "conv_map",
    "ring_check",
    "ring_from_tables",
    "rref",
    "semiprime_witness",
    "u_star",
    "unit_conv",
    "verify_axioms",
    "verify_gr_facts",
    "verify_module_algebra",
]
