"""Relative first k-invariants of free chain complexes over finite group rings."""

from .chain import (
    AugmentedComplex,
    ChainComplex,
    ChainHomotopy,
    ChainMap,
    SubcomplexMarker,
    algebraic_mapping_cylinder,
    mapping_cone,
    presentation_complex,
    quotient_complex,
    subcomplex,
    validate_complex,
)
from .exactlinalg import cokernel_presentation, kernel_basis, smith_normal_form, solve_integer_system
from .groupring import (
    FiniteGroup,
    GroupIso,
    GroupRingMatrix,
    cyclic_group,
    flatten,
    gr_compose,
    group_from_table,
    solve_equivariant,
    trivial_group,
)
from .kinvariant import (
    CohomologyClass,
    ExtensionDatum,
    ExtensionResult,
    boundary_vanishing_check,
    classes_equal,
    cw_k_invariant,
    decide_extension,
    k_invariant,
    phi_ev_delta_check,
    pullback_class,
    pushforward_coeff,
    restrict_scalars_class,
    theta,
    verify_extension,
)
from .lifting import alpha_phi, build_resolution, lift_augmented_map, relative_homotopy
from .modules import PiModule, PiModuleHom, homology, is_acyclic_below

__version__ = "0.1.0"

__all__ = [
    "AugmentedComplex",
    "ChainComplex",
    "ChainHomotopy",
    "ChainMap",
    "CohomologyClass",
    "ExtensionDatum",
    "ExtensionResult",
    "FiniteGroup",
    "GroupIso",
    "GroupRingMatrix",
    "PiModule",
    "PiModuleHom",
    "SubcomplexMarker",
    "algebraic_mapping_cylinder",
    "alpha_phi",
    "boundary_vanishing_check",
    "build_resolution",
    "classes_equal",
    "cokernel_presentation",
    "cw_k_invariant",
    "cyclic_group",
    "decide_extension",
    "flatten",
    "gr_compose",
    "group_from_table",
    "homology",
    "is_acyclic_below",
    "k_invariant",
    "kernel_basis",
    "lift_augmented_map",
    "mapping_cone",
    "phi_ev_delta_check",
    "presentation_complex",
    "pullback_class",
    "pushforward_coeff",
    "quotient_complex",
    "relative_homotopy",
    "restrict_scalars_class",
    "smith_normal_form",
    "solve_equivariant",
    "solve_integer_system",
    "subcomplex",
    "theta",
    "trivial_group",
    "validate_complex",
    "verify_extension",
]
