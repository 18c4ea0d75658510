"""Exact engine for permutative representations given by integer branching
systems: extendibility to the unitary level, coding-map regularity,
component classification, spectra, and the quadratic endomorphism table."""

from .maps import (
    AffineRule, INTEGERS, IndexDomain, LazyBijection, MapDomainError, NAT0,
    NAT1, OrbitDescriptor, OrbitStructure, RuleInjection, StructuralError,
    ValidationReport, ZXN, affine_map, compose, equals, orbit_of, translation,
    validate_injection,
)
from .branching import (
    BranchingSystem, CodingPrefix, CoreSet, SpectrumReport, char_poly_factors,
    coding, core_set, direct_sum, factorize, is_pure, orbit_structure,
    point_spectrum, separating_word, validate_branching,
)
from .extension import (
    ExtensionCount, Extendibility, OrbitMatching, Q2Report, Q2System,
    build_tau, build_tau_pure, count_extensions, extendible,
    extension_family, tau_orbit_structure, unitary_equiv_tau, verify_q2,
)
from .classify import (
    Component, ComponentPartition, DecomposabilityReport, MultiIndex,
    RegularityVerdict, RepClass, classify_component, flipflop_image,
    is_irreducible_PI, kawamura_finite, kawamura_infinite,
    normalize_multiindex, o2_components, q2_components, q2_decomposable,
    regularity_verdict,
)
from .endo import (
    ENDO_TABLE, EndoSpec, MonomialExpr, check_candidate_U, chi_rep,
    compile_expr, compile_product, endo_table_report,
    flipflop_intertwiner_check, q2_of_endo, rep_of_endo,
)
from .states import (
    OrderHypothesisError, Phase, StateValue, forbidden_order, hypothesis_flag,
    omega_z, omega_z_consistency, vector_state,
)
from .catalog import CatalogItem, catalog

__version__ = "0.1.0"
