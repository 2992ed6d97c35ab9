"""Rational chiral models: modular data, fusion, modular invariants,
boundary nimreps, exact characters, and channel-duality reports."""

from .characters import (
    DEFAULT_ORDER,
    QSeries,
    char_minimal,
    char_su2,
    characters_for,
    eta_series,
    s_transform_residual,
    truncation_tail,
)
from .errors import (
    BcftError,
    CheckFailure,
    ConvergenceWarning,
    DegenerateExponents,
    DocumentFormatError,
    IntegralityFailure,
    MigrationError,
    ModelValidationError,
    NegativityFailure,
    RationalizationFailure,
    SearchBudgetExceeded,
    SeriesDivisionError,
    SizeMismatch,
    SpectralRadiusTooLarge,
)
from .fusion import FusionRing, fusion_matrix, verify_axioms, verlinde
from .invariants import (
    ModularInvariant,
    diagonal_invariant,
    enumerate_bruteforce,
    enumerate_physical,
    exponents_of,
    invariant_document,
    invariant_from_document,
)
from .modular_data import (
    DEFAULT_PRECISION,
    ModularData,
    SectorLabel,
    build_minimal,
    build_su2,
    global_index,
    load_model,
    model_name,
    model_to_document,
    quantum_dims,
    validate,
)
from .nimreps import (
    Nimrep,
    PsiMatrix,
    canonical_generator,
    enumerate_su2_nimreps,
    generate_from_generator,
    nimrep_document,
    nimrep_from_document,
    psi_matrix,
    regular_nimrep,
    spectrum_match,
    verify,
)
from .persistence import (
    Cache,
    CacheEntry,
    cache_key,
    canonical_json,
    deserialize,
    export,
    make_entry,
    serialize,
)
from .report import (
    AnnulusSpectrum,
    IndexReport,
    annulus,
    annulus_document,
    full_report,
    heat_kernel_check,
    index_document,
    index_report,
)

__version__ = "0.1.0"

__all__ = [
    "AnnulusSpectrum",
    "BcftError",
    "Cache",
    "CacheEntry",
    "CheckFailure",
    "ConvergenceWarning",
    "DEFAULT_ORDER",
    "DEFAULT_PRECISION",
    "DegenerateExponents",
    "DocumentFormatError",
    "FusionRing",
    "IndexReport",
    "IntegralityFailure",
    "MigrationError",
    "ModelValidationError",
    "ModularData",
    "ModularInvariant",
    "NegativityFailure",
    "Nimrep",
    "PsiMatrix",
    "QSeries",
    "RationalizationFailure",
    "SearchBudgetExceeded",
    "SectorLabel",
    "SeriesDivisionError",
    "SizeMismatch",
    "SpectralRadiusTooLarge",
    "annulus",
    "annulus_document",
    "build_minimal",
    "build_su2",
    "cache_key",
    "canonical_generator",
    "canonical_json",
    "char_minimal",
    "char_su2",
    "characters_for",
    "deserialize",
    "diagonal_invariant",
    "enumerate_bruteforce",
    "enumerate_physical",
    "enumerate_su2_nimreps",
    "eta_series",
    "export",
    "exponents_of",
    "full_report",
    "fusion_matrix",
    "generate_from_generator",
    "global_index",
    "heat_kernel_check",
    "index_document",
    "index_report",
    "invariant_document",
    "invariant_from_document",
    "load_model",
    "make_entry",
    "model_name",
    "model_to_document",
    "nimrep_document",
    "nimrep_from_document",
    "psi_matrix",
    "quantum_dims",
    "regular_nimrep",
    "s_transform_residual",
    "serialize",
    "spectrum_match",
    "truncation_tail",
    "validate",
    "verify",
    "verify_axioms",
    "verlinde",
]
