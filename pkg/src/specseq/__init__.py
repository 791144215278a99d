"""Exact spectral sequences of filtered cochain complexes over Q.

Everything is computed with Fraction arithmetic; no floats, no tolerances.
The public surface re-exports the engine (linalg, filtered, spectral), the
multiplicative layer (algebra), the polarized layer (lefschetz), and the
model builders (models).
"""

from .algebra import (
    BigradedAlgebra,
    ComplexPairing,
    Derivation,
    Element,
    SSPairing,
    derivation_extend,
    induced_pairing,
    verify_leibniz,
)
from .errors import (
    ContainmentError,
    EngineError,
    InvariantError,
    ParseError,
    SpecSeqError,
)
from .filtered import CochainComplex, FilteredComplex, Filtration
from .lefschetz import (
    Certificate,
    CertStep,
    LefschetzStructure,
    PolarizedAlgebra,
    degeneration_certify,
    deligne_vanishing,
    hom_space_dimension,
    primitive_subspaces,
    serre_sign_check,
    split_differential,
    verify_hard_lefschetz,
)
from .linalg import Matrix, Subquotient, Subspace, pairing_rank
from .models import (
    HodgeDiamond,
    LciTable,
    ObstructionDatum,
    VarietyModel,
    build_model,
    canonical_power_datum,
    d2_from_alpha,
    ext_dimensions,
    lagrangian_e2_table,
    lci_e2_table,
    tensor_model,
)
from .spectral import (
    Page,
    SpectralSequence,
    decalage,
    decalage_renumbering_report,
    e_infinity_compare,
    first_page,
    oracle_report,
    page_direct,
    turn_page,
)

__version__ = "0.1.0"

__all__ = [
    "BigradedAlgebra",
    "CertStep",
    "Certificate",
    "CochainComplex",
    "ComplexPairing",
    "ContainmentError",
    "Derivation",
    "Element",
    "EngineError",
    "FilteredComplex",
    "Filtration",
    "HodgeDiamond",
    "InvariantError",
    "LciTable",
    "LefschetzStructure",
    "Matrix",
    "ObstructionDatum",
    "Page",
    "ParseError",
    "PolarizedAlgebra",
    "SSPairing",
    "SpecSeqError",
    "SpectralSequence",
    "Subquotient",
    "Subspace",
    "VarietyModel",
    "build_model",
    "canonical_power_datum",
    "d2_from_alpha",
    "decalage",
    "decalage_renumbering_report",
    "degeneration_certify",
    "deligne_vanishing",
    "derivation_extend",
    "e_infinity_compare",
    "ext_dimensions",
    "first_page",
    "hom_space_dimension",
    "induced_pairing",
    "lagrangian_e2_table",
    "lci_e2_table",
    "oracle_report",
    "page_direct",
    "pairing_rank",
    "primitive_subspaces",
    "serre_sign_check",
    "split_differential",
    "tensor_model",
    "turn_page",
    "verify_hard_lefschetz",
    "verify_leibniz",
]
