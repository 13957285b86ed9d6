"""Combinatorial torsion of flat bundles: determinant lines, Euler structures,
the Milnor metric and the Farber-Turaev torsion."""

from .detline import (
    BasedComplex,
    CohomologyBasis,
    DetLineElement,
    change_of_basis_scalar,
    cohomology,
    dual_pairing,
    phi_map,
    torsion_acyclic,
)
from .document import TwistedComplexDocument, load, loads, parse_document
from .euler import HomologyClass, Spider, act, chain_class, dual_spider
from .metrics import HermitianMetricAssignment, kt_integral, kt_integral_chain, milnor_norm
from .turaev import dual_representation, farber_turaev, verify_milnor_identity
from .twisted import (
    AnalyticFamily,
    GroupWord,
    Representation,
    TwistedComplexPresentation,
    abelianize,
    assemble_boundary,
    evaluate_word,
    sigma_section,
)

__all__ = [
    "AnalyticFamily", "BasedComplex", "CohomologyBasis", "DetLineElement", "GroupWord",
    "HermitianMetricAssignment", "HomologyClass", "Representation", "Spider",
    "TwistedComplexDocument", "TwistedComplexPresentation", "abelianize", "act",
    "assemble_boundary", "chain_class", "change_of_basis_scalar", "cohomology", "dual_pairing",
    "dual_representation", "dual_spider", "evaluate_word", "farber_turaev", "kt_integral",
    "kt_integral_chain", "load", "loads", "milnor_norm", "parse_document", "phi_map",
    "sigma_section", "torsion_acyclic", "verify_milnor_identity",
]
