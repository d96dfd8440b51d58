"""Uniform semi-Latin squares: construction, invariants, classification."""

from .algebra import (FiniteField, LatinSquare, all_latin_squares,
                      are_orthogonal, bose_mols, finite_field, verify_mols)
from .block_design import (BlockDesign, OrthogonalArray, Resolution, Spectrum,
                           canonical_efficiency_factors, check_resolution,
                           concurrence_matrix, delta12, delta3, eta, eta0_lower_bound,
                           eta_less, find_resolution, is_affine_resolvable,
                           is_bibd, is_connected, detect_inflation, oa_strength,
                           schur_dominates, sym_eig, to_orthogonal_array)
from .classify import (ClassRecord, ClassificationResult, HammingGraph,
                       SeedTask, classify_uniform, cocliques, extend,
                       load_classification, minimal_image, naive_classify,
                       seed_phase, square_from_pairs)
from .isomorph import (Certificate, ColoredGraph, aut_order,
                       design_certificate, graph_aut_order, graph_certificate,
                       sls_are_isomorphic, sls_certificate)
from .sls_core import (SemiLatinSquare, UniformityReport, ValidationError,
                       bar_s, dual, from_latin, inflate, superpose, transpose,
                       underlying_design, uniformity, validate)

__version__ = "0.1.0"

__all__ = [
    "BlockDesign", "Certificate", "ClassRecord", "ClassificationResult",
    "ColoredGraph", "FiniteField", "HammingGraph", "LatinSquare",
    "OrthogonalArray", "Resolution", "SeedTask", "SemiLatinSquare",
    "Spectrum", "UniformityReport", "ValidationError", "all_latin_squares",
    "are_orthogonal", "aut_order", "bar_s", "bose_mols",
    "canonical_efficiency_factors", "check_resolution", "classify_uniform",
    "cocliques", "concurrence_matrix", "delta12", "delta3",
    "design_certificate", "detect_inflation", "dual", "eta",
    "eta0_lower_bound", "eta_less", "extend", "find_resolution",
    "finite_field", "from_latin", "graph_aut_order", "graph_certificate",
    "inflate", "is_affine_resolvable", "is_bibd", "is_connected",
    "load_classification", "minimal_image", "naive_classify", "oa_strength",
    "schur_dominates", "seed_phase", "sls_are_isomorphic", "sls_certificate",
    "square_from_pairs", "superpose", "sym_eig", "to_orthogonal_array",
    "transpose", "underlying_design", "uniformity", "validate",
]
