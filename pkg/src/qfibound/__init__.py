"""Time-scaling classification and precision bounds for frequency
estimation under Markovian noise, computed directly from the operators of
the master equation."""

__version__ = "0.1.0"

from .model import (
    CanonicalizationReport,
    MarkovModel,
    SectorDecomposition,
    canonicalize,
    liouvillian_apply,
    restrict,
    sectorize,
)
from .operators import (
    fixed_total_number_projector,
    herm_anti_split,
    hilbert_schmidt_inner,
    positive_negative_split,
    spectral_norm,
    truncated_annihilator,
)
from .solver import (
    BoundResult,
    HCoefficients,
    alpha_coefficient,
    beta_coefficient,
    bound_qfi,
    solve_bound,
    state_dependent_bound,
)
from .span import NoiseSpan, SpanReport, build_span, check_membership, sector_check

__all__ = [
    "__version__",
    "MarkovModel",
    "SectorDecomposition",
    "CanonicalizationReport",
    "canonicalize",
    "restrict",
    "sectorize",
    "liouvillian_apply",
    "herm_anti_split",
    "spectral_norm",
    "hilbert_schmidt_inner",
    "positive_negative_split",
    "truncated_annihilator",
    "fixed_total_number_projector",
    "NoiseSpan",
    "SpanReport",
    "build_span",
    "check_membership",
    "sector_check",
    "HCoefficients",
    "BoundResult",
    "beta_coefficient",
    "alpha_coefficient",
    "solve_bound",
    "bound_qfi",
    "state_dependent_bound",
]
