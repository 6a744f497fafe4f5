"""Anisotropic brushlet bases and sequence norms for mixed-norm
Triebel-Lizorkin and Besov spaces."""

from brushlab.anisotropy import Anisotropy
from brushlab.approx import (
    ApproxResult,
    greedy_select,
    normalized_system,
    sigma_m_oracle,
)
from brushlab.bells import BellFunction
from brushlab.brushlet import BrushletIndex, brushlet_hat, brushlet_time
from brushlab.covering import CutoffInterval
from brushlab.error import (
    AccuracyError,
    BrushlabError,
    ConfigError,
    ConstructionError,
    DomainError,
    SizeLimitError,
)
from brushlab.mixed_norms import MixedNormParams, b_norm, f_norm, sequence_norm
from brushlab.status import Status
from brushlab.transform import (
    CoefficientSet,
    Truncation,
    analyze,
    build_admissible,
    synthesize,
)

__all__ = [
    "AccuracyError",
    "Anisotropy",
    "ApproxResult",
    "BellFunction",
    "BrushletIndex",
    "BrushlabError",
    "CoefficientSet",
    "ConfigError",
    "ConstructionError",
    "CutoffInterval",
    "DomainError",
    "MixedNormParams",
    "SizeLimitError",
    "Status",
    "Truncation",
    "analyze",
    "b_norm",
    "brushlet_hat",
    "brushlet_time",
    "build_admissible",
    "f_norm",
    "greedy_select",
    "normalized_system",
    "sequence_norm",
    "sigma_m_oracle",
    "synthesize",
]
