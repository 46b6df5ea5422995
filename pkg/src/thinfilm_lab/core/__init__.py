"""Domain types, cosine transforms and error kinds."""

from .domain import DomainSpec, GridField, Outcome, RunOutcome, SpectralField, parse_length
from .errors import (
    AlphaBelowDepthError,
    ConfigFileError,
    ConfigInvalidError,
    DisjointRangesError,
    EmptyTrajectoryError,
    EpsilonOutOfRangeError,
    InsufficientTailError,
    InvalidDescriptorError,
    LabError,
    LinearSolveFailure,
    NoCheckpointsError,
    NonFiniteError,
    OverflowDetected,
    SizeMismatchError,
    TooFewSamplesError,
    VerificationFailure,
    ZeroDatumError,
    ZeroFieldError,
    exit_code_for,
)
from .transforms import (
    cosine_analysis,
    cosine_synthesis,
    to_grid,
    to_spectral,
    validate_initial_datum,
)

__all__ = [
    "DomainSpec",
    "GridField",
    "SpectralField",
    "RunOutcome",
    "Outcome",
    "parse_length",
    "to_grid",
    "to_spectral",
    "validate_initial_datum",
    "cosine_analysis",
    "cosine_synthesis",
    "LabError",
    "ZeroDatumError",
    "NonFiniteError",
    "SizeMismatchError",
    "OverflowDetected",
    "ZeroFieldError",
    "EmptyTrajectoryError",
    "TooFewSamplesError",
    "EpsilonOutOfRangeError",
    "ConfigInvalidError",
    "ConfigFileError",
    "InsufficientTailError",
    "AlphaBelowDepthError",
    "InvalidDescriptorError",
    "NoCheckpointsError",
    "DisjointRangesError",
    "LinearSolveFailure",
    "VerificationFailure",
    "exit_code_for",
]
