"""Error kinds raised across the lab and their process exit codes."""

from typing import Dict, Type


class LabError(Exception):
    """Base class for every error raised by the lab."""


class ZeroDatumError(LabError, ValueError):
    """Initial datum is (numerically) constant, hence zero after mean removal."""


class NonFiniteError(LabError, ValueError):
    """A field contains NaN or infinite samples."""


class SizeMismatchError(LabError, ValueError):
    """Field length does not match the resolution of the domain."""


class OverflowDetected(LabError, ArithmeticError):
    """|u|^p left the floating-point range; callers treat it as blow-up evidence."""


class ZeroFieldError(LabError, ValueError):
    """Operation needs a nonzero field."""


class EmptyTrajectoryError(LabError, ValueError):
    """Trajectory holds no samples."""


class TooFewSamplesError(LabError, ValueError):
    """Trajectory is too short for the requested finite-difference monitor."""


class EpsilonOutOfRangeError(LabError, ValueError):
    """Concavity parameter outside (0, 1 - sqrt(2/(p+1)))."""


class ConfigInvalidError(LabError, ValueError):
    """Invalid domain, stepper or optimizer parameters."""


class ConfigFileError(ConfigInvalidError):
    """Config document problems: unreadable file, unknown keys, bad output dir."""


class InsufficientTailError(LabError, ValueError):
    """Not enough growing tail samples to fit a blow-up time."""


class AlphaBelowDepthError(LabError, ValueError):
    """Energy level alpha does not exceed the estimated well depth."""


class InvalidDescriptorError(LabError, ValueError):
    """Initial-data descriptor names an unknown family or bad parameters."""


class NoCheckpointsError(LabError, ValueError):
    """Trajectory carries no state checkpoints."""


class DisjointRangesError(LabError, ValueError):
    """Two trajectories share no time interval."""


class LinearSolveFailure(LabError, RuntimeError):
    """Banded factorisation of the implicit operator failed."""


class VerificationFailure(LabError):
    """At least one acceptance check failed."""


EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3

# Checked in order; the first matching class decides the exit code.
EXIT_CODES: Dict[Type[BaseException], int] = {
    VerificationFailure: EXIT_VERIFICATION_FAILED,
    ConfigInvalidError: EXIT_USAGE,
    InvalidDescriptorError: EXIT_USAGE,
    ZeroDatumError: EXIT_USAGE,
    NonFiniteError: EXIT_USAGE,
    SizeMismatchError: EXIT_USAGE,
    AlphaBelowDepthError: EXIT_USAGE,
    EpsilonOutOfRangeError: EXIT_USAGE,
    LabError: EXIT_RUNTIME,
    FloatingPointError: EXIT_RUNTIME,
    ArithmeticError: EXIT_RUNTIME,
}


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit code."""
    for error_type, code in EXIT_CODES.items():
        if isinstance(exc, error_type):
            return code
    return EXIT_RUNTIME
