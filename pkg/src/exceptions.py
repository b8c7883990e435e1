"""Custom exception classes for heun-forge.

This module defines the exception hierarchy used across the series
arithmetic, the special functions, the engines and the command line.
"""


class HeunForgeError(Exception):
    """Base exception for heun-forge."""
    pass


class ScalarError(HeunForgeError):
    """Raised on division by zero, a non-unit leading term or mismatched truncation."""
    pass


class DomainError(HeunForgeError):
    """Raised when an argument lies outside the domain of a special function."""
    pass


class BranchHazardError(DomainError):
    """Raised when a non-integer power is taken too close to a zero or branch cut."""
    pass


class BasisWindowError(HeunForgeError):
    """Raised when a Laurent window cannot hold every contribution to a requested coefficient."""
    pass


class PreconditionError(HeunForgeError):
    """Raised when parameters violate the preconditions of an engine."""
    pass


class ConfigError(HeunForgeError):
    """Raised when a run configuration is inconsistent."""
    pass


class ResonanceError(HeunForgeError):
    """Raised when a recursion denominator vanishes.

    Attributes:
        report: the ResonanceReport listing every offending (order, mode) pair
    """

    def __init__(self, report, message: str = ""):
        self.report = report
        if not message:
            pairs = ", ".join(f"({ell}, {m})" for ell, m in report.entries)
            message = f"Resonant denominators at (order, mode): {pairs}"
        super().__init__(message)


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RESONANCE = 2
EXIT_PRECONDITION = 3
EXIT_INTERNAL = 4


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the documented process exit code.

    Args:
        error: Exception caught by the command line front end

    Returns:
        Exit code for the process
    """
    if isinstance(error, ResonanceError):
        return EXIT_RESONANCE
    if isinstance(error, ConfigError):
        return EXIT_USAGE
    if isinstance(error, HeunForgeError):
        return EXIT_PRECONDITION
    return EXIT_INTERNAL
