"""Exception hierarchy shared by the library and the command line.

Every exception carries the process exit code the CLI reports for it:
2 for bad input (usage, parse, domain), 3 for numeric failures.
"""

from __future__ import annotations

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class PmlSelectError(Exception):
    """Base class for every error raised by pml_select."""

    exit_code = EXIT_NUMERIC


# ==================== INPUT ERRORS ====================

class InputError(PmlSelectError, ValueError):
    exit_code = EXIT_USAGE


class UsageError(InputError):
    """Command-line arguments that parse but do not make sense together."""


class DomainError(InputError):
    """An argument lies outside the domain of the function."""


class InvalidInterval(InputError):
    """Integration interval with a >= b."""


class LengthMismatch(InputError):
    """Coefficient vector does not fit the profile family it claims."""


class ConfigError(InputError):
    """Config file, environment variable or flag failed validation."""


class ProfileSyntaxError(InputError):
    """Profile text does not follow the profile grammar."""

    def __init__(self, text: str, token: str, reason: str):
        self.text = text
        self.token = token
        self.reason = reason
        super().__init__(f"invalid profile '{text}': {reason} (at '{token}')")


# ==================== NUMERIC ERRORS ====================

class NumericError(PmlSelectError, ArithmeticError):
    exit_code = EXIT_NUMERIC


class SingularMatrix(NumericError):
    """Pivot collapsed below the relative threshold during elimination."""


class UnresolvableWave(NumericError):
    """Transverse wavenumber too large for the grid (alpha*h/2 > 1)."""


class DegenerateBasis(NumericError):
    """Plane-wave pair is (numerically) linearly dependent on the grid."""


class NumericFailure(NumericError):
    """A computed quantity came out NaN or infinite."""
