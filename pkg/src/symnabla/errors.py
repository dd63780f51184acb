"""Exception types shared across the package.

The CLI maps these onto exit codes: domain and format problems are usage
errors (exit 2), blown resource caps are exit 3, and verification
mismatches are exit 4.
"""

from __future__ import annotations


class SymnablaError(Exception):
    """Base class for all package-specific errors."""


class DomainError(SymnablaError, ValueError):
    """An argument is outside the range an operation supports."""


class SizeLimitError(SymnablaError, RuntimeError):
    """A set operation would exceed the configured element cap."""


class BFileParseError(SymnablaError, ValueError):
    """A b-file line could not be parsed.

    Carries the 1-based line number of the offending line.
    """

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class BFileFormatError(SymnablaError, ValueError):
    """A b-file parsed but violates the format contract (e.g. indices
    not strictly increasing)."""


class CoverageError(SymnablaError, ValueError):
    """A b-file does not cover the index range a cross-check needs."""


class TransportError(SymnablaError, RuntimeError):
    """A remote fetch failed or was attempted with networking disabled."""
