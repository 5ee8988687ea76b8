"""
Exception hierarchy for the lzse factorization toolkit.

Every error raised by the library derives from LzseError so the CLI can map
failures onto exit codes in one place.
"""

from typing import Any, Dict, Optional


class LzseError(Exception):
    """Base class for all lzse errors."""

    exit_code = 1

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.context = context or {}

    def __str__(self) -> str:
        if not self.context:
            return self.message
        details = ", ".join(f"{key}={value}" for key, value in self.context.items())
        return f"{self.message} ({details})"


class InvalidInputError(LzseError, ValueError):
    """Empty text, empty bit vector, negative symbols or a malformed epsilon."""

    exit_code = 2


class RangeError(LzseError, IndexError):
    """Query argument outside the valid range of a structure."""


class StateError(LzseError):
    """Workspace used in the wrong phase, or a resource already claimed."""


class DomainError(LzseError, ValueError):
    """Operation undefined for the given node (parent of the root, label of an inner node)."""


class ConstructionError(LzseError):
    """Inconsistent suffix array / LCP input while building the tree."""


class InvariantViolation(LzseError):
    """An internal algorithmic invariant did not hold."""


class LemmaViolation(InvariantViolation):
    """An audited space or size bound failed."""


class CodecError(LzseError):
    """Malformed factor stream."""
