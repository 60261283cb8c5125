"""Exception types shared across the package.

Each maps to a CLI exit code: precondition violations exit 2, identity gaps
exit 3, budget refusals exit 4, everything else that fails exits 1.
"""

from __future__ import annotations


class FFVarError(Exception):
    """Base class for package errors."""


class PreconditionError(FFVarError):
    """An operation was called outside its documented domain."""


class BudgetError(FFVarError):
    """An enumeration would exceed the configured size budget."""


class GapError(FFVarError):
    """A checked identity failed its tolerance."""


class IrreducibleCacheError(FFVarError):
    """A sieve cache file is malformed or inconsistent."""


class SmoothWindowError(PreconditionError):
    """No prime factor in the requested degree window."""
