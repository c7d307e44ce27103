"""Exception hierarchy shared across the package.

The CLI maps InputError to exit code 1 and VerificationError to exit
code 2; everything else is a bug.
"""


class CausalotError(Exception):
    """Base class for all package errors."""


class InputError(CausalotError):
    """Malformed or inconsistent input data (bad points, unresolved names,
    schema violations, mismatched interval kinds, ...)."""


class PreconditionError(CausalotError):
    """An operation was called on values violating its contract
    (non-causal event pair passed to the geodesic selector, degenerate
    path, incompatible marginals, ...)."""


class VerificationError(CausalotError):
    """A verified property failed: a check that is supposed to hold for
    well-formed data came back negative."""
