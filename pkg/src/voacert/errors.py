"""Shared exception types."""


class VoacertError(Exception):
    """Base class for all package errors."""


class SpecError(VoacertError):
    """Invalid model specification (odd lattice square, bad metric, ...)."""


class TruncationError(VoacertError):
    """An operation needs a larger truncation than the model carries.

    Distinguishes window effects from genuine algebraic failures: callers
    receive the minimal truncation that would make the computation valid.
    """

    def __init__(self, required: int, available: int, what: str = ""):
        self.required = required
        self.available = available
        msg = f"truncation insufficient: need N >= {required}, have N = {available}"
        if what:
            msg += f" ({what})"
        super().__init__(msg)


class ModelBugError(VoacertError):
    """Internal inconsistency (non-Hermitian Gram, non-positive block)."""


class ConfigError(VoacertError):
    """Malformed suite configuration."""
