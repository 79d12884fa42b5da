"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto process exit codes, so keep the taxonomy stable:
validation problems are ValueErrors, resource/convergence problems are
RuntimeErrors.
"""

from __future__ import annotations


class BallfixError(Exception):
    """Base class for all library-specific errors."""


class InvalidDimensionError(BallfixError, ValueError):
    """A dimension argument is not a positive integer."""


class InvalidCombinationError(BallfixError, ValueError):
    """Convex-combination weights are nonpositive or do not sum to one."""


class DomainError(BallfixError, ValueError):
    """An argument lies outside the operation's domain (point outside the
    unit ball, nonpositive radius, discontinuity scale outside (0, 2], ...)."""


class HypothesisError(BallfixError, ValueError):
    """The requested displacement bound is at or below the provable optimum,
    so no certificate can exist in general."""


class CoveringViolationError(BallfixError, RuntimeError):
    """A sample grid failed its covering guarantee (empty embedding support)."""


class BudgetExceededError(BallfixError, RuntimeError):
    """A computation would exceed its configured size budget."""

    def __init__(self, message: str, *, limit: int | None = None,
                 required: int | None = None, min_feasible_alpha: float | None = None):
        super().__init__(message)
        self.limit = limit
        self.required = required
        self.min_feasible_alpha = min_feasible_alpha


class NoConvergenceError(BallfixError, RuntimeError):
    """The fixed-point search exhausted its budget; carries the best point
    found so far (never a claim that no fixed point exists)."""

    def __init__(self, message: str, *, best_point=None, best_residual: float | None = None):
        super().__init__(message)
        self.best_point = best_point
        self.best_residual = best_residual


class CertificateError(BallfixError, RuntimeError):
    """A certificate inequality failed; signals an inconsistency upstream
    (typically an image-diameter check that should have been rerun)."""
