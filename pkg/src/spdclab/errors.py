"""Exception types shared across the package.

The service layer maps these onto HTTP status codes and the CLI onto exit
codes, so raising the right class matters more than the message text.
"""


class InputDomainError(ValueError):
    """Input is outside the physical or numerical domain of an operation."""


class IncompleteProjectorSetError(InputDomainError):
    """Projector set is not informationally complete (singular Gram matrix)."""


class NumericalFailure(RuntimeError):
    """A computation failed to produce a trustworthy number."""


class NonConvergenceError(NumericalFailure):
    """Optimizer exhausted its restart budget without converging.

    Carries the best estimate found so far in ``diagnostics`` so callers can
    inspect (or salvage) a failed reconstruction.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
