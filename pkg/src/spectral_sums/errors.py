class SpectralSumsError(Exception):
    pass


class ConfigurationError(SpectralSumsError, ValueError):
    """Invalid parameters or configuration (CLI exit status 2)."""


class StructuralError(SpectralSumsError, ValueError):
    """Objects that must share a grid or shape do not."""


class DomainError(SpectralSumsError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class NumericalError(SpectralSumsError, ArithmeticError):
    """An iterative method failed to converge or produced non-finite output (exit status 3)."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics

    def __str__(self):
        base = super().__str__()
        if not self.diagnostics:
            return base
        extra = ", ".join(f"{k}={v!r}" for k, v in sorted(self.diagnostics.items()))
        return f"{base} ({extra})"
