"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """A dense object would exceed the configured dimension cap."""


class NumericDomainError(ValueError):
    """Input lies outside the numerical domain of an operation (e.g. not PSD)."""


class ValidationError(ValueError):
    """Malformed channel or state data (e.g. Kraus completeness violated)."""


class VerificationError(RuntimeError):
    """A numerically checked identity or inequality did not hold."""
