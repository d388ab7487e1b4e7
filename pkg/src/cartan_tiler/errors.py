"""Exception types shared across the package."""


class CartanTilerError(Exception):
    """Base class for all package errors."""


class SchemaError(CartanTilerError, ValueError):
    """Input does not match the expected JSON schema."""


class InfeasibleError(CartanTilerError):
    """A construction could not be completed with the given parameters."""

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details
