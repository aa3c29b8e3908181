"""Shared exception types; the CLI maps them onto exit codes."""


class PadicError(Exception):
    """Base class for all library errors."""


class BadInputError(PadicError):
    """Malformed input data (exit code 4)."""


class PrecisionError(PadicError):
    """A computation would need more p-adic digits than are available (exit code 3)."""


class BudgetError(PadicError):
    """A search or closure exceeded its configured budget (exit code 3)."""


class CertificateError(PadicError):
    """A verification step that should hold by theory failed (exit code 2)."""
