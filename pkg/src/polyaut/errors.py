"""Exception hierarchy shared by every stage of the pipeline."""


class PolyautError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for this failure class."""

    exit_code = 1


class ParseError(PolyautError, ValueError):
    exit_code = 2


class ValidationError(PolyautError, ValueError):
    exit_code = 2


class StructuralError(ValidationError):
    """Input does not even describe a poset (dangling ids, bad ranks)."""


class ResourceError(PolyautError):
    exit_code = 4


class IntegrityError(PolyautError):
    """An internal postcondition failed; indicates a bug or a bad parameter choice."""

    exit_code = 3


class CertificationError(PolyautError):
    exit_code = 3


class RetryExhausted(IntegrityError):
    pass
