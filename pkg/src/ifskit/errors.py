"""Exception hierarchy shared by every module of the package."""


class IFSError(Exception):
    """Base class for all package errors."""


class DomainError(IFSError, ValueError):
    """A point or box lies outside the domain, or a map leaves the domain."""


class IncompatibleGridError(IFSError, ValueError):
    """Two grid sets do not share domain and resolution."""


class EmptySetError(IFSError, ValueError):
    """An operation would produce the empty set, which is not a member of H(X)."""


class NotNestedError(IFSError, ValueError):
    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"sequence is not nested at step {step}")


class PreconditionError(IFSError, ValueError):
    """A documented precondition of an operation does not hold."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class StreamExhaustedError(IFSError):
    """An explicit symbol stream ran out before a decision was reached."""


class NoCertificateError(IFSError):
    """No weakly hyperbolic prefix could be certified within the budget."""


class HypothesisUnmetError(IFSError):
    """A theorem hypothesis was not witnessed and no override was given."""


class ConfigError(IFSError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
