"""Exception types shared across the package."""


class SepdiscError(Exception):
    """Base class for all sepdisc errors."""


class DimsMismatchError(SepdiscError, ValueError):
    """Operands live on different Hilbert spaces."""


class HermiticityError(SepdiscError, ValueError):
    """Matrix is further from Hermitian than the admission tolerance."""


class PreconditionError(SepdiscError, ValueError):
    """A documented precondition of the called operation is violated."""


class CertificateMissingError(PreconditionError):
    """Measurement lacks the separable certificates the operation needs."""


class TraceMismatchError(PreconditionError):
    """Supplied trace/value pair disagrees beyond tolerance."""


class SizeOverflowError(PreconditionError):
    """Requested total dimension exceeds the supported ceiling."""


class EigensolverError(SepdiscError, RuntimeError):
    """The dense eigensolver failed to converge."""
