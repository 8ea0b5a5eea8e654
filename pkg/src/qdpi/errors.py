"""Exception hierarchy shared by every qdpi module."""


class QDPError(Exception):
    """Base class for all errors raised by qdpi."""


class InvalidMatrix(QDPError, ValueError):
    """Malformed matrix data (wrong shape, wrong length, non-finite entries)."""


class NotHermitian(QDPError, ValueError):
    pass


class NoConvergence(QDPError, RuntimeError):
    pass


class DomainViolation(QDPError, ValueError):
    """An eigenvalue lies outside the domain of the scalar function."""


class DimensionMismatch(QDPError, ValueError):
    pass


class InvalidState(QDPError, ValueError):
    """Matrix fails the density-operator invariants (PSD, unit trace)."""


class InvalidChannel(QDPError, ValueError):
    """Kraus family is not trace preserving, or is otherwise malformed."""


class SingularReference(QDPError, ValueError):
    """A reference operator required to be strictly positive is singular."""


class InvalidPOVM(QDPError, ValueError):
    pass


class InfeasibleDims(QDPError, ValueError):
    pass


class PoleEvaluation(QDPError, ValueError):
    """Evaluation point collides with an atom or the support of the measure."""


class QuadratureFailure(QDPError, RuntimeError):
    pass


class InvalidPickSpec(QDPError, ValueError):
    pass
