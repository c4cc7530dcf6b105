"""Exception hierarchy shared by every module of the package."""


class AlgebraError(Exception):
    """Base class for all errors raised by symdetfano."""


class ZeroPolynomialError(AlgebraError):
    pass


class MissingImageError(AlgebraError):
    pass


class RingMismatchError(AlgebraError):
    pass


class NotSquareError(AlgebraError):
    """Raised for non-square matrices where a square one is required."""


class IndexOutOfRangeError(AlgebraError, IndexError):
    pass


class InexactDivisionError(AlgebraError):
    pass


class InhomogeneousInputError(AlgebraError):
    pass


class DegreeMismatchError(AlgebraError):
    pass


class NotBlockFormError(AlgebraError):
    pass


class DecompositionFailure(AlgebraError):
    pass


class DegenerateInstanceError(AlgebraError):
    pass


class SharedRootError(DegenerateInstanceError):
    """phi*(z1) and phi*(z2) have a common root (Delta = 0)."""


class WrongStratumError(AlgebraError):
    pass


class MembershipFailure(AlgebraError):
    pass


class CertificateMismatch(AlgebraError):
    pass


class DegenerateBranch(AlgebraError):
    pass


class BadPrimeError(AlgebraError):
    pass


class ZeroPointError(AlgebraError):
    pass


class ExhaustedRejection(AlgebraError):
    pass


class ParseError(AlgebraError, ValueError):
    pass
