"""Exception types shared across the package."""


class RsosError(Exception):
    """Base class for all package errors."""


class NonComposable(RsosError):
    """Arrows whose endpoints do not match cannot be composed."""


class InfiniteSet(RsosError):
    """Enumeration requested for a non-affine (infinite) alcove."""


class ContextMismatch(RsosError):
    """Operands live over different groupoids."""


class ShapeMismatch(RsosError):
    """Block shapes or graded components are incompatible."""


class InvalidTau(RsosError):
    """The modular parameter must have positive imaginary part."""


class NearPole(RsosError):
    """Evaluation requested too close to a pole or a vanishing denominator."""


class BaseOnSingularSet(RsosError):
    """SOS base point lies on the singular set a_i - a_j in r*Z."""


class RestrictionViolated(RsosError):
    """A component that must vanish under the height restriction does not."""


class SupportOutsideAlcove(RsosError):
    """Convolution element has support outside the requested alcove."""


class NonSquare(RsosError):
    """The four arrows of a face do not close."""


class TooLarge(RsosError):
    """Requested exact enumeration exceeds the face budget."""


class OutOfRange(RsosError):
    """Index outside the admissible range."""


class LambdaOutsideAlcove(RsosError):
    """Eigenfunction label must be a regular dominant affine weight."""


class UnknownSuite(RsosError):
    """Verification suite name not recognized."""


class UnknownTarget(RsosError):
    """Computation target name not recognized."""


class InvalidConfig(RsosError):
    """Run configuration violates a constraint."""
