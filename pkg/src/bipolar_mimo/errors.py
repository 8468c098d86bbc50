"""Exception hierarchy shared by both engines."""


class BipolarMimoError(Exception):
    """Base class for every error raised by this package."""


class DomainError(BipolarMimoError, ValueError):
    """Argument outside the domain of a special function or formula."""


class ConfigError(BipolarMimoError, ValueError):
    """Invalid or unparsable system configuration."""


class HypothesisViolation(BipolarMimoError, ValueError):
    """Parameters violate the hypotheses a closed form or scaling law rests on."""


class InsufficientDof(BipolarMimoError):
    """Not enough receive dimensions left to build the requested filter."""


class DimensionExhausted(InsufficientDof):
    """Null space requested for at least as many vectors as dimensions."""


class InsufficientInterferers(BipolarMimoError):
    """Realization holds fewer interferers than the receiver wants to cancel."""


class QuadratureNonConvergence(BipolarMimoError, ArithmeticError):
    """Refinement of a quadrature rule failed to stabilise."""


class InvalidCancellation(HypothesisViolation):
    """Number of cancelled interferers outside the admissible range."""


class UnsupportedLaw(BipolarMimoError, TypeError):
    """Distribution without a closed-form Laplace transform in this package."""
