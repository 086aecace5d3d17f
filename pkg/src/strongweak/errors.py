"""Exception hierarchy shared by all modules."""


class StrongWeakError(Exception):
    """Base class for errors raised by this package."""


class BoundaryCase(StrongWeakError, ValueError):
    """Dependence exponent sum lands exactly on the dimension ``d``."""


class DomainError(StrongWeakError, ValueError):
    """Argument outside the mathematical domain of a formula."""


class DivergentIntegral(StrongWeakError, ValueError):
    """Requested integral is infinite (or quadrature failed to produce a finite value)."""


class EmbeddingFailure(StrongWeakError, RuntimeError):
    """Circulant embedding lost more spectral mass than the configured ceiling."""


class NotPositiveDefinite(StrongWeakError, RuntimeError):
    """Covariance matrix Cholesky factorisation broke down."""


class DegreeTooLarge(StrongWeakError, ValueError):
    pass


class DimensionMismatch(StrongWeakError, ValueError):
    pass


class QuadratureNotConverged(StrongWeakError, RuntimeError):
    pass


class AllZero(StrongWeakError, ValueError):
    """No Hermite coefficient exceeds the rank tolerance."""


class EmptySample(StrongWeakError, ValueError):
    pass


class DegenerateVariance(StrongWeakError, ValueError):
    pass


class InsufficientPoints(StrongWeakError, ValueError):
    pass


class NonFiniteValue(StrongWeakError, ValueError):
    pass


class DegenerateDenominator(StrongWeakError, ValueError):
    """Student transform denominator vanished at some node."""


class ConfigError(StrongWeakError, ValueError):
    pass
