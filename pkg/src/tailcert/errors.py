"""Exception types raised across the package."""


class TailcertError(Exception):
    """Base class for all package errors."""


class OutOfDomainError(TailcertError):
    """Certificate queried below its index threshold or outside [C2, R_n]."""


class SymbolicConstantsError(TailcertError):
    """Operation requires concrete constants but the certificate still
    carries unfitted symbolic ones."""


class NonPositiveRateError(TailcertError):
    """A rate or size sequence evaluated to a non-positive value."""


class NonPositiveAlphaError(TailcertError):
    pass


class BadModulusError(TailcertError):
    """Continuity modulus does not vanish at zero on the probe grid."""


class DominationTooWeakError(TailcertError):
    """-log(p_n)/r_n fails to dominate the rate function on the probe range."""


class MissingAssertionError(TailcertError):
    """Caller did not declare a required model property."""


class MissingLipschitzAssertionError(MissingAssertionError):
    pass


class CardinalityTooLargeError(TailcertError):
    """Index-set cardinality grows too fast for the available rate."""


class MismatchedSizeOrRateError(TailcertError):
    pass


class RateTooSmallError(TailcertError):
    pass


class RateBelowOneError(TailcertError):
    pass


class RateBelowDimensionError(TailcertError):
    pass


class BadAlphaError(TailcertError):
    pass


class BadSpecError(TailcertError):
    pass


class MomentsUnavailableError(TailcertError):
    pass


class ZeroNormError(TailcertError):
    pass


class EpsilonOutOfRangeError(TailcertError):
    pass


class BudgetExceededError(TailcertError):
    """Point cap hit before the stopping rule fired."""


class BadGridError(TailcertError):
    pass


class NoInDomainProbesError(TailcertError):
    pass


class UnsatisfiableError(TailcertError):
    """No point of the constant search grid makes the certificate pass."""


class InsufficientExceedancesError(TailcertError):
    pass


class ScenarioUnknownError(TailcertError):
    pass


class DimensionTooLargeError(TailcertError):
    pass


class OracleBudgetExceededError(TailcertError):
    pass


class IoFailureError(TailcertError):
    pass


class SerializationError(TailcertError):
    pass
