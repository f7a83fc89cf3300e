"""Exception types raised across the package."""


class ActCompError(Exception):
    """Base class for all data/contract errors raised by actcomp."""


# tensor file format
class ActivationFormatError(ActCompError, ValueError):
    pass


class BadMagic(ActivationFormatError):
    pass


class UnsupportedVersion(ActivationFormatError):
    pass


class DimensionOverflow(ActivationFormatError):
    pass


class NonFiniteValue(ActCompError, ValueError):
    pass


class InvalidSpec(ActCompError, ValueError):
    pass


class IoFailure(ActCompError, OSError):
    pass


# transforms
class TooLargeForOracle(ActCompError, ValueError):
    pass


class DimensionMismatch(ActCompError, ValueError):
    pass


# codecs
class RatioInfeasible(ActCompError, ValueError):
    pass


class CorruptPayload(ActCompError, ValueError):
    pass


class BudgetTooSmall(ActCompError, ValueError):
    pass


class RankOutOfRange(ActCompError, ValueError):
    pass


class ConvergenceFailure(ActCompError, RuntimeError):
    pass


# metrics
class ZeroReference(ActCompError, ValueError):
    pass


class IndexOutOfRange(ActCompError, IndexError):
    pass


class TooFewTokens(ActCompError, ValueError):
    pass


# simulation
class InvalidConfig(ActCompError, ValueError):
    pass


class SlaInfeasible(ActCompError, ValueError):
    pass
