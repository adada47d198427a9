"""Exception hierarchy shared by every module in the package."""


class OneClassError(Exception):
    """Base class for all library errors."""


class DataError(OneClassError, ValueError):
    """Input data could not be used as given."""


class MalformedRow(DataError):
    pass


class NonNumericFeature(DataError):
    pass


class EmptyFile(DataError):
    pass


class UnknownTargetLabel(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class TooFewSamples(DataError):
    pass


class NoTargetSamples(DataError):
    pass


class EmptyTestSet(DataError):
    pass


class MissingCells(DataError):
    pass


class VersionMismatch(DataError):
    pass


class EmptyGrid(DataError):
    pass


class NumericalError(OneClassError, ArithmeticError):
    """A computation could not produce a trustworthy number."""


class SingularSystem(NumericalError):
    pass


class DegenerateDenominator(NumericalError):
    pass


class UnsupportedK(OneClassError, ValueError):
    pass
