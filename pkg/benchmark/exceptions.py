class BenchmarkError(Exception):
    """Base class for every error raised by the benchmark modules."""


class InvalidParameterError(BenchmarkError, ValueError):
    pass


class DimensionMismatchError(BenchmarkError, ValueError):
    pass


class CyclicGraphError(BenchmarkError):
    pass


class CyclicResultError(CyclicGraphError):
    """A learner produced a graph that is still cyclic after pruning."""


class DegenerateColumnError(BenchmarkError, ValueError):
    pass


class UndefinedValueError(BenchmarkError, ValueError):
    pass


class InvalidMetricError(BenchmarkError, ValueError):
    pass


class MissingDataError(BenchmarkError, LookupError):
    pass


class InvalidConfigError(BenchmarkError, ValueError):
    pass
