"""Exception hierarchy shared by every structure in the package."""


class GraphError(Exception):
    """Base class for all errors raised by dyngraph."""


class DuplicateEdge(GraphError):
    pass


class MissingEdge(GraphError):
    pass


class WeightOutOfRange(GraphError):
    pass


class CycleIntroduced(GraphError):
    """An insertion would break the acyclicity promise of a DAG structure."""


class Singular(GraphError):
    """A field matrix (or its rank-1 update) is not invertible."""


class RandomnessExhausted(GraphError):
    """Repeated singular rebuilds; the random field elements keep colliding."""


class DimensionMismatch(GraphError):
    pass


class EntryOutOfRange(GraphError):
    pass


class BadEpsilon(GraphError):
    pass


class DuplicateRow(GraphError):
    pass


class NoMark(GraphError):
    """rollback() called without a matching rollback_mark()."""


class NotStronglyConnected(GraphError):
    pass


class UnknownComponent(GraphError):
    pass


class InternalInconsistency(GraphError):
    """A randomized sub-structure returned an answer contradicting another one."""


class EndpointMismatch(GraphError):
    """Concatenation of two paths whose endpoints do not meet."""


class ParseError(GraphError):
    """Malformed command script; ``line`` is 1-based."""

    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


class EngineMismatch(GraphError):
    """Script or update mix the selected engine cannot process."""


class CheckFailure(GraphError):
    """An answer disagreed with the brute-force oracle."""
