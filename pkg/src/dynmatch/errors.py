"""Exception hierarchy shared across the package."""


class DynMatchError(Exception):
    """Base class for all errors raised by dynmatch."""


class GraphError(DynMatchError, ValueError):
    pass


class DuplicateEdge(GraphError):
    pass


class MissingEdge(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class VertexOutOfRange(GraphError, IndexError):
    pass


class DegreeCapExceeded(DynMatchError):
    """An endpoint already sits at the coloring structure's degree cap.

    Upstream callers must apply removals before insertions so that a
    bucket never transiently exceeds its cap.
    """


class ColorOutOfRange(DynMatchError, IndexError):
    pass


class NonTermination(DynMatchError, RuntimeError):
    """The fractional repair loop exceeded its iteration cap."""


class InvalidValue(DynMatchError, ValueError):
    pass


class IncompleteComputation(DynMatchError, RuntimeError):
    """A stepped epoch computation was not finished at epoch end."""


class DegreeBoundViolated(DynMatchError, ValueError):
    pass


class NoLegalMove(DynMatchError):
    pass


class InvariantViolation(DynMatchError, AssertionError):
    """Raised by the harness when a checked runtime invariant fails."""
