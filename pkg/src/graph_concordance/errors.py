"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`GraphConcordanceError`. The CLI maps the two middle layers onto exit
codes: :class:`InputError` -> 2, :class:`DegeneracyError` -> 3.
"""


class GraphConcordanceError(Exception):
    """Base class for all package errors."""


class InputError(GraphConcordanceError):
    """Bad configuration, malformed files or an invalid graph."""


class DegeneracyError(GraphConcordanceError):
    """The data cannot support the requested statistic."""


class ConfigError(InputError, ValueError):
    pass


class ParseError(InputError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
            if line is not None:
                where += f"{line}:"
            where += " "
        super().__init__(where + message)


class AlignmentError(InputError):
    """Outcome or type rows do not line up with the graph's vertices."""

    def __init__(self, message, labels=()):
        self.labels = list(labels)
        shown = self.labels[:10]
        if shown:
            more = f" (+{len(self.labels) - 10} more)" if len(self.labels) > 10 else ""
            message = f"{message}: {', '.join(map(str, shown))}{more}"
        super().__init__(message)


class GraphValidationError(InputError):
    pass


class SelfLoopError(GraphValidationError):
    pass


class EmptyGraphError(GraphValidationError):
    pass


class CompleteGraphError(GraphValidationError):
    pass


class ClosedNeighborhoodError(GraphValidationError):
    """Some vertex is adjacent to every other vertex, so it has no non-neighbors."""

    def __init__(self, message, vertices=()):
        self.vertices = list(vertices)
        super().__init__(message)


class DegenerateVarianceError(DegeneracyError):
    pass


class DegenerateTypeError(DegeneracyError):
    pass


class NoTypedEdgesError(DegeneracyError):
    pass


class InferenceError(DegeneracyError):
    pass
