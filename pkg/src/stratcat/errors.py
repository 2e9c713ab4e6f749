"""Exception types shared by every module.

The CLI maps ``SchemaError`` to exit code 2; everything else that escapes a
subcommand is either a reported failure or an internal bug.
"""


class StratcatError(Exception):
    """Base class for all library errors."""


class SchemaError(StratcatError, ValueError):
    """Raw input data does not match the expected shape."""


class UsageError(StratcatError, ValueError):
    """An operation was called outside its precondition."""


class StratificationError(StratcatError, ValueError):
    """Vertex labels are not monotone along some edge."""


class CoefficientError(StratcatError, ValueError):
    """A coefficient system is not a functor on the composition table."""


class DataError(StratcatError, ValueError):
    """Input data is well formed but inconsistent (e.g. d∘d != 0)."""
