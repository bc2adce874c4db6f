"""Exception hierarchy shared by all projmln modules."""


class Error(Exception):
    """Base class for all errors raised by this package."""


class ParseError(Error):
    """Syntax error in a declaration, formula, or data file."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f" at line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(message + loc)


class ValidationError(Error):
    """Semantically invalid input: unknown predicate, bad arity, constant out of range, invalid parameters."""


class EnumerationCapError(Error):
    """Brute-force enumeration was requested beyond the configured ground-atom cap."""


class NotProjectiveError(Error):
    """Conversion to a block model requires a projective network."""

    def __init__(self, spread):
        self.spread = spread
        super().__init__(f"network is not projective (log pair-sum spread {spread:.6g})")


class NotConvergedError(Error):
    """An optimization result was required to have converged but did not."""
