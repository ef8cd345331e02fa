"""Exception types shared across the package."""


class AvgQueryError(Exception):
    """Base class for all package errors."""


class ParseError(AvgQueryError, ValueError):
    """Malformed truth-table or DNF text."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class LimitExceeded(AvgQueryError):
    """A size limit (truth-table, DP, or measurement) would be exceeded."""


class PreconditionError(AvgQueryError, ValueError):
    """An operation's hypothesis does not hold for the given input.

    ``hypothesis`` names the violated condition, e.g. ``"wt(f) < log n"``.
    """

    def __init__(self, hypothesis, detail=""):
        self.hypothesis = hypothesis
        msg = f"hypothesis violated: {hypothesis}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ZeroErrorViolation(AvgQueryError):
    """A strategy produced the wrong output on some input."""

    def __init__(self, strategy, witness, expected, got):
        self.strategy = strategy
        self.witness = witness
        self.expected = expected
        self.got = got
        super().__init__(
            f"strategy {strategy!r} outputs {got} on input index {witness}, f = {expected}"
        )


class BoundViolation(AvgQueryError):
    """A measured quantity exceeded a bound that must hold."""
