"""Exception hierarchy shared across the package."""


class FuzzyHvacError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(FuzzyHvacError, ValueError):
    """Invalid variable / rule configuration."""


class ConfigSyntaxError(ConfigError):
    def __init__(self, message, line, column=1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class UnknownReferenceError(ConfigError):
    """A rule or rule base refers to a variable or term that is not declared."""

    def __init__(self, message, name):
        self.name = name
        super().__init__(message)


class NoRuleFiredError(FuzzyHvacError, ValueError):
    """Every output degree is zero, so there is nothing to defuzzify."""


class DataError(FuzzyHvacError, ValueError):
    """Malformed input data (CSV rows, feed documents)."""


class FeedDocumentError(DataError):
    """A feed response could not be turned into a sample."""


class EmptyFeedError(FeedDocumentError):
    pass


class MissingFieldError(FeedDocumentError):
    def __init__(self, field):
        self.field = field
        super().__init__(f"missing field {field!r}")


class NonNumericValueError(FeedDocumentError):
    def __init__(self, field, value):
        self.field = field
        self.value = value
        super().__init__(f"field {field!r} is not numeric: {value!r}")


class FeedUnavailableError(FuzzyHvacError):
    """A feed failed too many consecutive polls."""

    def __init__(self, endpoint, failures, last_error=None):
        self.endpoint = endpoint
        self.failures = failures
        self.last_error = last_error
        super().__init__(
            f"{endpoint}: {failures} consecutive failures (last: {last_error})"
        )
