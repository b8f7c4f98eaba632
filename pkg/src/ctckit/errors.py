"""Exception types shared across the toolkit."""


class InvalidInputError(ValueError):
    """Raised when data handed to an operation violates its preconditions."""


class InvalidParamsError(ValueError):
    """Raised when decoding or search parameters are out of their legal range."""


class ResourceLimitError(RuntimeError):
    """Raised when an exhaustive operation is asked to exceed its enumeration cap."""


class ArpaParseError(ValueError):
    """Raised on malformed ARPA text.

    Carries the 1-based line number of the offending line when one can be
    attributed (0 for end-of-input problems such as a missing ``\\end\\``).
    """

    def __init__(self, message: str, line_number: int = 0):
        self.line_number = line_number
        if line_number:
            message = f"line {line_number}: {message}"
        super().__init__(message)
