class SingularAxisError(ValueError):
    """Expression diverges on the tube axis r = 0."""


class SingularParameterError(ValueError):
    """A parameter appears in a denominator and is zero."""


class MarginalCaseError(ZeroDivisionError):
    """Growth rate is zero where a branch divides by it."""


class ConfigError(ValueError):
    """Invalid scenario configuration; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        prefix = ""
        if path is not None:
            prefix += f"{path}:"
        if line is not None:
            prefix += f"{line}:"
        super().__init__(f"{prefix} {message}" if prefix else message)
        self.message = message
