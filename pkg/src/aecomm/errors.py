"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Inconsistent layout, invalid channel parameters, or bad config values."""


class ConfigFileError(ConfigurationError):
    """Malformed config file; carries the offending line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateCodewordError(ArithmeticError):
    """Encoder produced a (near-)zero vector that cannot be energy-normalized."""


class DivergenceError(ArithmeticError):
    """Training or loss evaluation produced a non-finite value."""

    def __init__(self, message, step=None):
        self.step = step
        if step is not None:
            message = f"{message} (at step {step})"
        super().__init__(message)
