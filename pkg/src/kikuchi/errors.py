"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter violates an operation's preconditions."""


class InvalidSubsetError(ParameterError):
    """A subset has the wrong cardinality or an out-of-range element."""


class UndefinedCorrelationError(ParameterError):
    """Correlation requested with a zero vector."""


class CapacityError(RuntimeError):
    """A requested object would exceed a configured size cap."""


class CapabilityError(RuntimeError):
    """The input lacks something the operation needs (e.g. a dense tensor)."""


class ConfigError(ParameterError):
    """An experiment configuration is malformed or fails validation."""
