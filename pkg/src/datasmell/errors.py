class SmellError(Exception):
    """Base class for errors raised by datasmell."""


class ConfigError(SmellError):
    """Invalid configuration, preset, registry entry or resource file."""


class FormatError(SmellError):
    """Input that cannot be interpreted as a delimited table."""


class ConsistencyError(SmellError):
    """Internal invariant violated (e.g. more flags than instances)."""
