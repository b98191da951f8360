"""Error taxonomy shared across the toolkit.

Three failure families map onto the CLI exit codes: bad configuration
(exit 1), unreadable or malformed files (exit 2), and numeric / domain
violations in otherwise well-formed inputs (exit 3).
"""


class ConfigError(ValueError):
    """Invalid parameter combination or out-of-contract configuration."""


class DomainError(ValueError):
    """Numerically invalid input: non-finite values, empty ranges, bad geometry."""


class DegenerateSampleError(DomainError):
    """A sample with zero dynamic range that cannot be normalized."""


class DataFormatError(IOError):
    """A dataset or model file that does not match the expected layout."""
