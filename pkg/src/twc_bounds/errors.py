"""Exception types raised by the twc_bounds library.

The CLI maps these onto exit codes (see `_cli_report.run`).
"""


class TwcError(Exception):
    """Base class for all twc_bounds errors."""


class ChannelFormatError(TwcError, ValueError):
    """The channel file is not well-formed (bad JSON, missing keys, wrong shapes)."""


class ChannelValidationError(TwcError, ValueError):
    """The channel parsed but is not a valid pair of transition tensors."""


class GridSpecError(TwcError, ValueError):
    """Invalid simplex quantization (dimension < 1 or 1/delta not integral)."""


class EvaluationCapError(TwcError, RuntimeError):
    """A grid sweep would exceed the configured evaluation cap."""
