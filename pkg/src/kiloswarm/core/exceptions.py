"""
Exception hierarchy for KiloSwarm.
"""


class KiloswarmError(Exception):
    """Base class for all simulator errors."""


class ConfigError(KiloswarmError):
    """Invalid or unparsable experiment configuration."""

    def __init__(self, message, source=None, section=None, key=None, line=None):
        self.source = source
        self.section = section
        self.key = key
        self.line = line
        location = []
        if source:
            location.append(str(source))
        if line is not None:
            location.append(f"line {line}")
        if section:
            location.append(f"[{section}]" + (f" {key}" if key else ""))
        prefix = ", ".join(location)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class InsufficientDataError(KiloswarmError):
    """A series or trajectory is too short for the requested operation."""


class UnestimableError(KiloswarmError):
    """The data cannot support the requested estimate."""


class DegenerateFitError(KiloswarmError):
    """A geometric fit has no unique solution (e.g. collinear points)."""


class SchemaError(KiloswarmError):
    """An input table lacks a column required by the consumer."""

    def __init__(self, column, source=None):
        self.column = column
        self.source = source
        where = f" in {source}" if source else ""
        super().__init__(f"missing column '{column}'{where}")
