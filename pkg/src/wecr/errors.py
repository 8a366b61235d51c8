"""Exception hierarchy shared by every wecr module."""

from __future__ import annotations


class WecrError(Exception):
    """Base class for all errors raised by wecr."""


# composition / metric errors

class CompositionError(WecrError, ValueError):
    """A component composition violates a structural invariant."""


class AllZeroError(CompositionError):
    pass


class NegativeFractionError(CompositionError):
    pass


class NotNormalizedError(CompositionError):
    pass


class RankExceedsValencesError(CompositionError):
    pass


class ZeroEntropyError(WecrError, ArithmeticError):
    """Recyclability is undefined for a single-material (zero entropy) composition."""


# database errors

class DatabaseError(WecrError):
    pass


class ParseError(DatabaseError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class SchemaError(ParseError):
    pass


class DuplicateIdError(DatabaseError):
    def __init__(self, component_id: str):
        self.component_id = component_id
        super().__init__(f"duplicate component id or alias: {component_id!r}")


class UnknownComponentError(WecrError, LookupError):
    def __init__(self, label: str):
        self.label = label
        super().__init__(f"unknown component label: {label!r}")


# detection stream errors

class LineError(WecrError, ValueError):
    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"line {line_number}: {reason}")
