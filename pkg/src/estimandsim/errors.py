"""Exception hierarchy.

Validation failures carry the name of the offending field so that the CLI
can point the user at the exact key in their config file.
"""

from __future__ import annotations


class EstimandSimError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(EstimandSimError, ValueError):
    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


class ProbabilityOutOfRange(ValidationError):
    pass


class PeriodProbabilitiesExceedOne(ValidationError):
    pass


class OddSampleSize(ValidationError):
    pass


class InvalidArms(ValidationError):
    pass


class UnknownArmReference(ValidationError):
    pass


class DuplicateCategoryId(ValidationError):
    pass


class DuplicateArmId(ValidationError):
    pass


class TooFewArms(ValidationError):
    pass


class InvalidWindow(ValidationError):
    pass


class MarginalInfeasible(ValidationError):
    """The requested conditional law cannot reproduce the clinical marginal."""


class OddCohortSize(EstimandSimError, ValueError):
    pass


class EmptyCohort(EstimandSimError, ValueError):
    pass


class EmptyArm(EstimandSimError, ValueError):
    pass


class NonPositiveDf(EstimandSimError, ValueError):
    pass


class DomainError(EstimandSimError, ValueError):
    pass


class TooFewValues(EstimandSimError, ValueError):
    pass


class ConfigError(EstimandSimError):
    """Anything wrong with a config or estimand file (CLI exit code 1)."""


class ConfigFileNotFound(ConfigError, FileNotFoundError):
    pass


class MalformedJson(ConfigError):
    def __init__(self, path: str, line: int, column: int, message: str):
        self.path = path
        self.line = line
        self.column = column
        super().__init__(f"{path}:{line}:{column}: malformed JSON ({message})")


class SchemaViolation(ConfigError):
    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"schema violation at {key!r}: {message}")


class UnknownPreset(ConfigError):
    def __init__(self, name: str, known):
        self.name = name
        super().__init__(f"unknown preset {name!r}; choose from {', '.join(sorted(known))}")
