"""Exception hierarchy.

Every error carries the process exit code the CLI reports for it:
2 for bad input data, 3 for model or schema incompatibility.
"""

from __future__ import annotations


class DisambiguationError(Exception):
    exit_code = 2


class DataError(DisambiguationError, ValueError):
    """Input data failed validation."""

    exit_code = 2


class EmptyLastName(DataError):
    pass


class DuplicateCitationId(DataError):
    pass


class BlockMismatch(DataError):
    pass


class SelfPair(DataError):
    pass


class OutOfRange(DataError):
    pass


class InsufficientBlocks(DataError):
    pass


class EmptyTrainingSet(DataError):
    pass


class DomainError(DataError):
    pass


class ReferenceSetMismatch(DataError):
    pass


class EmptyInput(DataError):
    pass


class ModelError(DisambiguationError):
    """The model file cannot be used with this data or this build."""

    exit_code = 3


class SchemaMismatch(ModelError):
    pass


class FormatVersionUnsupported(ModelError):
    pass


class CorruptModel(ModelError):
    pass
