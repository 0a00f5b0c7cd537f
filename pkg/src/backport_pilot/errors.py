"""Domain error hierarchy.

Every error the tool can report to an operator derives from PilotError.
The short code (class name without the ``Error`` suffix) is what the CLI
prints to stderr and what the service returns in its JSON error body.
"""


class PilotError(Exception):
    """Base class for all domain errors."""

    @property
    def code(self) -> str:
        name = type(self).__name__
        return name[:-5] if name.endswith("Error") else name

    def __str__(self) -> str:
        return super().__str__() or self.code


# deb822
class MalformedFieldError(PilotError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateFieldError(PilotError):
    pass


class InvalidFieldNameError(PilotError):
    pass


# version
class EmptyVersionError(PilotError):
    pass


class BadEpochError(PilotError):
    pass


class IllegalCharacterError(PilotError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset


# depends
class BadOperatorError(PilotError):
    pass


class UnbalancedParenthesisError(PilotError):
    pass


class EmptyAlternativeError(PilotError):
    pass


class BadNameError(PilotError):
    pass


# catalog
class MissingFieldError(PilotError):
    pass


class DuplicateRepoIdError(PilotError):
    pass


class NoTargetError(PilotError):
    pass


class BrokenChainError(PilotError):
    pass


class UnknownRepoError(PilotError):
    pass


class BadStanzaError(PilotError):
    def __init__(self, message: str, index: int | None = None):
        if index is not None:
            message = f"stanza {index}: {message}"
        super().__init__(message)
        self.index = index


# transport
class NetworkError(PilotError):
    pass


class NotInCacheError(PilotError):
    pass


class ChecksumMismatchError(PilotError):
    def __init__(self, expected: str, actual: str, path: str = ""):
        where = f" for {path}" if path else ""
        super().__init__(f"expected {expected}, got {actual}{where}")
        self.expected = expected
        self.actual = actual


class DecompressError(PilotError):
    pass


class BadDigestFormatError(PilotError):
    pass


# selector
class NoSourceReleaseError(PilotError):
    pass


# planner
class UnknownSuiteError(PilotError):
    pass


class SourceBelowTargetError(PilotError):
    pass


class MissingSourceRecordError(PilotError):
    pass


# ledger
class IllegalTransitionError(PilotError):
    def __init__(self, from_state: str, to_state: str, index: int | None = None):
        at = f" at event {index}" if index is not None else ""
        super().__init__(f"no transition {from_state} -> {to_state}{at}")
        self.from_state = from_state
        self.to_state = to_state
        self.index = index


class UnknownTaskError(PilotError):
    pass


class LedgerCorruptError(PilotError):
    pass


# schedule
class BadVersionStringError(PilotError):
    pass


class NotAnLtsError(PilotError):
    pass


class UnknownTargetError(PilotError):
    pass


# report
class InconsistentInputsError(PilotError):
    pass


# cli / service
class UnknownStateError(PilotError):
    pass


class ConfigNotFoundError(PilotError):
    pass
