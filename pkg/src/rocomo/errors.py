"""Exception hierarchy for the engine and its document formats.

Every domain error derives from RcmError so callers (and the CLI) can
distinguish domain failures (exit 1) from usage errors (exit 2).
"""

from __future__ import annotations


class RcmError(Exception):
    """Base class for all domain errors."""


# --- naming ---------------------------------------------------------------


class InvalidTerm(RcmError):
    pass


class InvalidIdentifier(RcmError):
    pass


# --- schema ---------------------------------------------------------------


class DuplicateTerm(RcmError):
    pass


class UnknownTerm(RcmError):
    pass


class UnknownClass(UnknownTerm):
    pass


class UnknownParent(UnknownClass):
    pass


class UnknownProperty(UnknownTerm):
    pass


class WouldCreateCycle(RcmError):
    pass


class ConflictingMapping(RcmError):
    pass


# --- store ----------------------------------------------------------------


class DuplicateIndividual(RcmError):
    pass


class UnknownIndividual(RcmError):
    pass


class DomainViolation(RcmError):
    pass


class RangeViolation(RcmError):
    pass


class TypeMismatch(RcmError):
    pass


class InvalidQoC(RcmError):
    pass


class SchemaMismatch(RcmError):
    pass


class IndividualClassConflict(RcmError):
    pass


# --- quality --------------------------------------------------------------


class DuplicateUnit(RcmError):
    pass


class ZeroScale(RcmError):
    pass


class UnknownUnit(RcmError):
    pass


class DimensionMismatch(RcmError):
    pass


# --- situation ------------------------------------------------------------


class NotAnEvent(RcmError):
    pass


class UnknownGoal(RcmError):
    pass


class DuplicateGoal(RcmError):
    pass


class ParentAlreadyAchieved(RcmError):
    pass


class UnknownActivity(RcmError):
    pass


class DuplicateActivity(RcmError):
    pass


class PreconditionNotMet(RcmError):
    pass


class AccessDenied(RcmError):
    pass


class ClockRegression(RcmError):
    pass


class AlreadyTerminal(RcmError):
    pass


class NotRunning(RcmError):
    pass


class NotEligible(RcmError):
    pass


class AtomicNonInterruptable(RcmError):
    pass


class SubgoalsPending(RcmError):
    """Completing an activity whose goal still has unachieved children."""


# --- access ---------------------------------------------------------------


class UnknownGroup(RcmError):
    pass


class NotAnEntity(RcmError):
    pass


class NotAnActivityClass(RcmError):
    pass


# --- documents ------------------------------------------------------------


class DocumentError(RcmError):
    """Base for parse/apply errors; carries source location when known."""

    def __init__(self, message: str, *, source: str = "<string>",
                 line: int | None = None, column: int | None = None):
        self.source = source
        self.line = line
        self.column = column
        where = source
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")


class DocumentSyntaxError(DocumentError):
    pass


class UnknownSection(DocumentSyntaxError):
    pass


class DuplicateDefinitionInDocument(DocumentSyntaxError):
    pass


class DocumentApplyError(DocumentError):
    """Wraps the engine error raised while applying a document record."""

    def __init__(self, message: str, *, cause: Exception | None = None,
                 source: str = "<string>", line: int | None = None,
                 column: int | None = None):
        super().__init__(message, source=source, line=line, column=column)
        self.cause = cause


class StepError(RcmError):
    """A scenario step failed; carries the step index and the cause."""

    def __init__(self, step_index: int, step_text: str, cause: Exception):
        self.step_index = step_index
        self.step_text = step_text
        self.cause = cause
        super().__init__(f"step {step_index} ({step_text}): {cause}")
