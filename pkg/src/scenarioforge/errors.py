"""Error types shared by the engine, service, and CLI.

Every error carries a stable ``name`` (the class name) that is surfaced
verbatim on the wire and on the CLI's stderr, plus an HTTP status used by
the service layer.
"""

from __future__ import annotations


class WorkshopError(Exception):
    """Base class for all domain errors."""

    status = 400

    def __init__(self, detail: str = ""):
        super().__init__(detail)
        self.detail = detail

    @property
    def name(self) -> str:
        return type(self).__name__


# configuration / validation
class InvalidAgenda(WorkshopError):
    status = 400


class EmptyText(WorkshopError):
    status = 400


class TextTooLong(WorkshopError):
    status = 400


class OutOfScale(WorkshopError):
    status = 400


class TooMany(WorkshopError):
    status = 400


class DuplicateItem(WorkshopError):
    status = 400


class OverlappingGroups(WorkshopError):
    status = 400


class UnknownArea(WorkshopError):
    status = 400


class UnknownCriterion(WorkshopError):
    status = 400


# lookup failures
class UnknownWorkshop(WorkshopError):
    status = 404


class UnknownStatement(WorkshopError):
    status = 404


class UnknownItem(WorkshopError):
    status = 404


class UnknownAlias(WorkshopError):
    status = 404


class UnknownParent(WorkshopError):
    status = 404


class UnknownNode(WorkshopError):
    status = 404


# authorization
class InvalidToken(WorkshopError):
    status = 401


class NotFacilitator(WorkshopError):
    status = 403


class NotStakeholder(WorkshopError):
    status = 403


# state machine gates
class WrongPhase(WorkshopError):
    status = 409


class DuplicateFacilitator(WorkshopError):
    status = 409


class StepsIncomplete(WorkshopError):
    status = 409


class OutOfOrder(WorkshopError):
    status = 409


class AlreadyOpen(WorkshopError):
    status = 409


class StepClosed(WorkshopError):
    status = 409


class NothingOpen(WorkshopError):
    status = 409


class NoReport(WorkshopError):
    status = 409


class TaggingDisabled(WorkshopError):
    status = 409


class InsufficientHistory(WorkshopError):
    status = 409


# scenario trees
class KindOrderViolation(WorkshopError):
    status = 400


class VisionReused(WorkshopError):
    status = 400


class EmptySelection(WorkshopError):
    status = 400


class SingleGroup(WorkshopError):
    status = 400


# numerical core
class EmptyInput(WorkshopError):
    status = 400


class AfterExceedsBefore(WorkshopError):
    status = 400


class MalformedBallot(WorkshopError):
    status = 400


class TooFewRankers(WorkshopError):
    status = 400


class TooFewItems(WorkshopError):
    status = 400


class NoAreas(WorkshopError):
    status = 400


class UnassignedStatement(WorkshopError):
    status = 400


class EvenVoters(WorkshopError):
    status = 400


class UnknownStepKind(WorkshopError):
    status = 400


# persistence
class SequenceConflict(WorkshopError):
    status = 409


class CorruptLog(WorkshopError):
    """Raised when an event log fails schema or sequence validation.

    ``seq`` names the first offending sequence number.
    """

    status = 500

    def __init__(self, detail: str = "", seq: int | None = None):
        super().__init__(detail)
        self.seq = seq
