"""Exception hierarchy shared by all storymoments modules.

Every error carries a stable ``code`` string that also appears in CLI
diagnostics and server error bodies.
"""

from __future__ import annotations


class MomentsError(Exception):
    """Base class; ``code`` is a stable machine-readable identifier."""

    code = "Error"

    def __init__(self, message: str, location: dict | None = None):
        super().__init__(message)
        self.message = message
        self.location = location

    def to_dict(self) -> dict:
        d = {"code": self.code, "message": self.message}
        if self.location:
            d["location"] = self.location
        return d


class OutOfRange(MomentsError):
    code = "OutOfRange"


class NotFinite(MomentsError):
    code = "NotFinite"


class NonPositiveWeight(MomentsError):
    code = "NonPositiveWeight"


class EmptyInput(MomentsError):
    code = "EmptyInput"


class EmptyTrack(MomentsError):
    code = "EmptyTrack"


class NonMonotoneTime(MomentsError):
    code = "NonMonotoneTime"


class DuplicateSubject(MomentsError):
    code = "DuplicateSubject"


class SubjectKindMismatch(MomentsError):
    code = "SubjectKindMismatch"


class BadWeights(MomentsError):
    code = "BadWeights"


class DegreeTooHigh(MomentsError):
    code = "DegreeTooHigh"


class DegenerateRange(MomentsError):
    code = "DegenerateRange"


class NoOverlap(MomentsError):
    code = "NoOverlap"


class UnknownSession(MomentsError):
    code = "UnknownSession"


class UnknownTrack(MomentsError):
    code = "UnknownTrack"


class ClockStopped(MomentsError):
    code = "ClockStopped"


class EmptySeries(MomentsError):
    code = "EmptySeries"
