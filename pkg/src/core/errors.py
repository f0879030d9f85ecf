"""
Exception hierarchy for the MTSS toolkit.

Findings (lint diagnostics, parse diagnostics) are returned as data.
Everything that is a genuine failure raises one of the classes below.
"""

from typing import List, Optional, Sequence, Tuple

# (stream, index, field) - used by the parser to attach a source span
Locator = Tuple[str, Optional[int], Optional[str]]


class MTSSError(Exception):
    """Base class for every toolkit error."""


# --- Structure -------------------------------------------------------------

class StructureError(MTSSError):
    """A type-level invariant of the script model does not hold."""

    def __init__(self, message: str, path: str, locator: Optional[Locator] = None):
        super().__init__(message)
        self.path = path
        self.locator = locator


class DuplicateId(StructureError):
    def __init__(self, stream: str, id: str, locator: Optional[Locator] = None):
        super().__init__(f"duplicate id {id} in {stream}", f"{stream}/{id}", locator)
        self.stream = stream
        self.id = id


class BadIdPattern(StructureError):
    def __init__(self, id: str, path: str, reason: str = "", locator: Optional[Locator] = None):
        message = f"bad id {id!r}"
        if reason:
            message += f": {reason}"
        super().__init__(message, path, locator)
        self.id = id


class BadTimeRange(StructureError):
    def __init__(self, id: str, path: str, locator: Optional[Locator] = None):
        super().__init__(f"invalid time_range on {id}: need 0 <= start < end", path, locator)
        self.id = id


class FieldOnWrongCategory(StructureError):
    def __init__(self, owner: str, field: str, path: str, locator: Optional[Locator] = None):
        super().__init__(f"field {field} is not allowed on {owner}", path, locator)
        self.owner = owner
        self.field = field


class MissingRequiredField(StructureError):
    def __init__(self, path: str, locator: Optional[Locator] = None):
        super().__init__(f"missing required field {path}", path, locator)


class InvalidValue(StructureError):
    def __init__(self, path: str, reason: str, locator: Optional[Locator] = None):
        super().__init__(f"invalid value at {path}: {reason}", path, locator)
        self.reason = reason


class BadInlineTimestamp(StructureError):
    def __init__(self, path: str, reason: str, locator: Optional[Locator] = None):
        super().__init__(f"bad inline timestamp in {path}: {reason}", path, locator)
        self.reason = reason


class InlineTimestampError(MTSSError):
    """A `[t=` marker that does not parse as a time."""

    def __init__(self, offset: int, reason: str):
        super().__init__(f"{reason} at character {offset}")
        self.offset = offset
        self.reason = reason


# --- Parsing ---------------------------------------------------------------

class ParseFailure(MTSSError):
    """Raised by load_script when a document yields diagnostics."""

    def __init__(self, diagnostics: Sequence):
        first = diagnostics[0] if diagnostics else None
        summary = f"{first.code}: {first.message}" if first else "parse failed"
        super().__init__(summary)
        self.diagnostics = list(diagnostics)


# --- Validation / timeline -------------------------------------------------

class UnknownRuleCode(MTSSError, LookupError):
    def __init__(self, code: str):
        super().__init__(f"unknown rule code: {code}")
        self.code = code


class TimelineError(MTSSError):
    pass


class EmptyShotStream(TimelineError):
    def __init__(self):
        super().__init__("script has no shots")


class ValidationErrorsPresent(MTSSError):
    """Rendering refused because the script has error-severity findings."""

    def __init__(self, diagnostics: Sequence):
        super().__init__(f"{len(diagnostics)} validation error(s) present")
        self.diagnostics = list(diagnostics)


# --- Edits -----------------------------------------------------------------

class EditError(MTSSError):
    pass


class UnknownId(EditError):
    def __init__(self, id: str):
        super().__init__(f"unknown id: {id}")
        self.id = id


class WouldDangle(EditError):
    def __init__(self, paths: List[str]):
        super().__init__("edit would leave dangling links: " + ", ".join(paths))
        self.paths = list(paths)


class InvalidPath(EditError):
    def __init__(self, path: str, reason: str = "not an editable field path"):
        super().__init__(f"{path}: {reason}")
        self.path = path


class TypeMismatch(EditError):
    def __init__(self, path: str, expected: str):
        super().__init__(f"{path}: expected {expected}")
        self.path = path
        self.expected = expected


class CutOutsideRange(EditError):
    def __init__(self, shot_id: str, at: float):
        super().__init__(f"cut at {at:.3f} is not strictly inside {shot_id}")
        self.shot_id = shot_id
        self.at = at


class BlankSplitHalf(EditError):
    """A cut leaves one half with no description text and no markers."""

    def __init__(self, shot_id: str, at: float):
        super().__init__(f"cut at {at:.3f} leaves half of {shot_id} without a description")
        self.shot_id = shot_id
        self.at = at


class NotAdjacent(EditError):
    def __init__(self, first: str, second: str):
        super().__init__(f"{first} and {second} are not adjacent")
        self.first = first
        self.second = second


class EditRejected(EditError):
    """The edited script no longer satisfies the structural invariants."""

    def __init__(self, cause: StructureError):
        super().__init__(str(cause))
        self.cause = cause


class EditScriptError(EditError):
    def __init__(self, line_number: int, reason: str):
        super().__init__(f"edit script line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


# --- Evaluation ------------------------------------------------------------

class EvalError(MTSSError):
    pass


class DurationMismatch(EvalError):
    def __init__(self, gold: float, candidate: float):
        super().__init__(f"duration mismatch: gold {gold:.3f}s vs candidate {candidate:.3f}s")
        self.gold = gold
        self.candidate = candidate


class FpsMismatch(EvalError):
    def __init__(self, gold: float, candidate: float):
        super().__init__(f"fps mismatch: gold {gold:.3f} vs candidate {candidate:.3f}")


class UnknownKind(EvalError):
    def __init__(self, kind: str):
        super().__init__(f"unknown stream kind: {kind!r} (expected shots, events or entities)")
        self.kind = kind
