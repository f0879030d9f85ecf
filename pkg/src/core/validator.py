"""
Relational lint engine.

Checks the identity links (reference IDs) and temporal links (shared time
ranges, inline timestamps) that tie the streams of a Script together.
Findings are returned as data; validate never raises, even on Scripts that
were assembled without build_script.
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from .errors import InlineTimestampError, UnknownRuleCode
from .schema import EPSILON, MENTION_RE, EventType, Script, timed_sort_key
from .timeline import build_index, overlap
from ..utils.helpers import format_time, natural_sort_key
from ..utils.logger import get_logger

logger = get_logger("validator")


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: Severity
    subject: str
    message: str
    related: Tuple[str, ...] = ()

    def sort_key(self):
        return (natural_sort_key(self.subject), self.code, self.related, self.message)


@dataclass(frozen=True)
class DiagnosticSet:
    """Lint findings in deterministic order (subject path, then code)."""
    items: Tuple[Diagnostic, ...] = ()

    @classmethod
    def of(cls, diagnostics: Iterable[Diagnostic]) -> "DiagnosticSet":
        return cls(tuple(sorted(set(diagnostics), key=Diagnostic.sort_key)))

    def __iter__(self) -> Iterator[Diagnostic]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    @property
    def errors(self) -> List[Diagnostic]:
        return [d for d in self.items if d.severity is Severity.ERROR]

    @property
    def warnings(self) -> List[Diagnostic]:
        return [d for d in self.items if d.severity is Severity.WARNING]

    @property
    def counts(self) -> Dict[str, int]:
        return {"error": len(self.errors), "warning": len(self.warnings)}

    @property
    def has_errors(self) -> bool:
        return any(d.severity is Severity.ERROR for d in self.items)

    def codes(self) -> Set[str]:
        return {d.code for d in self.items}

    def with_code(self, code: str) -> List[Diagnostic]:
        return [d for d in self.items if d.code == code]

    def promoted(self) -> "DiagnosticSet":
        """Strict mode: every warning raised to error."""
        return DiagnosticSet.of(replace(d, severity=Severity.ERROR) for d in self.items)

    def without(self, codes: Iterable[str]) -> "DiagnosticSet":
        dropped = set(codes)
        return DiagnosticSet(tuple(d for d in self.items if d.code not in dropped))

    def difference(self, other: "DiagnosticSet") -> "DiagnosticSet":
        """Findings in self that are not in other."""
        known = set(other.items)
        return DiagnosticSet(tuple(d for d in self.items if d not in known))


@dataclass(frozen=True)
class RuleInfo:
    code: str
    severity: Severity
    title: str
    rationale: str
    reads: Tuple[str, ...]   # stream.field keys the rule depends on


RULES: Dict[str, RuleInfo] = {r.code: r for r in (
    RuleInfo("E001", Severity.ERROR, "dangling entity link in references_in_shot",
             "Shots cite persistent reference IDs instead of repeating descriptions, "
             "so every cited ID must exist in the reference stream.",
             ("shots.references_in_shot", "references.id")),
    RuleInfo("E002", Severity.ERROR, "event speaker is not a known entity",
             "A speaker is a relational binding to a reference entity; an unknown "
             "ID leaves the voice without an identity.",
             ("events.speaker", "references.id")),
    RuleInfo("E003", Severity.ERROR, "dangling event link in active_events",
             "active_events links a shot to concurrent audio; every listed ID must "
             "exist in the event stream.",
             ("shots.active_events", "events.id")),
    RuleInfo("E004", Severity.ERROR, "shots overlap",
             "Shots form a sequence of cinematic segments on one time axis; two "
             "shots may touch but never share time.",
             ("shots.time_range",)),
    RuleInfo("E005", Severity.ERROR, "inline timestamp outside its shot",
             "Inline timestamps anchor micro-actions to the global timeline and "
             "must fall inside the shot that describes them.",
             ("shots.visual_description", "shots.time_range")),
    RuleInfo("E006", Severity.ERROR, "listed event does not overlap the shot",
             "An event listed as active must actually sound during the shot.",
             ("shots.active_events", "shots.time_range", "events.time_range")),
    RuleInfo("E007", Severity.ERROR, "time beyond media duration",
             "No time range or entity timestamp may extend past the end of the "
             "media when its duration is known.",
             ("meta.duration", "shots.time_range", "events.time_range",
              "references.timestamp")),
    RuleInfo("E008", Severity.ERROR, "event fields do not match its type",
             "Dialogue carries a speaker and a verbatim line; music has neither; "
             "sound effects have no line.",
             ("events.type", "events.speaker", "events.line")),
    RuleInfo("W101", Severity.WARNING, "entity never referenced",
             "Entities in the reference bank should matter to the scene; an entity "
             "no shot or event mentions is usually a leftover.",
             ("references.id", "shots.references_in_shot", "events.speaker",
              "shots.visual_description", "events.description")),
    RuleInfo("W102", Severity.WARNING, "overlapping event not listed on the shot",
             "Every event concurrent with a shot should be linked from it so "
             "per-shot consumers see the audio they must align with.",
             ("shots.active_events", "shots.time_range", "events.time_range")),
    RuleInfo("W103", Severity.WARNING, "speaker not visible in the shot",
             "Audio should be grounded in a visible subject; a warning because "
             "off-screen speech is legitimate.",
             ("events.speaker", "events.type", "events.time_range",
              "shots.time_range", "shots.references_in_shot")),
    RuleInfo("W104", Severity.WARNING, "gap between consecutive shots",
             "Uncovered time between shots is often an annotation slip; shots are "
             "not required to tile the media.",
             ("shots.time_range",)),
    RuleInfo("W105", Severity.WARNING, "sound effect without a source",
             "Sound effects should have a visible source or thematic relevance; "
             "binding the source entity makes that checkable.",
             ("events.type", "events.speaker")),
)}


def explain_rule(code: str) -> RuleInfo:
    """Catalog entry for a rule code."""
    info = RULES.get(code.strip().upper())
    if info is None:
        raise UnknownRuleCode(code)
    return info


def path_key(path: str) -> str:
    """`shots/SHOT_3/time_range` -> `shots.time_range`; element paths keep the stream only."""
    parts = path.split("/")
    if parts[0] in ("meta", "global"):
        return ".".join(parts[:2])
    if len(parts) < 3:
        return parts[0]
    return f"{parts[0]}.{parts[2]}"


def rules_reading(paths: Iterable[str]) -> Set[str]:
    """Rule codes whose inputs include any of the given field paths."""
    keys = {path_key(p) for p in paths}
    affected = set()
    for info in RULES.values():
        for key in keys:
            if key in info.reads or (("." not in key)
                                     and any(r.startswith(key + ".") for r in info.reads)):
                affected.add(info.code)
                break
    return affected


# --- Rules -----------------------------------------------------------------

class _Context:
    """Lookups shared by the rule checks."""

    def __init__(self, script: Script):
        self.script = script
        self.entity_ids = set(script.entity_ids)
        self.events = {e.id: e for e in script.events}
        self.ordered_shots = sorted(script.shots, key=timed_sort_key)
        self._index = None

    @property
    def index(self):
        if self._index is None:
            self._index = build_index(self.script)
        return self._index

    def diag(self, code: str, subject: str, message: str,
             related: Sequence[str] = ()) -> Diagnostic:
        return Diagnostic(code, RULES[code].severity, subject, message, tuple(related))


def _e001(ctx: _Context) -> Iterator[Diagnostic]:
    for shot in ctx.script.shots:
        for ref in shot.references_in_shot:
            if ref not in ctx.entity_ids:
                yield ctx.diag("E001", f"shots/{shot.id}/references_in_shot",
                               f"{ref} is not in the reference stream", (ref,))


def _e002(ctx: _Context) -> Iterator[Diagnostic]:
    for event in ctx.script.events:
        if event.speaker is not None and event.speaker not in ctx.entity_ids:
            yield ctx.diag("E002", f"events/{event.id}/speaker",
                           f"speaker {event.speaker} is not in the reference stream",
                           (event.speaker,))


def _e003(ctx: _Context) -> Iterator[Diagnostic]:
    for shot in ctx.script.shots:
        for event_id in shot.active_events:
            if event_id not in ctx.events:
                yield ctx.diag("E003", f"shots/{shot.id}/active_events",
                               f"{event_id} is not in the event stream", (event_id,))


def _e004(ctx: _Context) -> Iterator[Diagnostic]:
    shots = ctx.ordered_shots
    for i, earlier in enumerate(shots):
        for later in shots[i + 1:]:
            length = overlap(earlier.time_range, later.time_range).length
            if length > EPSILON:
                yield ctx.diag("E004", f"shots/{later.id}/time_range",
                               f"overlaps {earlier.id} by {format_time(length)}s",
                               (earlier.id,))


def _e005(ctx: _Context) -> Iterator[Diagnostic]:
    from .parser import extract_inline_timestamps
    for shot in ctx.script.shots:
        try:
            stamps, _ = extract_inline_timestamps(shot.visual_description)
        except InlineTimestampError:
            continue
        tr = shot.time_range
        for n, stamp in enumerate(stamps, 1):
            if not (tr.start - EPSILON <= stamp.time < tr.end + EPSILON):
                yield ctx.diag("E005", f"shots/{shot.id}/visual_description",
                               f"timestamp {n} ({format_time(stamp.time)}) is outside "
                               f"[{format_time(tr.start)}, {format_time(tr.end)})")


def _e006(ctx: _Context) -> Iterator[Diagnostic]:
    for shot in ctx.script.shots:
        for event_id in shot.active_events:
            event = ctx.events.get(event_id)
            if event is None:
                continue
            if overlap(shot.time_range, event.time_range).length <= EPSILON:
                yield ctx.diag("E006", f"shots/{shot.id}/active_events",
                               f"{event_id} does not overlap the shot", (event_id,))


def _e007(ctx: _Context) -> Iterator[Diagnostic]:
    duration = ctx.script.meta.duration
    if not duration > 0:
        return
    limit = duration + EPSILON
    message = f"exceeds media duration {format_time(duration)}"
    for stream, items in (("shots", ctx.script.shots), ("events", ctx.script.events)):
        for item in items:
            if item.time_range.end > limit or item.time_range.start > limit:
                yield ctx.diag("E007", f"{stream}/{item.id}/time_range", message)
    for entity in ctx.script.references:
        if entity.timestamp > limit:
            yield ctx.diag("E007", f"references/{entity.id}/timestamp", message)


def _e008(ctx: _Context) -> Iterator[Diagnostic]:
    for event in ctx.script.events:
        base = f"events/{event.id}"
        if event.type is EventType.DIALOGUE:
            if event.speaker is None:
                yield ctx.diag("E008", f"{base}/speaker", "dialogue event has no speaker")
            if event.line is None:
                yield ctx.diag("E008", f"{base}/line", "dialogue event has no line")
        else:
            if event.type is EventType.MUSIC and event.speaker is not None:
                yield ctx.diag("E008", f"{base}/speaker", "music event carries a speaker")
            if event.line is not None:
                yield ctx.diag("E008", f"{base}/line",
                               f"{event.type.value} event carries a line")


def _w101(ctx: _Context) -> Iterator[Diagnostic]:
    used: Set[str] = set()
    for shot in ctx.script.shots:
        used.update(shot.references_in_shot)
        used.update(MENTION_RE.findall(shot.visual_description))
    for event in ctx.script.events:
        if event.speaker is not None:
            used.add(event.speaker)
        used.update(MENTION_RE.findall(event.description))
    for entity in ctx.script.references:
        if entity.id not in used:
            yield ctx.diag("W101", f"references/{entity.id}",
                           "entity is never referenced by a shot or event")


def _w102(ctx: _Context) -> Iterator[Diagnostic]:
    for shot in ctx.script.shots:
        listed = set(shot.active_events)
        for event in ctx.index.events_overlapping(shot.time_range):
            if event.id not in listed:
                yield ctx.diag("W102", f"shots/{shot.id}/active_events",
                               f"{event.id} overlaps the shot but is not listed", (event.id,))


def _w103(ctx: _Context) -> Iterator[Diagnostic]:
    for event in ctx.script.events:
        if event.type is not EventType.DIALOGUE or event.speaker is None:
            continue
        for shot in ctx.index.shots_overlapping(event.time_range):
            if event.speaker not in shot.references_in_shot:
                yield ctx.diag("W103", f"events/{event.id}/speaker",
                               f"{event.speaker} speaks during {shot.id} but is not in it",
                               (shot.id, event.speaker))


def _w104(ctx: _Context) -> Iterator[Diagnostic]:
    shots = ctx.ordered_shots
    for prev, nxt in zip(shots, shots[1:]):
        gap = nxt.time_range.start - prev.time_range.end
        if gap > EPSILON:
            yield ctx.diag("W104", f"shots/{nxt.id}/time_range",
                           f"{format_time(gap)}s gap after {prev.id}", (prev.id,))


def _w105(ctx: _Context) -> Iterator[Diagnostic]:
    for event in ctx.script.events:
        if event.type is EventType.SFX and event.speaker is None:
            yield ctx.diag("W105", f"events/{event.id}/speaker",
                           "sound effect has no source entity")


_CHECKS: Dict[str, Callable[[_Context], Iterator[Diagnostic]]] = {
    "E001": _e001, "E002": _e002, "E003": _e003, "E004": _e004,
    "E005": _e005, "E006": _e006, "E007": _e007, "E008": _e008,
    "W101": _w101, "W102": _w102, "W103": _w103, "W104": _w104, "W105": _w105,
}


def validate(script: Script, rules: Optional[Iterable[str]] = None) -> DiagnosticSet:
    """
    Run the lint rules over a Script.

    Args:
        script: Script to check (need not have passed build_script)
        rules: Rule codes to run; all catalog rules when omitted

    Returns:
        Every violation found, in deterministic order.
    """
    codes = sorted(RULES) if rules is None else sorted({explain_rule(c).code for c in rules})
    ctx = _Context(script)
    found: List[Diagnostic] = []
    for code in codes:
        found.extend(_CHECKS[code](ctx))
    result = DiagnosticSet.of(found)
    logger.debug("ran %d rules: %d errors, %d warnings", len(codes),
                 result.counts["error"], result.counts["warning"])
    return result
