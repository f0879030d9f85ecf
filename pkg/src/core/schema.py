"""
Typed in-memory model of an MTSS document.

A Script is four streams (references, shots, events, global context) plus
media metadata. Every type is an immutable value; edits build new values.
Structural invariants are checked by build_script, which never applies
canonical ordering; canonicalize does that separately.
"""

import dataclasses
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, Iterator, List, Optional, Tuple

from .errors import (
    BadIdPattern,
    BadInlineTimestamp,
    BadTimeRange,
    DuplicateId,
    FieldOnWrongCategory,
    InlineTimestampError,
    InvalidValue,
    MissingRequiredField,
    StructureError,
)
from ..utils.helpers import quantize

# Overlap/containment tolerance in seconds
EPSILON = 0.001
DEFAULT_FPS = 25.0

STREAMS = ("references", "shots", "events")

ENTITY_ID_RE = re.compile(r"^(PERSON|OBJECT|ANIMAL|SCENE)_([1-9][0-9]*)$")
SHOT_ID_RE = re.compile(r"^SHOT_([1-9][0-9]*)$")
EVENT_ID_RE = re.compile(r"^EVENT_([1-9][0-9]*)$")
# Bare entity mentions inside descriptions
MENTION_RE = re.compile(r"\b(?:PERSON|OBJECT|ANIMAL|SCENE)_[1-9][0-9]*\b")


class Category(Enum):
    PERSON = "person"
    OBJECT = "object"
    ANIMAL = "animal"
    SCENE = "scene"

    @property
    def prefix(self) -> str:
        return self.name

    @property
    def rank(self) -> int:
        return list(Category).index(self)


class EventType(Enum):
    DIALOGUE = "dialogue"
    SFX = "sfx"
    MUSIC = "music"


PERSON_ONLY_FIELDS = ("clothing", "accessories", "hairstyle")
CAMERA_FIELDS = ("movement", "perspective", "scale")


def id_number(id: str) -> int:
    """Numeric suffix of an ID (0 when the ID has none)."""
    _, _, suffix = id.rpartition("_")
    return int(suffix) if suffix.isdigit() else 0


def id_prefix(id: str) -> str:
    return id.rpartition("_")[0]


def entity_link_key(id: str) -> Tuple[int, int]:
    """Sort key for entity link lists: numeric suffix, then category order."""
    prefix = id_prefix(id)
    rank = next((c.rank for c in Category if c.prefix == prefix), len(Category))
    return (id_number(id), rank)


@dataclass(frozen=True)
class MediaMeta:
    duration: float
    fps: float = DEFAULT_FPS


@dataclass(frozen=True)
class TimeRange:
    start: float
    end: float

    @property
    def length(self) -> float:
        return self.end - self.start

    def contains(self, t: float) -> bool:
        """Half-open containment."""
        return self.start <= t < self.end

    def to_list(self) -> List[float]:
        return [self.start, self.end]


@dataclass(frozen=True)
class AppearanceAnchor:
    detail_description: str
    clothing: Optional[str] = None
    accessories: Optional[str] = None
    hairstyle: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"detail_description": self.detail_description}
        for name in PERSON_ONLY_FIELDS:
            value = getattr(self, name)
            if value is not None:
                data[name] = value
        return data


@dataclass(frozen=True)
class ReferenceEntity:
    id: str
    category: Category
    semantic_description: str
    timestamp: float
    appearance_anchor: AppearanceAnchor

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "category": self.category.value,
            "semantic_description": self.semantic_description,
            "timestamp": self.timestamp,
            "appearance_anchor": self.appearance_anchor.to_dict(),
        }


@dataclass(frozen=True)
class Camera:
    movement: Optional[str] = None
    perspective: Optional[str] = None
    scale: Optional[str] = None

    def parts(self) -> List[str]:
        return [v for v in (self.movement, self.perspective, self.scale) if v]

    def to_dict(self) -> Dict[str, Any]:
        return {name: getattr(self, name) for name in CAMERA_FIELDS
                if getattr(self, name) is not None}


@dataclass(frozen=True)
class Shot:
    id: str
    time_range: TimeRange
    visual_description: str
    camera: Camera
    references_in_shot: Tuple[str, ...] = ()
    active_events: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "time_range": self.time_range.to_list(),
            "visual_description": self.visual_description,
            "camera": self.camera.to_dict(),
            "references_in_shot": list(self.references_in_shot),
            "active_events": list(self.active_events),
        }


@dataclass(frozen=True)
class AudioEvent:
    id: str
    type: EventType
    time_range: TimeRange
    speaker: Optional[str] = None
    line: Optional[str] = None
    description: str = ""

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "id": self.id,
            "type": self.type.value,
            "time_range": self.time_range.to_list(),
        }
        if self.speaker is not None:
            data["speaker"] = self.speaker
        if self.line is not None:
            data["line"] = self.line
        data["description"] = self.description
        return data


@dataclass(frozen=True)
class GlobalContext:
    scene_description: str
    global_style: str = ""
    global_audio: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scene_description": self.scene_description,
            "global_style": self.global_style,
            "global_audio": self.global_audio,
        }


@dataclass(frozen=True)
class Script:
    """The full four-stream document."""
    meta: MediaMeta
    context: GlobalContext
    references: Tuple[ReferenceEntity, ...] = ()
    shots: Tuple[Shot, ...] = ()
    events: Tuple[AudioEvent, ...] = ()

    def entity(self, id: str) -> Optional[ReferenceEntity]:
        return next((e for e in self.references if e.id == id), None)

    def shot(self, id: str) -> Optional[Shot]:
        return next((s for s in self.shots if s.id == id), None)

    def event(self, id: str) -> Optional[AudioEvent]:
        return next((e for e in self.events if e.id == id), None)

    @property
    def entity_ids(self) -> List[str]:
        return [e.id for e in self.references]

    @property
    def shot_ids(self) -> List[str]:
        return [s.id for s in self.shots]

    @property
    def event_ids(self) -> List[str]:
        return [e.id for e in self.events]

    def to_dict(self) -> Dict[str, Any]:
        """Document structure in schema field order (no reordering)."""
        return {
            "meta": {"duration": self.meta.duration, "fps": self.meta.fps},
            "global": self.context.to_dict(),
            "references": [e.to_dict() for e in self.references],
            "shots": [s.to_dict() for s in self.shots],
            "events": [e.to_dict() for e in self.events],
        }


# --- Structural checks -----------------------------------------------------

def _check_range(tr: TimeRange, owner: str, path: str, locator) -> Iterator[StructureError]:
    values = (tr.start, tr.end)
    if any(v != v or v in (float("inf"), float("-inf")) for v in values):
        yield BadTimeRange(owner, path, locator)
    elif not (0 <= tr.start < tr.end):
        yield BadTimeRange(owner, path, locator)


def _check_entity(entity: ReferenceEntity, index: int) -> Iterator[StructureError]:
    base = f"references/{entity.id}"

    def loc(name):
        return ("references", index, name)

    match = ENTITY_ID_RE.match(entity.id)
    if not match:
        yield BadIdPattern(entity.id, f"{base}/id", "expected CATEGORY_N", loc("id"))
    elif match.group(1) != entity.category.prefix:
        yield BadIdPattern(entity.id, f"{base}/id",
                           f"prefix does not match category {entity.category.value}", loc("id"))
    if not (entity.timestamp >= 0) or entity.timestamp == float("inf"):
        yield InvalidValue(f"{base}/timestamp", "must be a non-negative time", loc("timestamp"))
    anchor = entity.appearance_anchor
    if not anchor.detail_description.strip():
        yield MissingRequiredField(f"{base}/appearance_anchor/detail_description",
                                   loc("appearance_anchor.detail_description"))
    if entity.category is not Category.PERSON:
        for name in PERSON_ONLY_FIELDS:
            if getattr(anchor, name) is not None:
                yield FieldOnWrongCategory(entity.id, f"appearance_anchor.{name}",
                                           f"{base}/appearance_anchor/{name}",
                                           loc(f"appearance_anchor.{name}"))


def _check_links(values: Tuple[str, ...], pattern, owner_path: str,
                 locator) -> Iterator[StructureError]:
    seen = set()
    for value in values:
        if not pattern.match(value):
            yield BadIdPattern(value, owner_path, "not a valid link id", locator)
        elif value in seen:
            yield DuplicateId(owner_path, value, locator)
        seen.add(value)


def _check_shot(shot: Shot, index: int) -> Iterator[StructureError]:
    base = f"shots/{shot.id}"

    def loc(name):
        return ("shots", index, name)

    if not SHOT_ID_RE.match(shot.id):
        yield BadIdPattern(shot.id, f"{base}/id", "expected SHOT_N", loc("id"))
    yield from _check_range(shot.time_range, shot.id, f"{base}/time_range", loc("time_range"))
    if not shot.visual_description.strip():
        yield MissingRequiredField(f"{base}/visual_description", loc("visual_description"))
    else:
        # Imported here: the timestamp grammar lives with the parser
        from .parser import extract_inline_timestamps
        try:
            extract_inline_timestamps(shot.visual_description)
        except InlineTimestampError as e:
            yield BadInlineTimestamp(f"{base}/visual_description", str(e), loc("visual_description"))
    if not shot.camera.parts():
        yield MissingRequiredField(f"{base}/camera", loc("camera"))
    yield from _check_links(shot.references_in_shot, ENTITY_ID_RE,
                            f"{base}/references_in_shot", loc("references_in_shot"))
    yield from _check_links(shot.active_events, EVENT_ID_RE,
                            f"{base}/active_events", loc("active_events"))


def _check_event(event: AudioEvent, index: int) -> Iterator[StructureError]:
    base = f"events/{event.id}"

    def loc(name):
        return ("events", index, name)

    if not EVENT_ID_RE.match(event.id):
        yield BadIdPattern(event.id, f"{base}/id", "expected EVENT_N", loc("id"))
    yield from _check_range(event.time_range, event.id, f"{base}/time_range", loc("time_range"))
    if event.speaker is not None and not ENTITY_ID_RE.match(event.speaker):
        yield BadIdPattern(event.speaker, f"{base}/speaker", "not a valid entity id", loc("speaker"))
    if event.type is EventType.DIALOGUE:
        if event.speaker is None:
            yield MissingRequiredField(f"{base}/speaker", loc("speaker"))
        if event.line is None:
            yield MissingRequiredField(f"{base}/line", loc("line"))
    elif event.type is EventType.MUSIC:
        if event.speaker is not None:
            yield FieldOnWrongCategory(event.id, "speaker", f"{base}/speaker", loc("speaker"))
        if event.line is not None:
            yield FieldOnWrongCategory(event.id, "line", f"{base}/line", loc("line"))
    elif event.line is not None:
        yield FieldOnWrongCategory(event.id, "line", f"{base}/line", loc("line"))


def iter_structure_errors(
    meta: MediaMeta,
    context: GlobalContext,
    references: Iterable[ReferenceEntity],
    shots: Iterable[Shot],
    events: Iterable[AudioEvent],
) -> Iterator[StructureError]:
    """Yield every structural violation, in document order."""
    if not (meta.duration >= 0) or meta.duration == float("inf"):
        yield InvalidValue("meta/duration", "must be a finite non-negative number",
                           ("meta", None, "duration"))
    if not (meta.fps > 0) or meta.fps == float("inf"):
        yield InvalidValue("meta/fps", "must be a finite positive number", ("meta", None, "fps"))
    if not context.scene_description.strip():
        yield MissingRequiredField("global/scene_description", ("global", None, "scene_description"))

    checkers = (
        ("references", references, _check_entity),
        ("shots", shots, _check_shot),
        ("events", events, _check_event),
    )
    for stream, items, check in checkers:
        seen = set()
        for index, item in enumerate(items):
            yield from check(item, index)
            if item.id in seen:
                yield DuplicateId(stream, item.id, (stream, index, "id"))
            seen.add(item.id)


def _quantized_range(tr: TimeRange) -> TimeRange:
    return TimeRange(quantize(tr.start), quantize(tr.end))


def _quantized(script: Script) -> Script:
    return Script(
        meta=MediaMeta(quantize(script.meta.duration), quantize(script.meta.fps)),
        context=script.context,
        references=tuple(dataclasses.replace(e, timestamp=quantize(e.timestamp))
                         for e in script.references),
        shots=tuple(dataclasses.replace(s, time_range=_quantized_range(s.time_range),
                                        references_in_shot=tuple(s.references_in_shot),
                                        active_events=tuple(s.active_events))
                    for s in script.shots),
        events=tuple(dataclasses.replace(e, time_range=_quantized_range(e.time_range))
                     for e in script.events),
    )


def build_script(
    meta: MediaMeta,
    context: GlobalContext,
    references: Iterable[ReferenceEntity] = (),
    shots: Iterable[Shot] = (),
    events: Iterable[AudioEvent] = (),
) -> Script:
    """
    Assemble a Script and enforce every type-level invariant.

    Times are quantized to millisecond resolution. Stream order is kept as
    given; call canonicalize for the canonical ordering.

    Raises:
        StructureError: the first violation found (DuplicateId, BadIdPattern,
            BadTimeRange, FieldOnWrongCategory, MissingRequiredField, ...)
    """
    script = _quantized(Script(meta, context, tuple(references), tuple(shots), tuple(events)))
    for error in iter_structure_errors(script.meta, script.context, script.references,
                                       script.shots, script.events):
        raise error
    return script


def rebuild(script: Script, **changes) -> Script:
    """build_script over a copy of script with some fields replaced."""
    fields = {
        "meta": script.meta,
        "context": script.context,
        "references": script.references,
        "shots": script.shots,
        "events": script.events,
    }
    fields.update(changes)
    return build_script(**fields)


# --- Canonical ordering ----------------------------------------------------

def reference_sort_key(entity: ReferenceEntity) -> Tuple[int, int]:
    return (entity.category.rank, id_number(entity.id))


def timed_sort_key(item) -> Tuple[float, int]:
    return (item.time_range.start, id_number(item.id))


def canonicalize(script: Script) -> Script:
    """Sort every stream and every link list; idempotent."""
    shots = tuple(
        dataclasses.replace(
            shot,
            references_in_shot=tuple(sorted(shot.references_in_shot, key=entity_link_key)),
            active_events=tuple(sorted(shot.active_events, key=id_number)),
        )
        for shot in sorted(script.shots, key=timed_sort_key)
    )
    return Script(
        meta=script.meta,
        context=script.context,
        references=tuple(sorted(script.references, key=reference_sort_key)),
        shots=shots,
        events=tuple(sorted(script.events, key=timed_sort_key)),
    )


def next_free_id(prefix: str, taken: Iterable[str]) -> str:
    """Next unused `PREFIX_N` after the highest suffix in use."""
    highest = max((id_number(t) for t in taken if id_prefix(t) == prefix), default=0)
    return f"{prefix}_{highest + 1}"
