"""
Local edit engine with change-footprint tracking.

Every edit consumes an immutable Script and returns a new canonical Script
together with a Footprint: the field paths whose canonical serialization
changed, the lint rules that read those fields, and the findings the edit
introduced.
"""

import dataclasses
import json
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Set, Tuple, Union

from .errors import (
    BlankSplitHalf,
    CutOutsideRange,
    EditRejected,
    EditScriptError,
    InlineTimestampError,
    InvalidPath,
    NotAdjacent,
    StructureError,
    TypeMismatch,
    UnknownId,
    WouldDangle,
)
from .parser import (
    ANCHOR_FIELDS,
    CAMERA_FIELDS,
    GLOBAL_FIELDS,
    META_FIELDS,
    RecordDecoder,
    extract_inline_timestamps,
    insert_inline_timestamps,
    parse_value,
    serialize,
)
from .schema import (
    EPSILON,
    AudioEvent,
    EventType,
    ReferenceEntity,
    Script,
    TimeRange,
    canonicalize,
    next_free_id,
    rebuild,
    timed_sort_key,
)
from .timeline import build_index
from .validator import DiagnosticSet, rules_reading, validate
from ..utils.helpers import natural_sort_key, quantize
from ..utils.logger import get_logger

logger = get_logger("edits")


# --- Edit variants ---------------------------------------------------------

@dataclass(frozen=True)
class SetField:
    path: str
    value: Any


@dataclass(frozen=True)
class AddEntity:
    entity: ReferenceEntity


@dataclass(frozen=True)
class RemoveEntity:
    id: str
    cascade: bool = False


@dataclass(frozen=True)
class AddEvent:
    event: AudioEvent
    relink: bool = True


@dataclass(frozen=True)
class RemoveEvent:
    id: str
    cascade: bool = False


@dataclass(frozen=True)
class RebindSpeaker:
    event_id: str
    entity_id: str


@dataclass(frozen=True)
class RetimeShot:
    shot_id: str
    time_range: TimeRange
    relink: bool = True


@dataclass(frozen=True)
class SplitShot:
    shot_id: str
    at: float


@dataclass(frozen=True)
class MergeShots:
    first: str
    second: str


Edit = Union[SetField, AddEntity, RemoveEntity, AddEvent, RemoveEvent,
             RebindSpeaker, RetimeShot, SplitShot, MergeShots]


@dataclass(frozen=True)
class Footprint:
    changed_paths: FrozenSet[str]
    revalidated: FrozenSet[str]
    new_diagnostics: DiagnosticSet

    def to_dict(self) -> Dict[str, Any]:
        return {
            "changed_paths": sorted(self.changed_paths, key=natural_sort_key),
            "revalidated": sorted(self.revalidated),
            "new_diagnostics": [
                {"code": d.code, "severity": d.severity.value,
                 "subject": d.subject, "message": d.message}
                for d in self.new_diagnostics
            ],
        }


# --- Serialization diff ----------------------------------------------------

def _diff_records(prefix: str, before: Dict[str, Any], after: Dict[str, Any],
                  out: Set[str]) -> None:
    for key in sorted(set(before) | set(after)):
        old, new = before.get(key), after.get(key)
        if isinstance(old, dict) and isinstance(new, dict):
            _diff_records(f"{prefix}/{key}", old, new, out)
        elif old != new:
            out.add(f"{prefix}/{key}")


def diff_paths(before_text: str, after_text: str) -> Set[str]:
    """
    Field paths that differ between two serialized documents.

    Stream elements are matched by ID. An element present on one side only
    contributes its element path (`shots/SHOT_4`); elements on both sides
    contribute one path per differing leaf.
    """
    before, after = json.loads(before_text), json.loads(after_text)
    changed: Set[str] = set()
    for section in ("meta", "global"):
        _diff_records(section, before.get(section, {}), after.get(section, {}), changed)
    for stream in ("references", "shots", "events"):
        old = {item["id"]: item for item in before.get(stream, [])}
        new = {item["id"]: item for item in after.get(stream, [])}
        for id_ in set(old) ^ set(new):
            changed.add(f"{stream}/{id_}")
        for id_ in set(old) & set(new):
            _diff_records(f"{stream}/{id_}", old[id_], new[id_], changed)
    return changed


LINK_RULES = ("E001", "E002", "E003")


def _check_no_new_dangling(before: Script, after: Script) -> None:
    """Reject an edit that links to an entity or event id that does not exist."""
    # a link already dangling before the edit may move with its element
    known = {(d.code, d.related[0]) for d in validate(before, LINK_RULES)}
    added = {d.subject for d in validate(after, LINK_RULES)
             if (d.code, d.related[0]) not in known}
    if added:
        raise WouldDangle(sorted(added, key=natural_sort_key))


def compute_footprint(before: Script, after: Script) -> Footprint:
    changed = diff_paths(serialize(before), serialize(after))
    rules = rules_reading(changed)
    new = validate(after, rules).difference(validate(before, rules))
    return Footprint(frozenset(changed), frozenset(rules), new)


# --- Value checks ----------------------------------------------------------

def _text(path: str, value: Any, optional: bool = False) -> Optional[str]:
    if value is None and optional:
        return None
    if not isinstance(value, str):
        raise TypeMismatch(path, "a string")
    return value


def _number(path: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise TypeMismatch(path, "a finite number")
    return float(value)


def _time_range(path: str, value: Any) -> TimeRange:
    if isinstance(value, TimeRange):
        return value
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise TypeMismatch(path, "a [start, end] pair")
    return TimeRange(_number(path, value[0]), _number(path, value[1]))


def _id_list(path: str, value: Any) -> Tuple[str, ...]:
    if not isinstance(value, (list, tuple)) or not all(isinstance(v, str) for v in value):
        raise TypeMismatch(path, "a list of ids")
    return tuple(value)


def _event_type(path: str, value: Any) -> EventType:
    if isinstance(value, EventType):
        return value
    try:
        return EventType(value)
    except ValueError:
        raise TypeMismatch(path, "one of dialogue, sfx, music")


# --- Helpers ---------------------------------------------------------------

def _replace_item(items: Iterable, id_: str, new) -> tuple:
    return tuple(new if item.id == id_ else item for item in items)


def _require(found, id_: str):
    if found is None:
        raise UnknownId(id_)
    return found


def _finish(script: Script, **changes) -> Script:
    try:
        return canonicalize(rebuild(script, **changes))
    except StructureError as e:
        raise EditRejected(e)


def _relinked(script: Script, shot_ids: Iterable[str]) -> Script:
    """Recompute active_events of the given shots from the time data."""
    index = build_index(script)
    targets = set(shot_ids)
    shots = tuple(
        dataclasses.replace(shot, active_events=tuple(
            e.id for e in index.events_overlapping(shot.time_range)))
        if shot.id in targets else shot
        for shot in script.shots
    )
    return dataclasses.replace(script, shots=shots)


# --- Handlers --------------------------------------------------------------

def _set_field(script: Script, edit: SetField) -> Script:
    path = edit.path.strip("/")
    parts = path.split("/")
    value = edit.value

    if parts[0] == "meta" and len(parts) == 2 and parts[1] in META_FIELDS:
        meta = dataclasses.replace(script.meta, **{parts[1]: _number(path, value)})
        return _finish(script, meta=meta)
    if parts[0] == "global" and len(parts) == 2 and parts[1] in GLOBAL_FIELDS:
        text = _text(path, value, optional=parts[1] != "scene_description")
        context = dataclasses.replace(script.context, **{parts[1]: text or ""})
        return _finish(script, context=context)
    if parts[0] not in ("references", "shots", "events") or len(parts) < 3:
        raise InvalidPath(path)

    stream, id_, field_name = parts[0], parts[1], parts[2]
    if field_name in ("id", "category"):
        raise InvalidPath(path, "ids and categories cannot be changed")
    nested = parts[3:]

    if stream == "references":
        entity = _require(script.entity(id_), id_)
        if field_name == "appearance_anchor" and len(nested) == 1 and nested[0] in ANCHOR_FIELDS:
            anchor = dataclasses.replace(entity.appearance_anchor, **{
                nested[0]: _text(path, value, optional=nested[0] != "detail_description")})
            new = dataclasses.replace(entity, appearance_anchor=anchor)
        elif nested:
            raise InvalidPath(path)
        elif field_name == "semantic_description":
            new = dataclasses.replace(entity, semantic_description=_text(path, value))
        elif field_name == "timestamp":
            new = dataclasses.replace(entity, timestamp=_number(path, value))
        else:
            raise InvalidPath(path)
        return _finish(script, references=_replace_item(script.references, id_, new))

    if stream == "shots":
        shot = _require(script.shot(id_), id_)
        if field_name == "camera" and len(nested) == 1 and nested[0] in CAMERA_FIELDS:
            camera = dataclasses.replace(shot.camera, **{nested[0]: _text(path, value, optional=True)})
            new = dataclasses.replace(shot, camera=camera)
        elif nested:
            raise InvalidPath(path)
        elif field_name == "time_range":
            new = dataclasses.replace(shot, time_range=_time_range(path, value))
        elif field_name == "visual_description":
            new = dataclasses.replace(shot, visual_description=_text(path, value))
        elif field_name in ("references_in_shot", "active_events"):
            new = dataclasses.replace(shot, **{field_name: _id_list(path, value)})
        else:
            raise InvalidPath(path)
        return _finish(script, shots=_replace_item(script.shots, id_, new))

    event = _require(script.event(id_), id_)
    if nested:
        raise InvalidPath(path)
    if field_name == "type":
        new = dataclasses.replace(event, type=_event_type(path, value))
    elif field_name == "time_range":
        new = dataclasses.replace(event, time_range=_time_range(path, value))
    elif field_name in ("speaker", "line"):
        new = dataclasses.replace(event, **{field_name: _text(path, value, optional=True)})
    elif field_name == "description":
        new = dataclasses.replace(event, description=_text(path, value, optional=True) or "")
    else:
        raise InvalidPath(path)
    return _finish(script, events=_replace_item(script.events, id_, new))


def _add_entity(script: Script, edit: AddEntity) -> Script:
    return _finish(script, references=script.references + (edit.entity,))


def _remove_entity(script: Script, edit: RemoveEntity) -> Script:
    _require(script.entity(edit.id), edit.id)
    shot_paths = [f"shots/{s.id}/references_in_shot" for s in script.shots
                  if edit.id in s.references_in_shot]
    speakers = [e for e in script.events if e.speaker == edit.id]
    if not edit.cascade:
        dependents = shot_paths + [f"events/{e.id}/speaker" for e in speakers]
        if dependents:
            raise WouldDangle(sorted(dependents, key=natural_sort_key))
    blocking = [f"events/{e.id}/speaker" for e in speakers if e.type is EventType.DIALOGUE]
    if blocking:
        raise WouldDangle(sorted(blocking, key=natural_sort_key))

    shots = tuple(
        dataclasses.replace(s, references_in_shot=tuple(r for r in s.references_in_shot
                                                        if r != edit.id))
        for s in script.shots
    )
    events = tuple(dataclasses.replace(e, speaker=None) if e.speaker == edit.id else e
                   for e in script.events)
    references = tuple(e for e in script.references if e.id != edit.id)
    return _finish(script, references=references, shots=shots, events=events)


def _add_event(script: Script, edit: AddEvent) -> Script:
    event = edit.event
    shots = script.shots
    if edit.relink:
        hits = {s.id for s in build_index(script).shots_overlapping(event.time_range)}
        shots = tuple(
            dataclasses.replace(s, active_events=s.active_events + (event.id,))
            if s.id in hits and event.id not in s.active_events else s
            for s in shots
        )
    return _finish(script, shots=shots, events=script.events + (event,))


def _remove_event(script: Script, edit: RemoveEvent) -> Script:
    _require(script.event(edit.id), edit.id)
    dependents = [f"shots/{s.id}/active_events" for s in script.shots
                  if edit.id in s.active_events]
    if dependents and not edit.cascade:
        raise WouldDangle(sorted(dependents, key=natural_sort_key))
    shots = tuple(
        dataclasses.replace(s, active_events=tuple(e for e in s.active_events if e != edit.id))
        for s in script.shots
    )
    events = tuple(e for e in script.events if e.id != edit.id)
    return _finish(script, shots=shots, events=events)


def _rebind_speaker(script: Script, edit: RebindSpeaker) -> Script:
    event = _require(script.event(edit.event_id), edit.event_id)
    _require(script.entity(edit.entity_id), edit.entity_id)
    if event.type is EventType.MUSIC:
        raise TypeMismatch(f"events/{event.id}/speaker", "a dialogue or sfx event")
    new = dataclasses.replace(event, speaker=edit.entity_id)
    return _finish(script, events=_replace_item(script.events, event.id, new))


def _retime_shot(script: Script, edit: RetimeShot) -> Script:
    shot = _require(script.shot(edit.shot_id), edit.shot_id)
    time_range = _time_range(f"shots/{shot.id}/time_range", edit.time_range)
    time_range = TimeRange(quantize(time_range.start), quantize(time_range.end))
    retimed = dataclasses.replace(
        script, shots=_replace_item(script.shots, shot.id,
                                    dataclasses.replace(shot, time_range=time_range)))
    if edit.relink:
        retimed = _relinked(retimed, [shot.id])
    return _finish(retimed)


def _split_shot(script: Script, edit: SplitShot) -> Script:
    shot = _require(script.shot(edit.shot_id), edit.shot_id)
    at = quantize(_number(f"shots/{shot.id}/time_range", edit.at))
    if not (shot.time_range.start < at < shot.time_range.end):
        raise CutOutsideRange(shot.id, at)

    try:
        stamps, stripped = extract_inline_timestamps(shot.visual_description)
    except InlineTimestampError as e:
        raise EditRejected(StructureError(str(e), f"shots/{shot.id}/visual_description"))
    early = [s for s in stamps if s.time < at]
    late = [s for s in stamps if s.time >= at]
    if not stripped.strip() and not (early and late):
        raise BlankSplitHalf(shot.id, at)
    taken = set(script.shot_ids)
    first_id = next_free_id("SHOT", taken)
    second_id = next_free_id("SHOT", taken | {first_id})

    first = dataclasses.replace(
        shot, id=first_id, time_range=TimeRange(shot.time_range.start, at),
        visual_description=insert_inline_timestamps(stripped, early))
    second = dataclasses.replace(
        shot, id=second_id, time_range=TimeRange(at, shot.time_range.end),
        visual_description=insert_inline_timestamps(stripped, late))

    shots = tuple(s for s in script.shots if s.id != shot.id) + (first, second)
    split = _relinked(dataclasses.replace(script, shots=shots), [first_id, second_id])
    logger.debug("split %s at %.3f into %s and %s", shot.id, at, first_id, second_id)
    return _finish(split)


def _merge_shots(script: Script, edit: MergeShots) -> Script:
    first = _require(script.shot(edit.first), edit.first)
    second = _require(script.shot(edit.second), edit.second)
    ordered = sorted(script.shots, key=timed_sort_key)
    positions = {s.id: i for i, s in enumerate(ordered)}
    if first.id == second.id or abs(positions[first.id] - positions[second.id]) != 1:
        raise NotAdjacent(first.id, second.id)
    earlier, later = sorted((first, second), key=lambda s: positions[s.id])
    if abs(later.time_range.start - earlier.time_range.end) > EPSILON:
        raise NotAdjacent(first.id, second.id)

    merged = dataclasses.replace(
        first,
        time_range=TimeRange(earlier.time_range.start, later.time_range.end),
        visual_description=f"{earlier.visual_description} {later.visual_description}",
        camera=earlier.camera,
        references_in_shot=tuple(dict.fromkeys(earlier.references_in_shot
                                               + later.references_in_shot)),
    )
    shots = tuple(s for s in script.shots if s.id not in (first.id, second.id)) + (merged,)
    return _finish(_relinked(dataclasses.replace(script, shots=shots), [merged.id]))


_HANDLERS: Dict[type, Callable[[Script, Any], Script]] = {
    SetField: _set_field,
    AddEntity: _add_entity,
    RemoveEntity: _remove_entity,
    AddEvent: _add_event,
    RemoveEvent: _remove_event,
    RebindSpeaker: _rebind_speaker,
    RetimeShot: _retime_shot,
    SplitShot: _split_shot,
    MergeShots: _merge_shots,
}


def apply(script: Script, edit: Edit) -> Tuple[Script, Footprint]:
    """
    Apply one edit.

    Returns:
        (canonical edited Script, Footprint)

    Raises:
        UnknownId, WouldDangle, InvalidPath, TypeMismatch, CutOutsideRange, BlankSplitHalf,
        NotAdjacent, EditRejected
    """
    handler = _HANDLERS.get(type(edit))
    if handler is None:
        raise TypeError(f"not an edit: {edit!r}")
    after = handler(script, edit)
    _check_no_new_dangling(script, after)
    footprint = compute_footprint(script, after)
    logger.debug("%s changed %d path(s)", type(edit).__name__, len(footprint.changed_paths))
    return after, footprint


def split_shot(script: Script, shot_id: str, at: float) -> Tuple[Script, Footprint]:
    return apply(script, SplitShot(shot_id, at))


def merge_shots(script: Script, first: str, second: str) -> Tuple[Script, Footprint]:
    return apply(script, MergeShots(first, second))


def apply_all(script: Script, edits: Iterable[Edit]) -> Tuple[Script, List[Footprint]]:
    """Apply edits in order; stops at the first failing edit."""
    footprints = []
    for edit in edits:
        script, footprint = apply(script, edit)
        footprints.append(footprint)
    return script, footprints


# --- Edit scripts ----------------------------------------------------------

# op -> (edit class, {record key: value kind}, required keys)
_OPS: Dict[str, Tuple[type, Dict[str, str], Tuple[str, ...]]] = {
    "set_field": (SetField, {"path": "str", "value": "any"}, ("path", "value")),
    "add_entity": (AddEntity, {"entity": "entity"}, ("entity",)),
    "remove_entity": (RemoveEntity, {"id": "str", "cascade": "bool"}, ("id",)),
    "add_event": (AddEvent, {"event": "event", "relink": "bool"}, ("event",)),
    "remove_event": (RemoveEvent, {"id": "str", "cascade": "bool"}, ("id",)),
    "rebind_speaker": (RebindSpeaker, {"event_id": "str", "entity_id": "str"},
                       ("event_id", "entity_id")),
    "retime_shot": (RetimeShot, {"shot_id": "str", "time_range": "range", "relink": "bool"},
                    ("shot_id", "time_range")),
    "split_shot": (SplitShot, {"shot_id": "str", "at": "number"}, ("shot_id", "at")),
    "merge_shots": (MergeShots, {"first": "str", "second": "str"}, ("first", "second")),
}

_KIND_CHECKS = {
    "str": lambda v: isinstance(v, str),
    "bool": lambda v: isinstance(v, bool),
    "number": lambda v: isinstance(v, float) and math.isfinite(v),
    "range": lambda v: (isinstance(v, list) and len(v) == 2
                        and all(isinstance(x, float) and math.isfinite(x) for x in v)),
    "any": lambda v: True,
}


def _decode_edit(node, line_number: int) -> Edit:
    def fail(reason: str) -> EditScriptError:
        return EditScriptError(line_number, reason)

    if node.kind != "object":
        raise fail("expected an object")
    entries = node.value
    op_entry = entries.get("op")
    if op_entry is None or op_entry.node.kind != "string":
        raise fail("missing string field 'op'")
    op = op_entry.node.value
    if op not in _OPS:
        raise fail(f"unknown op {op!r}; expected one of {', '.join(_OPS)}")
    cls, kinds, required = _OPS[op]

    unknown = sorted(set(entries) - set(kinds) - {"op"})
    if unknown:
        raise fail(f"unknown field {unknown[0]!r} for {op}")
    missing = [key for key in required if key not in entries]
    if missing:
        raise fail(f"missing field {missing[0]!r} for {op}")

    kwargs = {}
    for key, entry in entries.items():
        if key == "op":
            continue
        kind = kinds[key]
        if kind in ("entity", "event"):
            decoder = RecordDecoder()
            record = decoder.reference(entry.node) if kind == "entity" else decoder.event(entry.node)
            if decoder.diagnostics or not isinstance(record, (ReferenceEntity, AudioEvent)):
                reason = decoder.diagnostics[0].message if decoder.diagnostics else "invalid record"
                raise fail(reason)
            kwargs[key] = record
            continue
        value = entry.node.to_python()
        if not _KIND_CHECKS[kind](value):
            raise fail(f"field {key!r} has the wrong type")
        kwargs[key] = TimeRange(*value) if kind == "range" else value
    return cls(**kwargs)


def parse_edit_script(text: str) -> List[Edit]:
    """
    Read an edit script: JSON Lines, one edit object per line with an `op` key.

    Blank lines and lines starting with `#` are skipped.

    Raises:
        EditScriptError: with the 1-based line number of the bad record
    """
    edits = []
    for line_number, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        node, diagnostics = parse_value(stripped)
        if node is None:
            raise EditScriptError(line_number, diagnostics[0].message)
        edits.append(_decode_edit(node, line_number))
    return edits
