"""
Flattening of Scripts into downstream text.

Three targets:
    - the monolithic caption: one paragraph entangling every stream
    - per-shot prompts: one self-contained text per shot
    - branch prompts: separate video and audio conditioning texts

All renderers canonicalize first and refuse Scripts with lint errors.
"""

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from .errors import ValidationErrorsPresent
from .parser import extract_inline_timestamps
from .schema import (
    MENTION_RE,
    AudioEvent,
    EventType,
    ReferenceEntity,
    Script,
    Shot,
    TimeRange,
    canonicalize,
    timed_sort_key,
)
from .timeline import build_index
from .validator import validate
from ..utils.helpers import ensure_sentence, format_time

NAME_MAX_WORDS = 6
_CLAUSE_RE = re.compile(r"[,;:.]| - ")
_SENTENCE_END_RE = re.compile(r"[.!?]+(?=\s|$)")


def display_name(entity: ReferenceEntity) -> str:
    """Head phrase of the semantic description: first clause, at most six words."""
    clause = _CLAUSE_RE.split(entity.semantic_description, maxsplit=1)[0]
    words = clause.split()[:NAME_MAX_WORDS]
    return " ".join(words) if words else entity.id


def _appearance(entity: ReferenceEntity) -> str:
    anchor = entity.appearance_anchor
    parts = [anchor.detail_description, anchor.clothing, anchor.accessories, anchor.hairstyle]
    return "; ".join(p.strip() for p in parts if p and p.strip())


class MentionNamer:
    """Replaces bare entity IDs with display names, expanding appearance on request."""

    def __init__(self, script: Script, expand_first_mention: bool = True,
                 every_mention: bool = False):
        self.entities: Dict[str, ReferenceEntity] = {e.id: e for e in script.references}
        self.names = {id_: display_name(e) for id_, e in self.entities.items()}
        self.expand_first_mention = expand_first_mention
        self.every_mention = every_mention
        self.seen: Set[str] = set()

    def name(self, entity_id: str) -> str:
        entity = self.entities.get(entity_id)
        if entity is None:
            return entity_id
        expand = self.every_mention or (self.expand_first_mention and entity_id not in self.seen)
        self.seen.add(entity_id)
        if expand:
            return f"{self.names[entity_id]} ({_appearance(entity)})"
        return self.names[entity_id]

    def text(self, text: str) -> str:
        return MENTION_RE.sub(lambda m: self.name(m.group(0)), text)


def _sentences(text: str) -> List[Tuple[str, int]]:
    """Split text into (sentence, end offset) pairs."""
    out = []
    start = 0
    for match in _SENTENCE_END_RE.finditer(text):
        piece = text[start:match.end()].strip()
        if piece:
            out.append((piece, match.end()))
        start = match.end()
    tail = text[start:].strip()
    if tail:
        out.append((tail, len(text)))
    return out


def _event_text(event: AudioEvent, namer: MentionNamer) -> str:
    if event.type is EventType.DIALOGUE:
        return f'{namer.name(event.speaker)} says: "{event.line}"'
    description = namer.text(event.description).strip()
    if event.type is EventType.MUSIC:
        return "Music: " + ensure_sentence(description or "untitled score")
    return ensure_sentence(description or "A sound effect")


def _check(script: Script) -> Script:
    errors = validate(script).errors
    if errors:
        raise ValidationErrorsPresent(errors)
    return canonicalize(script)


def _owner_shot(event: AudioEvent, shots: List[Shot]) -> Optional[Shot]:
    """Shot containing the event start, else the last shot starting before it, else the first."""
    if not shots:
        return None
    start = event.time_range.start
    for shot in shots:
        if shot.time_range.contains(start):
            return shot
    earlier = [s for s in shots if s.time_range.start <= start]
    return earlier[-1] if earlier else shots[0]


def _shot_passage(shot: Shot, events: List[AudioEvent], namer: MentionNamer) -> List[str]:
    stamps, stripped = extract_inline_timestamps(shot.visual_description)
    sentences = _sentences(stripped)
    if not stamps:
        return ([namer.text(s) for s, _ in sentences]
                + [_event_text(e, namer) for e in events])

    anchors = []
    for _, end in sentences:
        before = [s.time for s in stamps if s.text_offset <= end]
        anchors.append(before[-1] if before else float("-inf"))
    slots: Dict[int, List[AudioEvent]] = {}
    for event in events:
        slot = -1
        for i, anchor in enumerate(anchors):
            if anchor <= event.time_range.start:
                slot = i
        slots.setdefault(slot, []).append(event)

    parts = [_event_text(e, namer) for e in slots.get(-1, [])]
    for i, (sentence, _) in enumerate(sentences):
        parts.append(namer.text(sentence))
        parts.extend(_event_text(e, namer) for e in slots.get(i, []))
    return parts


def _global_tail(script: Script, namer: MentionNamer) -> List[str]:
    parts = []
    if script.context.global_style.strip():
        parts.append("Style: " + ensure_sentence(namer.text(script.context.global_style.strip())))
    if script.context.global_audio.strip():
        parts.append("Ambient audio: "
                     + ensure_sentence(namer.text(script.context.global_audio.strip())))
    return parts


def render_monolithic(script: Script, expand_first_mention: bool = True,
                      every_mention: bool = False) -> str:
    """
    One paragraph: scene description, shots in time order with their events
    interleaved, then style and ambient audio.

    With expand_first_mention an entity's appearance follows its first
    occurrence only; every_mention expands each occurrence.

    Raises:
        ValidationErrorsPresent: the script has error-severity findings
    """
    script = _check(script)
    namer = MentionNamer(script, expand_first_mention, every_mention)
    parts = [ensure_sentence(namer.text(script.context.scene_description.strip()))]

    shots = list(script.shots)
    by_shot: Dict[str, List[AudioEvent]] = {}
    for event in script.events:
        owner = _owner_shot(event, shots)
        by_shot.setdefault(owner.id if owner else "", []).append(event)

    for shot in shots:
        parts.extend(_shot_passage(shot, by_shot.get(shot.id, []), namer))
    parts.extend(_event_text(e, namer) for e in by_shot.get("", []))
    parts.extend(_global_tail(script, namer))
    return " ".join(p for p in parts if p) + "\n"


@dataclass(frozen=True)
class ShotPrompt:
    shot_id: str
    time_range: TimeRange
    prompt_text: str
    warnings: Tuple[str, ...] = ()

    def to_dict(self) -> Dict:
        return {
            "shot_id": self.shot_id,
            "time_range": self.time_range.to_list(),
            "prompt_text": self.prompt_text,
            "warnings": list(self.warnings),
        }


def _prompt_event_line(event: AudioEvent, namer: MentionNamer) -> str:
    if event.type is EventType.DIALOGUE:
        line = f'{namer.name(event.speaker)} says: "{event.line}"'
        description = namer.text(event.description).strip()
        return f"{line} ({description})" if description else line
    description = namer.text(event.description).strip()
    label = "Music" if event.type is EventType.MUSIC else "Sound"
    return f"{label}: {description}" if description else label


def render_shot_prompts(script: Script) -> List[ShotPrompt]:
    """
    One self-contained prompt per shot, in canonical order.

    Entity expansion restarts for every prompt. Event lines come from the
    stored active_events; events that overlap the shot without being listed
    produce a warning on the prompt.

    Raises:
        ValidationErrorsPresent: the script has error-severity findings
    """
    script = _check(script)
    index = build_index(script)
    events = {e.id: e for e in script.events}
    prompts = []
    for shot in script.shots:
        namer = MentionNamer(script)
        _, stripped = extract_inline_timestamps(shot.visual_description)
        lines = [namer.text(stripped.strip())]
        lines.append("Camera: " + ", ".join(shot.camera.parts()))
        if shot.references_in_shot:
            subjects = [f"{namer.names[r]} ({_appearance(namer.entities[r])})"
                        for r in shot.references_in_shot]
            namer.seen.update(shot.references_in_shot)
            lines.append("Subjects: " + ", ".join(subjects))
        listed = sorted((events[e] for e in shot.active_events), key=timed_sort_key)
        lines.extend(_prompt_event_line(e, namer) for e in listed)

        stored = set(shot.active_events)
        warnings = tuple(f"{e.id} overlaps {shot.id} but is not in its active_events"
                         for e in index.events_overlapping(shot.time_range)
                         if e.id not in stored)
        prompts.append(ShotPrompt(shot.id, shot.time_range, "\n".join(lines), warnings))
    return prompts


@dataclass(frozen=True)
class BranchPrompts:
    """Conditioning texts for a dual-branch audio-visual generator."""
    video: str
    audio: str

    def to_dict(self) -> Dict:
        return {"video": self.video, "audio": self.audio}


def _span(time_range: TimeRange) -> str:
    return f"{format_time(time_range.start)}-{format_time(time_range.end)}s"


def render_branch_prompts(script: Script) -> BranchPrompts:
    """Video branch: style and shots. Audio branch: ambient audio and events."""
    script = _check(script)
    namer = MentionNamer(script)
    video = []
    if script.context.global_style.strip():
        video.append("Style: " + ensure_sentence(script.context.global_style.strip()))
    for shot in script.shots:
        _, stripped = extract_inline_timestamps(shot.visual_description)
        camera = ", ".join(shot.camera.parts())
        video.append(f"{_span(shot.time_range)}: {namer.text(stripped.strip())} Camera: {camera}.")

    namer = MentionNamer(script)
    audio = []
    if script.context.global_audio.strip():
        audio.append("Ambient audio: " + ensure_sentence(script.context.global_audio.strip()))
    for event in script.events:
        audio.append(f"{_span(event.time_range)}: {_event_text(event, namer)}")
    return BranchPrompts("\n".join(video) + "\n", "\n".join(audio) + "\n")
