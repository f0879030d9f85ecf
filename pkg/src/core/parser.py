"""
Document parser and serializer for MTSS scripts.

The concrete syntax is a closed JSON dialect (`.mtss.json`). Parsing keeps
a source span for every key and value so schema violations can be reported
at the exact place they occur. Serialization is deterministic and
byte-stable: fixed field order, canonical stream order, 2-space indent,
times with exactly three decimals.
"""

import json
import math
import re
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from lark import Lark, Token, Tree
from lark.exceptions import LarkError, UnexpectedCharacters, UnexpectedInput, UnexpectedToken

from .errors import (
    BadInlineTimestamp,
    InlineTimestampError,
    Locator,
    ParseFailure,
    StructureError,
)
from .schema import (
    DEFAULT_FPS,
    AppearanceAnchor,
    AudioEvent,
    Camera,
    Category,
    EventType,
    GlobalContext,
    MediaMeta,
    ReferenceEntity,
    Script,
    Shot,
    TimeRange,
    build_script,
    canonicalize,
    iter_structure_errors,
)
from ..utils.helpers import detect_encoding, format_duration, quantize
from ..utils.logger import get_logger

logger = get_logger("parser")

# Parse-error catalog
PARSE_CODES = {
    "P001": "malformed syntax",
    "P002": "unknown field",
    "P003": "wrong value type",
    "P004": "schema-invariant violation",
    "P005": "bad inline timestamp",
}

# The schema is five levels deep; anything far deeper is not a document
MAX_DEPTH = 64

_GRAMMAR = r"""
    start: value

    ?value: object
          | array
          | STRING
          | NUMBER
          | TRUE
          | FALSE
          | NULL

    object: LBRACE [pair ("," pair)*] RBRACE
    array: LBRACKET [value ("," value)*] RBRACKET
    pair: STRING ":" value

    LBRACE: "{"
    RBRACE: "}"
    LBRACKET: "["
    RBRACKET: "]"
    TRUE: "true"
    FALSE: "false"
    NULL: "null"
    STRING: /"(?:[^"\\\x00-\x1f]|\\.)*"/
    NUMBER: /-?(?:0|[1-9][0-9]*)(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?/
    WS: /[ \t\r\n]+/

    %ignore WS
"""

_json_parser = Lark(_GRAMMAR, parser="lalr", maybe_placeholders=False)


# --- Types -----------------------------------------------------------------

@dataclass(frozen=True)
class SourceSpan:
    """Location in the source. Offsets are UTF-8 byte offsets; line/column are 1-based."""
    byte_offset_start: int
    byte_offset_end: int
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class InlineTimestamp:
    text_offset: int   # character index into the stripped description
    time: float
    marker: str        # raw marker text, e.g. "[t=3.2]"


@dataclass(frozen=True)
class ParseDiagnostic:
    code: str
    message: str
    span: SourceSpan


@dataclass
class ParseOutcome:
    """Result of parse_document: a Script or diagnostics, never both."""
    script: Optional[Script] = None
    diagnostics: List[ParseDiagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.script is not None


# --- Inline timestamps -----------------------------------------------------

_MARKER_OPEN = "[t="
_SECONDS_RE = re.compile(r"^[0-9]+(?:\.[0-9]+)?$")
_MINUTES_RE = re.compile(r"^([0-9]+):([0-5]?[0-9](?:\.[0-9]+)?)$")


def _marker_time(body: str) -> Optional[float]:
    if _SECONDS_RE.match(body):
        return float(body)
    match = _MINUTES_RE.match(body)
    if match:
        return int(match.group(1)) * 60 + float(match.group(2))
    return None


def extract_inline_timestamps(description_text: str) -> Tuple[List[InlineTimestamp], str]:
    """
    Extract `[t=<seconds>]` and `[t=<mm>:<ss.fff>]` markers from a description.

    Returns:
        (timestamps in order, text with the markers removed). Offsets index
        into the stripped text. Brackets that do not open with `[t=` are
        left alone.

    Raises:
        InlineTimestampError: a marker opens with `[t=` but is not a time.
    """
    stamps: List[InlineTimestamp] = []
    pieces: List[str] = []
    stripped_length = 0
    pos = 0
    while True:
        start = description_text.find(_MARKER_OPEN, pos)
        if start < 0:
            break
        close = description_text.find("]", start)
        if close < 0:
            raise InlineTimestampError(start, "unterminated timestamp marker")
        body = description_text[start + len(_MARKER_OPEN):close]
        seconds = _marker_time(body)
        if seconds is None:
            raise InlineTimestampError(start, f"cannot read {body!r} as a time")

        piece = description_text[pos:start]
        pieces.append(piece)
        stripped_length += len(piece)
        if stamps and stamps[-1].text_offset == stripped_length:
            raise InlineTimestampError(start, "consecutive markers need text between them")
        stamps.append(InlineTimestamp(stripped_length, quantize(seconds),
                                      description_text[start:close + 1]))
        pos = close + 1
    pieces.append(description_text[pos:])
    return stamps, "".join(pieces)


def insert_inline_timestamps(stripped_text: str, stamps: Sequence[InlineTimestamp]) -> str:
    """Re-insert markers at their offsets; inverse of extract_inline_timestamps."""
    pieces = []
    pos = 0
    for stamp in stamps:
        pieces.append(stripped_text[pos:stamp.text_offset])
        pieces.append(stamp.marker)
        pos = stamp.text_offset
    pieces.append(stripped_text[pos:])
    return "".join(pieces)


# --- Located value tree ----------------------------------------------------

@dataclass
class Entry:
    key: str
    key_span: SourceSpan
    node: "Node"


@dataclass
class Node:
    kind: str       # object, array, string, number, bool, null
    value: Any      # Dict[str, Entry] for objects, List[Node] for arrays
    span: SourceSpan

    def to_python(self) -> Any:
        if self.kind == "object":
            return {k: e.node.to_python() for k, e in self.value.items()}
        if self.kind == "array":
            return [n.to_python() for n in self.value]
        return self.value


class _Syntax(Exception):
    """Internal: syntax problem found while building the located tree."""

    def __init__(self, message: str, span: SourceSpan):
        super().__init__(message)
        self.message = message
        self.span = span


class _SpanMaker:
    """Turns character offsets into SourceSpans."""

    def __init__(self, text: str):
        self.text = text
        self._byte_prefix: Optional[List[int]] = None
        if not text.isascii():
            prefix = [0]
            for ch in text:
                prefix.append(prefix[-1] + len(ch.encode("utf-8", "surrogatepass")))
            self._byte_prefix = prefix

    def byte(self, char_offset: int) -> int:
        if self._byte_prefix is None:
            return char_offset
        return self._byte_prefix[char_offset]

    def span(self, start: int, end: int) -> SourceSpan:
        start = max(0, min(start, len(self.text)))
        end = max(start, min(end, len(self.text)))
        line = self.text.count("\n", 0, start) + 1
        column = start - (self.text.rfind("\n", 0, start) + 1) + 1
        return SourceSpan(self.byte(start), self.byte(end), line, column)

    def token(self, tok: Token) -> SourceSpan:
        return self.span(tok.start_pos, tok.end_pos)


def _decode_string(raw: str, span: SourceSpan) -> str:
    try:
        value = json.loads(raw)
    except ValueError:
        raise _Syntax("invalid string literal", span)
    try:
        value.encode("utf-8")
    except UnicodeEncodeError:
        raise _Syntax("string contains an unpaired surrogate", span)
    return value


def _build_node(item, spans: _SpanMaker, depth: int = 0) -> Node:
    if isinstance(item, Token):
        span = spans.token(item)
        if item.type == "STRING":
            return Node("string", _decode_string(str(item), span), span)
        if item.type == "NUMBER":
            return Node("number", float(item), span)
        if item.type in ("TRUE", "FALSE"):
            return Node("bool", item.type == "TRUE", span)
        return Node("null", None, span)

    opener, closer = item.children[0], item.children[-1]
    span = spans.span(opener.start_pos, closer.end_pos)
    if depth >= MAX_DEPTH:
        raise _Syntax("nesting too deep", span)
    inner = item.children[1:-1]
    if item.data == "array":
        return Node("array", [_build_node(child, spans, depth + 1) for child in inner], span)

    entries: Dict[str, Entry] = {}
    for pair in inner:
        key_token, value = pair.children
        key_span = spans.token(key_token)
        key = _decode_string(str(key_token), key_span)
        if key in entries:
            raise _Syntax(f"duplicate key {key!r}", key_span)
        entries[key] = Entry(key, key_span, _build_node(value, spans, depth + 1))
    return Node("object", entries, span)


def _syntax_diagnostic(error: UnexpectedInput, text: str, spans: _SpanMaker) -> ParseDiagnostic:
    pos = getattr(error, "pos_in_stream", None)
    if pos is None or pos < 0:
        pos = len(text)
    if isinstance(error, UnexpectedCharacters):
        message = f"unexpected character {text[pos:pos + 1]!r}"
    elif isinstance(error, UnexpectedToken):
        token = error.token
        if token.type == "$END":
            message = "unexpected end of document"
            pos = len(text)
        else:
            message = f"unexpected {str(token)!r}"
    else:
        message = "unexpected end of document"
    return ParseDiagnostic("P001", message, spans.span(pos, pos + 1))


def parse_value(text: str) -> Tuple[Optional[Node], List[ParseDiagnostic]]:
    """Parse any document-dialect value into a located tree."""
    spans = _SpanMaker(text)
    try:
        tree = _json_parser.parse(text)
        return _build_node(tree.children[0], spans), []
    except _Syntax as e:
        return None, [ParseDiagnostic("P001", e.message, e.span)]
    except UnexpectedInput as e:
        return None, [_syntax_diagnostic(e, text, spans)]
    except (LarkError, RecursionError):
        return None, [ParseDiagnostic("P001", "malformed document", spans.span(0, len(text)))]


# --- Schema decoding -------------------------------------------------------

META_FIELDS = ("duration", "fps")
GLOBAL_FIELDS = ("scene_description", "global_style", "global_audio")
REFERENCE_FIELDS = ("id", "category", "semantic_description", "timestamp", "appearance_anchor")
ANCHOR_FIELDS = ("detail_description", "clothing", "accessories", "hairstyle")
SHOT_FIELDS = ("id", "time_range", "visual_description", "camera",
               "references_in_shot", "active_events")
CAMERA_FIELDS = ("movement", "perspective", "scale")
EVENT_FIELDS = ("id", "type", "time_range", "speaker", "line", "description")
ROOT_FIELDS = ("meta", "global", "references", "shots", "events")

_INVALID = object()


class RecordDecoder:
    """
    Maps located value trees onto schema records.

    Collects P002/P003/P004 diagnostics and remembers the span of every
    field so later structural errors can point into the source.
    """

    _KIND_NAMES = {"object": "an object", "array": "an array", "string": "a string",
                   "number": "a number", "bool": "a boolean", "null": "null"}

    def __init__(self):
        self.diagnostics: List[ParseDiagnostic] = []
        self.spans: Dict[Locator, SourceSpan] = {}

    def _report(self, code: str, message: str, span: SourceSpan) -> None:
        self.diagnostics.append(ParseDiagnostic(code, message, span))

    def _wrong_type(self, node: Node, path: str, expected: str) -> object:
        self._report("P003", f"{path}: expected {expected}, got {self._KIND_NAMES[node.kind]}",
                     node.span)
        return _INVALID

    def fields(self, node: Node, path: str, allowed: Tuple[str, ...],
               required: Tuple[str, ...]) -> Optional[Dict[str, Entry]]:
        if node.kind != "object":
            self._wrong_type(node, path, "an object")
            return None
        entries = node.value
        for key, entry in entries.items():
            if key not in allowed:
                self._report("P002", f"{path}: unknown field {key!r}", entry.key_span)
        complete = True
        for key in required:
            if key not in entries or entries[key].node.kind == "null":
                self._report("P004", f"missing required field {path}/{key}", node.span)
                complete = False
        return entries if complete else None

    def string(self, entries: Dict[str, Entry], key: str, path: str,
               optional: bool = False, default: Optional[str] = None):
        entry = entries.get(key)
        if entry is None or (optional and entry.node.kind == "null"):
            return default
        if entry.node.kind != "string":
            return self._wrong_type(entry.node, f"{path}/{key}", "a string")
        return entry.node.value

    def number(self, entries: Dict[str, Entry], key: str, path: str,
               optional: bool = False, default: Optional[float] = None):
        entry = entries.get(key)
        if entry is None or (optional and entry.node.kind == "null"):
            return default
        return self._number_node(entry.node, f"{path}/{key}")

    def _number_node(self, node: Node, path: str):
        if node.kind != "number":
            return self._wrong_type(node, path, "a number")
        if not math.isfinite(node.value):
            self._report("P003", f"{path}: number is not finite", node.span)
            return _INVALID
        return quantize(node.value)

    def time_range(self, entries: Dict[str, Entry], key: str, path: str):
        node = entries[key].node
        if node.kind != "array" or len(node.value) != 2:
            return self._wrong_type(node, f"{path}/{key}", "a [start, end] pair") \
                if node.kind != "array" else self._pair_error(node, f"{path}/{key}")
        start = self._number_node(node.value[0], f"{path}/{key}[0]")
        end = self._number_node(node.value[1], f"{path}/{key}[1]")
        if start is _INVALID or end is _INVALID:
            return _INVALID
        return TimeRange(start, end)

    def _pair_error(self, node: Node, path: str):
        self._report("P003", f"{path}: expected exactly two numbers", node.span)
        return _INVALID

    def id_list(self, entries: Dict[str, Entry], key: str, path: str):
        entry = entries.get(key)
        if entry is None or entry.node.kind == "null":
            return ()
        if entry.node.kind != "array":
            return self._wrong_type(entry.node, f"{path}/{key}", "an array of ids")
        values = []
        for i, item in enumerate(entry.node.value):
            if item.kind != "string":
                return self._wrong_type(item, f"{path}/{key}[{i}]", "an id string")
            values.append(item.value)
        return tuple(values)

    def enum(self, entries: Dict[str, Entry], key: str, path: str, enum_type):
        value = self.string(entries, key, path)
        if value is _INVALID:
            return _INVALID
        try:
            return enum_type(value)
        except ValueError:
            choices = ", ".join(m.value for m in enum_type)
            self._report("P004", f"{path}/{key}: {value!r} is not one of {choices}",
                         entries[key].node.span)
            return _INVALID

    def _remember(self, stream: str, index: Optional[int], node: Node,
                  entries: Dict[str, Entry], prefix: str = "") -> None:
        if not prefix:
            self.spans[(stream, index, None)] = node.span
        for key, entry in entries.items():
            self.spans[(stream, index, prefix + key)] = entry.node.span

    # Records

    def meta(self, node: Node) -> Any:
        entries = self.fields(node, "meta", META_FIELDS, ("duration",))
        if entries is None:
            return _INVALID
        self._remember("meta", None, node, entries)
        duration = self.number(entries, "duration", "meta")
        fps = self.number(entries, "fps", "meta", optional=True, default=DEFAULT_FPS)
        if _INVALID in (duration, fps):
            return _INVALID
        return MediaMeta(duration, fps)

    def context(self, node: Node) -> Any:
        entries = self.fields(node, "global", GLOBAL_FIELDS, ("scene_description",))
        if entries is None:
            return _INVALID
        self._remember("global", None, node, entries)
        values = [self.string(entries, key, "global", optional=True, default="")
                  for key in GLOBAL_FIELDS]
        if _INVALID in values:
            return _INVALID
        return GlobalContext(*values)

    def reference(self, node: Node, index: Optional[int] = None) -> Any:
        path = f"references[{index}]" if index is not None else "entity"
        entries = self.fields(node, path, REFERENCE_FIELDS, REFERENCE_FIELDS)
        if entries is None:
            return _INVALID
        self._remember("references", index, node, entries)
        id_ = self.string(entries, "id", path)
        category = self.enum(entries, "category", path, Category)
        description = self.string(entries, "semantic_description", path)
        timestamp = self.number(entries, "timestamp", path)
        anchor = self.anchor(entries["appearance_anchor"].node, f"{path}/appearance_anchor", index)
        if _INVALID in (id_, category, description, timestamp, anchor):
            return _INVALID
        return ReferenceEntity(id_, category, description, timestamp, anchor)

    def anchor(self, node: Node, path: str, index: Optional[int]) -> Any:
        entries = self.fields(node, path, ANCHOR_FIELDS, ("detail_description",))
        if entries is None:
            return _INVALID
        self._remember("references", index, node, entries, prefix="appearance_anchor.")
        detail = self.string(entries, "detail_description", path)
        extras = [self.string(entries, key, path, optional=True) for key in ANCHOR_FIELDS[1:]]
        if detail is _INVALID or _INVALID in extras:
            return _INVALID
        return AppearanceAnchor(detail, *extras)

    def shot(self, node: Node, index: Optional[int] = None) -> Any:
        path = f"shots[{index}]" if index is not None else "shot"
        entries = self.fields(node, path, SHOT_FIELDS, SHOT_FIELDS[:4])
        if entries is None:
            return _INVALID
        self._remember("shots", index, node, entries)
        id_ = self.string(entries, "id", path)
        time_range = self.time_range(entries, "time_range", path)
        description = self.string(entries, "visual_description", path)
        camera = self.camera(entries["camera"].node, f"{path}/camera", index)
        refs = self.id_list(entries, "references_in_shot", path)
        active = self.id_list(entries, "active_events", path)
        if _INVALID in (id_, time_range, description, camera, refs, active):
            return _INVALID
        return Shot(id_, time_range, description, camera, refs, active)

    def camera(self, node: Node, path: str, index: Optional[int]) -> Any:
        entries = self.fields(node, path, CAMERA_FIELDS, ())
        if entries is None:
            return _INVALID
        self._remember("shots", index, node, entries, prefix="camera.")
        values = [self.string(entries, key, path, optional=True) for key in CAMERA_FIELDS]
        if _INVALID in values:
            return _INVALID
        return Camera(*values)

    def event(self, node: Node, index: Optional[int] = None) -> Any:
        path = f"events[{index}]" if index is not None else "event"
        entries = self.fields(node, path, EVENT_FIELDS, ("id", "type", "time_range"))
        if entries is None:
            return _INVALID
        self._remember("events", index, node, entries)
        id_ = self.string(entries, "id", path)
        type_ = self.enum(entries, "type", path, EventType)
        time_range = self.time_range(entries, "time_range", path)
        speaker = self.string(entries, "speaker", path, optional=True)
        line = self.string(entries, "line", path, optional=True)
        description = self.string(entries, "description", path, optional=True, default="")
        if _INVALID in (id_, type_, time_range, speaker, line, description):
            return _INVALID
        return AudioEvent(id_, type_, time_range, speaker, line, description)

    def stream(self, entries: Dict[str, Entry], key: str, decode) -> Tuple[list, List[int]]:
        """Decode one stream; returns the records and their source indices."""
        entry = entries.get(key)
        if entry is None or entry.node.kind == "null":
            return [], []
        if entry.node.kind != "array":
            self._wrong_type(entry.node, key, "an array")
            return [], []
        records, indices = [], []
        for index, item in enumerate(entry.node.value):
            record = decode(item, index)
            if record is not _INVALID:
                records.append(record)
                indices.append(index)
        return records, indices


def _structure_diagnostic(error: StructureError, decoder: RecordDecoder,
                          index_maps: Dict[str, List[int]], root_span: SourceSpan) -> ParseDiagnostic:
    span = root_span
    if error.locator is not None:
        stream, index, name = error.locator
        if stream in index_maps and index is not None:
            index = index_maps[stream][index]
        span = (decoder.spans.get((stream, index, name))
                or decoder.spans.get((stream, index, None))
                or root_span)
    code = "P005" if isinstance(error, BadInlineTimestamp) else "P004"
    return ParseDiagnostic(code, str(error), span)


def _sorted(diagnostics: List[ParseDiagnostic]) -> List[ParseDiagnostic]:
    return sorted(diagnostics, key=lambda d: (d.span.byte_offset_start, d.code, d.message))


def _decode_bytes(data: bytes) -> Tuple[Optional[str], List[ParseDiagnostic]]:
    try:
        return data.decode("utf-8"), []
    except UnicodeDecodeError as e:
        prefix = data[:e.start].decode("utf-8")
        line = prefix.count("\n") + 1
        column = len(prefix) - (prefix.rfind("\n") + 1) + 1
        message = f"document is not valid UTF-8 (byte 0x{data[e.start]:02x})"
        guess = detect_encoding(data)
        if guess and guess.lower() not in ("utf-8", "ascii"):
            message += f"; it looks like {guess}"
        span = SourceSpan(e.start, e.end, line, column)
        return None, [ParseDiagnostic("P001", message, span)]


def parse_document(text: Union[str, bytes]) -> ParseOutcome:
    """
    Parse an MTSS document.

    Returns:
        ParseOutcome with either a structurally valid Script (relational
        lint not run) or at least one located diagnostic.
    """
    started = time.perf_counter()
    if isinstance(text, bytes):
        decoded, diagnostics = _decode_bytes(text)
        if decoded is None:
            return ParseOutcome(diagnostics=diagnostics)
        text = decoded

    root, diagnostics = parse_value(text)
    if root is None:
        return ParseOutcome(diagnostics=diagnostics)

    decoder = RecordDecoder()
    entries = decoder.fields(root, "document", ROOT_FIELDS, ("meta", "global"))
    if entries is None:
        return ParseOutcome(diagnostics=_sorted(decoder.diagnostics))

    meta = decoder.meta(entries["meta"].node)
    context = decoder.context(entries["global"].node)
    references, ref_index = decoder.stream(entries, "references", decoder.reference)
    shots, shot_index = decoder.stream(entries, "shots", decoder.shot)
    events, event_index = decoder.stream(entries, "events", decoder.event)
    index_maps = {"references": ref_index, "shots": shot_index, "events": event_index}

    diagnostics = list(decoder.diagnostics)
    if meta is not _INVALID and context is not _INVALID:
        for error in iter_structure_errors(meta, context, references, shots, events):
            diagnostics.append(_structure_diagnostic(error, decoder, index_maps, root.span))
    if diagnostics:
        return ParseOutcome(diagnostics=_sorted(diagnostics))

    try:
        script = build_script(meta, context, references, shots, events)
    except StructureError as error:
        return ParseOutcome(diagnostics=[
            _structure_diagnostic(error, decoder, index_maps, root.span)])

    logger.debug("parsed %d entities, %d shots, %d events in %s",
                 len(script.references), len(script.shots), len(script.events),
                 format_duration(time.perf_counter() - started))
    return ParseOutcome(script=script)


def load_script(text: Union[str, bytes]) -> Script:
    """parse_document that raises ParseFailure instead of returning diagnostics."""
    outcome = parse_document(text)
    if not outcome.ok:
        raise ParseFailure(outcome.diagnostics)
    return outcome.script


# --- Serialization ---------------------------------------------------------

def _is_scalar(value: Any) -> bool:
    return not isinstance(value, (dict, list, tuple))


def _render(value: Any, indent: int) -> str:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        inner = ",\n".join(f"{pad}  {json.dumps(str(k), ensure_ascii=False)}: "
                           f"{_render(v, indent + 1)}" for k, v in value.items())
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(_is_scalar(v) for v in value):
            return "[" + ", ".join(_render(v, indent) for v in value) + "]"
        inner = ",\n".join(pad + "  " + _render(v, indent + 1) for v in value)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(value, Enum):
        value = value.value
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"cannot serialize non-finite number {value!r}")
        return f"{quantize(value):.3f}"
    return json.dumps(str(value), ensure_ascii=False)


def dump_document(value: Any) -> str:
    """Write any value in the document dialect (2-space indent, trailing newline)."""
    return _render(value, 0) + "\n"


def serialize(script: Script) -> str:
    """Canonical, byte-stable text of a Script."""
    return dump_document(canonicalize(script).to_dict())
