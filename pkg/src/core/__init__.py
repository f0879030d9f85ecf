"""Core modules for the MTSS toolkit."""

from .schema import (
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
)
from .parser import (
    InlineTimestamp,
    ParseDiagnostic,
    ParseOutcome,
    SourceSpan,
    extract_inline_timestamps,
    load_script,
    parse_document,
    serialize,
)
from .validator import Diagnostic, DiagnosticSet, Severity, explain_rule, validate
from .timeline import TimelineIndex, boundaries, build_index, infer_active_events, overlap
from .edits import Footprint, apply, merge_shots, parse_edit_script, split_shot
from .render import ShotPrompt, render_branch_prompts, render_monolithic, render_shot_prompts
from .evalx import EvalReport, Matching, boundary_deviation, evaluate, match_stream
from .analyzer import CorpusScanner, script_stats

__all__ = [
    'AppearanceAnchor',
    'AudioEvent',
    'Camera',
    'Category',
    'EventType',
    'GlobalContext',
    'MediaMeta',
    'ReferenceEntity',
    'Script',
    'Shot',
    'TimeRange',
    'build_script',
    'canonicalize',
    'InlineTimestamp',
    'ParseDiagnostic',
    'ParseOutcome',
    'SourceSpan',
    'extract_inline_timestamps',
    'load_script',
    'parse_document',
    'serialize',
    'Diagnostic',
    'DiagnosticSet',
    'Severity',
    'explain_rule',
    'validate',
    'TimelineIndex',
    'boundaries',
    'build_index',
    'infer_active_events',
    'overlap',
    'Footprint',
    'apply',
    'merge_shots',
    'parse_edit_script',
    'split_shot',
    'ShotPrompt',
    'render_branch_prompts',
    'render_monolithic',
    'render_shot_prompts',
    'EvalReport',
    'Matching',
    'boundary_deviation',
    'evaluate',
    'match_stream',
    'CorpusScanner',
    'script_stats',
]
