"""Utility modules for the MTSS toolkit."""

from .config import EvalConfig, ToolConfig, PRESETS, get_preset
from .logger import setup_logging, get_logger, level_for_verbosity
from .helpers import (
    natural_sort_key,
    quantize,
    format_time,
    round_half_up,
    format_duration,
    matches_patterns,
    tokenize_words,
    ensure_sentence,
    detect_encoding,
    read_input,
)

__all__ = [
    'EvalConfig',
    'ToolConfig',
    'PRESETS',
    'get_preset',
    'setup_logging',
    'get_logger',
    'level_for_verbosity',
    'natural_sort_key',
    'quantize',
    'format_time',
    'round_half_up',
    'format_duration',
    'matches_patterns',
    'tokenize_words',
    'ensure_sentence',
    'detect_encoding',
    'read_input',
]
