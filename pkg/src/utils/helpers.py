"""
Utility helper functions for the MTSS toolkit.
"""

import re
import string
from decimal import Decimal, ROUND_HALF_UP
from fnmatch import fnmatch
from pathlib import Path
from typing import List, Optional


_PUNCTUATION_TABLE = str.maketrans({c: " " for c in string.punctuation})


def natural_sort_key(s: str) -> List:
    """
    Generate a key for natural sorting.
    Handles numbers within strings properly (SHOT_2 before SHOT_10).
    """
    return [int(text) if text.isdigit() else text.lower()
            for text in re.split(r'(\d+)', str(s))]


def quantize(seconds: float) -> float:
    """Round a time value to millisecond resolution."""
    # + 0.0 turns -0.0 into 0.0
    return round(float(seconds), 3) + 0.0


def format_time(seconds: float) -> str:
    """Format a time value the way documents print it: exactly 3 decimals."""
    return f"{quantize(seconds):.3f}"


def round_half_up(value: float) -> int:
    """Round to the nearest integer, halves away from zero."""
    return int(Decimal(repr(value)).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def format_duration(seconds: float) -> str:
    """Format an elapsed duration in human-readable form."""
    if seconds < 1:
        return f"{seconds * 1000:.0f}ms"
    if seconds < 60:
        return f"{seconds:.1f}s"
    minutes = int(seconds // 60)
    secs = int(seconds % 60)
    return f"{minutes}m {secs}s"


def matches_patterns(filename: str, patterns: List[str]) -> bool:
    """Check if filename matches any of the glob patterns."""
    return any(fnmatch(filename.lower(), pattern.lower()) for pattern in patterns)


def tokenize_words(text: str) -> List[str]:
    """Case-fold, strip punctuation and split on whitespace."""
    return text.casefold().translate(_PUNCTUATION_TABLE).split()


def ensure_sentence(text: str) -> str:
    """Terminate text with a period unless it already ends a sentence."""
    text = text.rstrip()
    if not text:
        return text
    if text[-1] in ".!?\"')":
        return text
    return text + "."


def detect_encoding(raw_data: bytes) -> Optional[str]:
    """Guess the encoding of a byte string using chardet if available."""
    try:
        import chardet
    except ImportError:
        return None
    result = chardet.detect(raw_data[:10000])
    detected = result.get('encoding')
    confidence = result.get('confidence') or 0
    if not detected or confidence < 0.5:
        return None
    return detected


def read_input(path: str) -> bytes:
    """Read a document from a path, or standard input when path is '-'."""
    if path == "-":
        import sys
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()
