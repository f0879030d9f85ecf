"""MTSS Toolkit - Multi-Stream Scene Scripts

Parse, lint, query, edit, render and score structured audio-visual
scene scripts: an entity bank, a shot stream and an audio event stream
tied together by reference IDs and shared time ranges.
"""

__version__ = "1.0.0"
__author__ = "MTSS Toolkit Team"
