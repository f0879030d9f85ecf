"""
Corpus discovery and script statistics.
Finds MTSS documents on disk and measures what a script costs as text.
"""

from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from .edits import SetField, apply
from .render import render_monolithic
from .schema import Category, EventType, Script
from .validator import validate
from ..utils.config import ToolConfig
from ..utils.helpers import matches_patterns, natural_sort_key
from ..utils.logger import get_logger

logger = get_logger("analyzer")

# Appended to a shot description to measure how far one local edit travels
PROBE_SENTENCE = " Then the light shifts."


class CorpusScanner:
    """Discovers MTSS documents from files and directories."""

    def __init__(self, config: Optional[ToolConfig] = None):
        self.config = config or ToolConfig()

    def discover(
        self,
        paths: List[Path],
        progress_callback: Optional[Callable[[str], None]] = None
    ) -> List[Path]:
        """
        Expand files and directories into a list of documents.

        Files named explicitly are always kept; directories are scanned
        recursively for files matching the include patterns.

        Returns:
            Paths in natural sort order, without duplicates
        """
        found = []
        for path in paths:
            path = Path(path)
            if path.is_dir():
                found.extend(self._scan_directory(path, progress_callback))
            else:
                found.append(path)
        unique = {str(p): p for p in found}
        return [unique[k] for k in sorted(unique, key=natural_sort_key)]

    def _scan_directory(
        self,
        directory: Path,
        progress_callback: Optional[Callable[[str], None]] = None,
        current_depth: int = 0
    ) -> List[Path]:
        """Recursively scan a directory for documents."""
        files = []

        # Check depth limit
        if self.config.max_depth >= 0 and current_depth > self.config.max_depth:
            return files

        try:
            for entry in directory.iterdir():
                if entry.is_file() and self._matches_filters(entry):
                    files.append(entry)
                    if progress_callback:
                        progress_callback(f"Found: {entry.name}")
                elif entry.is_dir() and not entry.name.startswith('.'):
                    files.extend(self._scan_directory(entry, progress_callback, current_depth + 1))
        except PermissionError:
            logger.warning("Permission denied: %s", directory)

        return files

    def _matches_filters(self, filepath: Path) -> bool:
        """Check if file matches include/exclude patterns."""
        filename = filepath.name
        if not matches_patterns(filename, self.config.include_patterns):
            return False
        if self.config.exclude_patterns and matches_patterns(filename, self.config.exclude_patterns):
            return False
        return True


def positional_changes(before: str, after: str) -> int:
    """Number of character positions that differ (length change counts too)."""
    common = sum(1 for a, b in zip(before, after) if a != b)
    return common + abs(len(before) - len(after))


def _entity_spread(script: Script) -> Dict[str, int]:
    shot_counts = {e.id: 0 for e in script.references}
    for shot in script.shots:
        for ref in shot.references_in_shot:
            if ref in shot_counts:
                shot_counts[ref] += 1
    return {
        "single_shot_entities": sum(1 for n in shot_counts.values() if n == 1),
        "multi_shot_entities": sum(1 for n in shot_counts.values() if n > 1),
    }


def footprint_ratios(script: Script) -> List[float]:
    """
    Per shot: changed Script paths over changed monolithic characters,
    for a probe edit that appends one sentence to the shot description.
    """
    before = render_monolithic(script)
    ratios = []
    for shot in script.shots:
        edited, footprint = apply(script, SetField(
            f"shots/{shot.id}/visual_description", shot.visual_description + PROBE_SENTENCE))
        changed = positional_changes(before, render_monolithic(edited))
        ratios.append(len(footprint.changed_paths) / changed if changed else 0.0)
    return ratios


def script_stats(script: Script) -> Dict[str, Any]:
    """
    Counts, redundancy and edit-footprint figures for one script.

    Redundancy and footprint need a renderable script; they are None when
    the script has lint errors.
    """
    stats: Dict[str, Any] = {
        "entities": {c.value: sum(1 for e in script.references if e.category is c)
                     for c in Category},
        "shots": len(script.shots),
        "events": {t.value: sum(1 for e in script.events if e.type is t) for t in EventType},
    }
    stats.update(_entity_spread(script))

    diagnostics = validate(script)
    stats["diagnostics"] = diagnostics.counts
    if diagnostics.has_errors:
        stats["redundancy"] = None
        stats["footprint"] = None
        return stats

    first = len(render_monolithic(script, expand_first_mention=True))
    every = len(render_monolithic(script, every_mention=True))
    stats["redundancy"] = {
        "first_mention_chars": first,
        "every_mention_chars": every,
        "ratio": first / every if every else 1.0,
    }

    ratios = footprint_ratios(script)
    stats["footprint"] = {
        "mean_ratio": sum(ratios) / len(ratios) if ratios else 0.0,
        "max_ratio": max(ratios, default=0.0),
    }
    logger.debug("stats computed for %d shots", len(script.shots))
    return stats
