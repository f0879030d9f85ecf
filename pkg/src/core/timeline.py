"""
Interval index over the shot and event streams.

Each stream is kept as a start-sorted array with an implicit balanced tree
on top: the midpoint of every subrange stores the largest end inside that
subrange. Stabbing and overlap queries skip whole subranges that cannot
contain a hit, which gives O(log n + k) lookups. Indexes are immutable;
build a new one after an edit.
"""

from typing import Callable, Dict, Generic, List, NamedTuple, Sequence, TypeVar

from .errors import EmptyShotStream
from .schema import EPSILON, AudioEvent, Script, Shot, TimeRange, timed_sort_key
from ..utils.helpers import quantize
from ..utils.logger import get_logger

logger = get_logger("timeline")

T = TypeVar("T", Shot, AudioEvent)


class Overlap(NamedTuple):
    length: float
    iou: float


def overlap(a: TimeRange, b: TimeRange) -> Overlap:
    """Intersection length and temporal IoU of two half-open ranges."""
    length = max(0.0, min(a.end, b.end) - max(a.start, b.start))
    union = a.length + b.length - length
    iou = length / union if union > 0 else 0.0
    return Overlap(length, min(1.0, iou))


class IntervalArray(Generic[T]):
    """Start-sorted records with subrange max-end augmentation."""

    def __init__(self, items: Sequence[T]):
        self.items: List[T] = sorted(items, key=timed_sort_key)
        self.starts = [item.time_range.start for item in self.items]
        self.ends = [item.time_range.end for item in self.items]
        self.max_end = [0.0] * len(self.items)
        self._augment(0, len(self.items))

    def __len__(self) -> int:
        return len(self.items)

    def _augment(self, lo: int, hi: int) -> float:
        if lo >= hi:
            return float("-inf")
        mid = (lo + hi) // 2
        # Assign after both children so each midpoint sees its whole subrange
        highest = max(self.ends[mid], self._augment(lo, mid), self._augment(mid + 1, hi))
        self.max_end[mid] = highest
        return highest

    def _collect(self, lo: int, hi: int,
                 subrange_dead: Callable[[float], bool],
                 starts_too_late: Callable[[float], bool],
                 hit: Callable[[T], bool],
                 out: List[T]) -> None:
        if lo >= hi:
            return
        mid = (lo + hi) // 2
        if subrange_dead(self.max_end[mid]):
            return
        self._collect(lo, mid, subrange_dead, starts_too_late, hit, out)
        if starts_too_late(self.starts[mid]):
            return
        item = self.items[mid]
        if hit(item):
            out.append(item)
        self._collect(mid + 1, hi, subrange_dead, starts_too_late, hit, out)

    def stab(self, t: float) -> List[T]:
        """Records whose range contains t (start <= t < end)."""
        out: List[T] = []
        self._collect(0, len(self.items),
                      lambda max_end: max_end <= t,
                      lambda start: start > t,
                      lambda item: item.time_range.contains(t),
                      out)
        return out

    def overlapping(self, query: TimeRange) -> List[T]:
        """Records whose overlap with query is longer than EPSILON."""
        out: List[T] = []
        self._collect(0, len(self.items),
                      lambda max_end: max_end - query.start <= EPSILON,
                      lambda start: query.end - start <= EPSILON,
                      lambda item: overlap(item.time_range, query).length > EPSILON,
                      out)
        return out


class TimelineIndex:
    """Temporal queries over one Script; results come back in canonical order."""

    def __init__(self, script: Script):
        self.script = script
        self.shots: IntervalArray[Shot] = IntervalArray(script.shots)
        self.events: IntervalArray[AudioEvent] = IntervalArray(script.events)

    def shots_active_at(self, t: float) -> List[Shot]:
        return self.shots.stab(t)

    def events_active_at(self, t: float) -> List[AudioEvent]:
        return self.events.stab(t)

    def shots_overlapping(self, time_range: TimeRange) -> List[Shot]:
        return self.shots.overlapping(time_range)

    def events_overlapping(self, time_range: TimeRange) -> List[AudioEvent]:
        return self.events.overlapping(time_range)


def build_index(script: Script) -> TimelineIndex:
    index = TimelineIndex(script)
    logger.debug("indexed %d shots and %d events", len(index.shots), len(index.events))
    return index


def infer_active_events(script: Script, index: TimelineIndex = None) -> Dict[str, List[str]]:
    """
    Events overlapping each shot, from the time data alone.

    Stored active_events lists are ignored. Each list is ordered by event
    start, then ID.
    """
    index = index or build_index(script)
    return {shot.id: [event.id for event in index.events_overlapping(shot.time_range)]
            for shot in script.shots}


def boundaries(script: Script) -> List[float]:
    """
    Interior cut points of the shot stream.

    The upper end is the media duration, or the last shot end when the
    duration is unknown. Values within EPSILON of either end are dropped.

    Raises:
        EmptyShotStream: the script has no shots
    """
    if not script.shots:
        raise EmptyShotStream()
    upper = script.meta.duration
    if not upper > 0:
        upper = max(shot.time_range.end for shot in script.shots)
    points = set()
    for shot in script.shots:
        for value in (shot.time_range.start, shot.time_range.end):
            if EPSILON < value < upper - EPSILON:
                points.add(quantize(value))
    return sorted(points)
