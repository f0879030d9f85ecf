"""
Script-vs-script evaluation.

Shot boundary deviation, optimal one-to-one stream matching and per-stream
F1. Small problems are solved by exhaustive search; larger ones go through
scipy's linear_sum_assignment.
"""

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DurationMismatch, FpsMismatch, UnknownKind
from .schema import EPSILON, Script, id_number
from .timeline import boundaries, overlap
from ..utils.config import EvalConfig
from ..utils.helpers import round_half_up, tokenize_words
from ..utils.logger import get_logger

logger = get_logger("evalx")

KINDS = ("shots", "events", "entities")


class Deviation(NamedTuple):
    seconds: float
    frames: int


# --- Boundary deviation ----------------------------------------------------

def _min_cost_pairs(gold: Sequence[float], cand: Sequence[float],
                    exhaustive_limit: int) -> List[Tuple[int, int]]:
    """Maximum-cardinality one-to-one pairing with the least total |difference|."""
    if not gold or not cand:
        return []
    if max(len(gold), len(cand)) <= exhaustive_limit:
        swap = len(gold) > len(cand)
        rows, cols = (cand, gold) if swap else (gold, cand)
        best, best_cost = None, float("inf")
        for perm in itertools.permutations(range(len(cols)), len(rows)):
            cost = sum(abs(rows[i] - cols[j]) for i, j in enumerate(perm))
            if cost < best_cost:
                best, best_cost = perm, cost
        pairs = list(enumerate(best))
        return [(j, i) for i, j in pairs] if swap else pairs
    cost = np.abs(np.subtract.outer(np.asarray(gold), np.asarray(cand)))
    row_ind, col_ind = linear_sum_assignment(cost)
    return list(zip(row_ind.tolist(), col_ind.tolist()))


def _check_compatible(gold: Script, cand: Script) -> None:
    if abs(gold.meta.duration - cand.meta.duration) > EPSILON:
        raise DurationMismatch(gold.meta.duration, cand.meta.duration)
    if abs(gold.meta.fps - cand.meta.fps) > 1e-9:
        raise FpsMismatch(gold.meta.fps, cand.meta.fps)


def boundary_deviation(gold: Script, cand: Script, unmatched_penalty: float = 1.0,
                       config: Optional[EvalConfig] = None) -> Deviation:
    """
    Mean absolute deviation between matched shot boundaries.

    Boundaries are paired one-to-one at minimum total cost; each boundary
    left without a partner adds unmatched_penalty seconds.

    Raises:
        DurationMismatch, FpsMismatch
    """
    config = config or EvalConfig(unmatched_penalty=unmatched_penalty)
    _check_compatible(gold, cand)
    gold_cuts = boundaries(gold) if gold.shots else []
    cand_cuts = boundaries(cand) if cand.shots else []
    pairs = _min_cost_pairs(gold_cuts, cand_cuts, config.exhaustive_boundary_limit)

    mean = (sum(abs(gold_cuts[i] - cand_cuts[j]) for i, j in pairs) / len(pairs)
            if pairs else 0.0)
    unmatched = len(gold_cuts) + len(cand_cuts) - 2 * len(pairs)
    seconds = mean + config.unmatched_penalty * unmatched
    return Deviation(seconds, round_half_up(seconds * gold.meta.fps))


# --- Stream matching -------------------------------------------------------

@dataclass(frozen=True)
class Matching:
    pairs: Tuple[Tuple[str, str, float], ...]
    unmatched_gold: Tuple[str, ...]
    unmatched_candidate: Tuple[str, ...]

    @property
    def total(self) -> float:
        return sum(score for _, _, score in self.pairs)


def token_f1(a: str, b: str) -> float:
    """Token-level F1 between two texts (case-folded, punctuation stripped)."""
    ta, tb = Counter(tokenize_words(a)), Counter(tokenize_words(b))
    if not ta and not tb:
        return 1.0
    common = sum((ta & tb).values())
    if common == 0:
        return 0.0
    precision = common / sum(tb.values())
    recall = common / sum(ta.values())
    return 2 * precision * recall / (precision + recall)


def _score(gold, cand, kind: str) -> float:
    if kind == "entities":
        if gold.category is not cand.category:
            return 0.0
        return token_f1(gold.semantic_description, cand.semantic_description)
    if kind == "events" and gold.type is not cand.type:
        return 0.0
    return overlap(gold.time_range, cand.time_range).iou


def _exhaustive(scores: np.ndarray, allowed: np.ndarray) -> List[Tuple[int, int]]:
    """
    Best partial one-to-one assignment by enumeration.

    Gold rows are decided in order, each trying candidates in order and then
    no partner; the first strictly better total wins, so ties favour lower
    gold rows taking lower candidates.
    """
    n, m = scores.shape
    best: List[Tuple[int, int]] = []
    best_total = -1.0
    chosen: List[Tuple[int, int]] = []
    used = [False] * m

    def search(row: int, total: float) -> None:
        nonlocal best, best_total
        if row == n:
            if total > best_total + 1e-12:
                best, best_total = list(chosen), total
            return
        for col in range(m):
            if not used[col] and allowed[row, col]:
                used[col] = True
                chosen.append((row, col))
                search(row + 1, total + float(scores[row, col]))
                chosen.pop()
                used[col] = False
        search(row + 1, total)

    search(0, 0.0)
    return best


def _element_key(item) -> Tuple[int, str]:
    return (id_number(item.id), item.id)


def match_stream(gold: Sequence, cand: Sequence, kind: str,
                 threshold: float = 0.1, exhaustive_limit: int = 6) -> Matching:
    """
    Optimal one-to-one matching between two streams of the same kind.

    Shots and events score by temporal IoU (events must share a type);
    entities by token F1 of their semantic descriptions (same category
    only). Pairs scoring at or below threshold are never matched.

    Raises:
        UnknownKind: kind is not shots, events or entities
    """
    if kind not in KINDS:
        raise UnknownKind(kind)
    gold = sorted(gold, key=_element_key)
    cand = sorted(cand, key=_element_key)
    scores = np.zeros((len(gold), len(cand)))
    for i, g in enumerate(gold):
        for j, c in enumerate(cand):
            scores[i, j] = _score(g, c, kind)
    allowed = scores > threshold

    if not gold or not cand:
        pairs: List[Tuple[int, int]] = []
    elif max(len(gold), len(cand)) <= exhaustive_limit:
        pairs = _exhaustive(scores, allowed)
    else:
        masked = np.where(allowed, scores, 0.0)
        row_ind, col_ind = linear_sum_assignment(masked, maximize=True)
        pairs = [(i, j) for i, j in zip(row_ind.tolist(), col_ind.tolist()) if allowed[i, j]]
        logger.debug("matched %d %s with linear_sum_assignment", len(pairs), kind)

    pairs.sort()
    matched_gold = {i for i, _ in pairs}
    matched_cand = {j for _, j in pairs}
    return Matching(
        pairs=tuple((gold[i].id, cand[j].id, float(scores[i, j])) for i, j in pairs),
        unmatched_gold=tuple(g.id for i, g in enumerate(gold) if i not in matched_gold),
        unmatched_candidate=tuple(c.id for j, c in enumerate(cand) if j not in matched_cand),
    )


# --- Reports ---------------------------------------------------------------

@dataclass(frozen=True)
class StreamScore:
    precision: float
    recall: float
    f1: float
    mean_score: float
    matching: Matching

    @classmethod
    def from_matching(cls, matching: Matching, gold_count: int, cand_count: int) -> "StreamScore":
        matched = len(matching.pairs)
        if gold_count + cand_count == 0:
            return cls(1.0, 1.0, 1.0, 1.0, matching)
        precision = matched / cand_count if cand_count else 0.0
        recall = matched / gold_count if gold_count else 0.0
        f1 = 2 * matched / (gold_count + cand_count)
        mean = matching.total / matched if matched else 0.0
        return cls(precision, recall, f1, mean, matching)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "mean_score": self.mean_score,
            "pairs": [{"gold": g, "candidate": c, "score": s} for g, c, s in self.matching.pairs],
            "unmatched_gold": list(self.matching.unmatched_gold),
            "unmatched_candidate": list(self.matching.unmatched_candidate),
        }


@dataclass(frozen=True)
class EvalReport:
    boundary_deviation_seconds: float
    boundary_deviation_frames: int
    fps: float
    shots: StreamScore
    entities: StreamScore
    events: StreamScore

    @property
    def min_f1(self) -> float:
        return min(self.shots.f1, self.entities.f1, self.events.f1)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "boundary_deviation": {
                "seconds": self.boundary_deviation_seconds,
                "frames": self.boundary_deviation_frames,
                "fps": self.fps,
            },
            "shots": self.shots.to_dict(),
            "entities": self.entities.to_dict(),
            "events": self.events.to_dict(),
        }


def evaluate(gold: Script, cand: Script, config: Optional[EvalConfig] = None) -> EvalReport:
    """Full comparison of a candidate script against a gold script."""
    config = config or EvalConfig()
    deviation = boundary_deviation(gold, cand, config=config)

    def score(kind: str, g: Sequence, c: Sequence) -> StreamScore:
        matching = match_stream(g, c, kind, config.match_threshold, config.exhaustive_match_limit)
        return StreamScore.from_matching(matching, len(g), len(c))

    return EvalReport(
        boundary_deviation_seconds=deviation.seconds,
        boundary_deviation_frames=deviation.frames,
        fps=gold.meta.fps,
        shots=score("shots", gold.shots, cand.shots),
        entities=score("entities", gold.references, cand.references),
        events=score("events", gold.events, cand.events),
    )
