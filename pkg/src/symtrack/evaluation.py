"""Robustness and precision of a tracking run against a reference alignment.

A piece counts as lost when the absolute error at any score onset exceeds
10 seconds. Precision is the share of onsets whose absolute error is at most
25, 50, 100, 250 and 500 ms, averaged over the pieces that were not lost.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence

import numpy as np

from .errors import NoMatches
from .model import MatchEvent, ScoreSequence
from .stream_sim import GroundTruthAlignment

THRESHOLDS_S = (0.025, 0.05, 0.1, 0.25, 0.5)
LOST_AFTER_S = 10.0


def predicted_times(
    matches: Sequence[MatchEvent],
    score: ScoreSequence,
    gt: GroundTruthAlignment,
) -> np.ndarray:
    """Predicted performance time for every onset of ``gt``.

    An onset reported by the tracker takes the performance onset of the
    first note matched to it. Other onsets are interpolated linearly in
    beats between reported neighbours, and held constant beyond the first
    and last reported onsets.
    """
    if not matches:
        raise NoMatches("tracker produced no matches")
    first = {}
    for m in matches:
        first.setdefault(m.score_index, m.perf_onset_s)
    idx = sorted(first)
    known_beats = score.beats[idx]
    known_times = np.array([first[i] for i in idx])

    gt_beats = np.array([b for b, _ in gt.pairs])
    out = np.interp(gt_beats, known_beats, known_times)
    # exact hits bypass interpolation
    pos = np.searchsorted(score.beats, gt_beats)
    for k, (b, p) in enumerate(zip(gt_beats, pos)):
        if p < len(score) and score.beats[p] == b and int(p) in first:
            out[k] = first[int(p)]
    return out


@dataclass(frozen=True)
class PieceReport:
    errors_s: tuple
    lost: bool
    quantile_pcts: tuple

    def to_dict(self, with_errors: bool = False) -> dict:
        d = asdict(self)
        d["quantile_pcts"] = list(self.quantile_pcts)
        if with_errors:
            d["errors_s"] = list(self.errors_s)
        else:
            del d["errors_s"]
            d["max_error_s"] = max(self.errors_s) if self.errors_s else 0.0
        return d


def errors_report(errors: Sequence[float]) -> PieceReport:
    errs = np.abs(np.asarray(errors, dtype=float))
    if errs.size == 0:
        pcts = tuple(100.0 for _ in THRESHOLDS_S)
    else:
        pcts = tuple(100.0 * np.count_nonzero(errs <= t) / errs.size for t in THRESHOLDS_S)
    lost = bool(np.any(errs > LOST_AFTER_S))
    return PieceReport(tuple(errs.tolist()), lost, pcts)


def piece_report(predicted: Sequence[float], gt: GroundTruthAlignment) -> PieceReport:
    """Per-onset absolute errors, lost flag and threshold percentages."""
    actual = np.array([t for _, t in gt.pairs])
    predicted = np.asarray(predicted, dtype=float)
    if predicted.shape != actual.shape:
        raise ValueError(
            f"{predicted.size} predictions for {actual.size} ground-truth onsets"
        )
    return errors_report(predicted - actual)


@dataclass(frozen=True)
class DatasetReport:
    """Aggregate over pieces. ``precision`` is ``None`` if every piece was lost."""

    n_pieces: int
    n_lost: int
    robustness: float
    precision: Optional[tuple]

    def to_dict(self) -> dict:
        return {
            "n_pieces": self.n_pieces,
            "n_lost": self.n_lost,
            "robustness": self.robustness,
            "precision": None
            if self.precision is None
            else {str(t): p for t, p in zip(THRESHOLDS_S, self.precision)},
        }


def dataset_report(reports: Sequence[PieceReport]) -> DatasetReport:
    if not reports:
        raise ValueError("need at least one piece report")
    kept: List[PieceReport] = [r for r in reports if not r.lost]
    robustness = 100.0 * len(kept) / len(reports)
    precision = None
    if kept:
        # sorted so that aggregation does not depend on piece order
        precision = tuple(
            float(np.mean(sorted(r.quantile_pcts[k] for r in kept)))
            for k in range(len(THRESHOLDS_S))
        )
    return DatasetReport(len(reports), len(reports) - len(kept), robustness, precision)
