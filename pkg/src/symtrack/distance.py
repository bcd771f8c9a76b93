"""Pairwise pitch/time distance with an exponentially smoothed tempo update."""

from __future__ import annotations

from typing import NamedTuple

from .model import PerformanceNote, ScoreOnset, TrackerConfig


class PairwiseResult(NamedTuple):
    distance: float
    tempo: float


def local_distance(
    in_set: bool,
    score_beats: float,
    prev_score_beats: float,
    perf_s: float,
    prev_perf_s: float,
    prev_tempo: float,
    c: float,
    d: float,
    tempo_min: float,
    tempo_max: float,
    faithful_line6: bool = False,
) -> PairwiseResult:
    """Scalar core of :func:`pairwise_distance`.

    The onset of the current note is predicted from the previous
    performance onset, the score inter-onset interval and the previous
    tempo. The distance is the binary pitch error plus ``c`` times the
    absolute prediction error. The tempo of the step is the ratio of
    performance to score inter-onset interval, or, for a zero score
    interval, the previous tempo shifted by the performance interval; it is
    blended into the previous tempo with weight ``d`` and clamped.
    """
    pitch_err = 0.0 if in_set else 1.0
    score_ioi = score_beats - prev_score_beats
    expected = prev_perf_s + score_ioi * prev_tempo
    time_err = abs(expected - perf_s)
    dist = pitch_err + c * time_err

    if score_beats != prev_score_beats:
        if faithful_line6:
            current = (perf_s + prev_perf_s) / score_ioi
        else:
            current = (perf_s - prev_perf_s) / score_ioi
    else:
        current = prev_tempo + perf_s - prev_perf_s
    smoothed = current * d + (1.0 - d) * prev_tempo
    smoothed = min(max(smoothed, tempo_min), tempo_max)
    return PairwiseResult(dist, smoothed)


def pairwise_distance(
    score_cur: ScoreOnset,
    score_prev: ScoreOnset,
    perf_cur: PerformanceNote,
    perf_prev: PerformanceNote,
    prev_tempo: float,
    cfg: TrackerConfig,
) -> PairwiseResult:
    """Distance between a performed note and a score onset, given the
    previous pair on the same alignment path and that path's tempo.

    Parameters
    ----------
    score_cur, score_prev : ScoreOnset
        Current and previous score onsets (``score_prev`` may equal
        ``score_cur`` for a step along the performance axis).
    perf_cur, perf_prev : PerformanceNote
        Current and previous performed notes.
    prev_tempo : float
        Tempo of the predecessor cell, seconds per quarter.
    cfg : TrackerConfig

    Returns
    -------
    PairwiseResult
        ``(distance, smoothed_tempo)``.
    """
    return local_distance(
        perf_cur.pitch in score_cur.pitch_set,
        score_cur.onset_b,
        score_prev.onset_b,
        perf_cur.onset_s,
        perf_prev.onset_s,
        prev_tempo,
        cfg.c,
        cfg.d,
        cfg.tempo_min,
        cfg.tempo_max,
        cfg.faithful_line6,
    )
