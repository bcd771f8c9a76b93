"""Timed replay of note streams and synthetic performances of scores."""

from __future__ import annotations

import bisect
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateTempoCurve, ValidationError
from .model import PerformanceNote, PerformanceStream, ScoreSequence

PIANO_RANGE = (21, 108)


@dataclass(frozen=True)
class GroundTruthAlignment:
    """Reference map from score positions (beats) to performance times (s)."""

    pairs: tuple

    def __post_init__(self):
        pairs = tuple((float(b), float(t)) for b, t in self.pairs)
        for k in range(1, len(pairs)):
            if pairs[k][0] <= pairs[k - 1][0]:
                raise ValidationError(f"alignment beats not increasing at pair {k}")
            if pairs[k][1] < pairs[k - 1][1]:
                raise ValidationError(f"alignment seconds decreasing at pair {k}")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


class TempoCurve:
    """Piecewise-linear tempo (seconds per quarter) over score beats.

    Held constant before the first and after the last breakpoint.

    >>> TempoCurve.constant(0.5).seconds_at(8.0)
    4.0
    """

    def __init__(self, breakpoints: Sequence[Tuple[float, float]]):
        pts = [(float(b), float(v)) for b, v in breakpoints]
        if not pts:
            raise DegenerateTempoCurve("tempo curve needs at least one breakpoint")
        for k, (b, v) in enumerate(pts):
            if not (np.isfinite(v) and v > 0):
                raise DegenerateTempoCurve(f"tempo {v} at beat {b} is not positive")
            if k and b <= pts[k - 1][0]:
                raise DegenerateTempoCurve("breakpoint beats must increase")
        if pts[0][0] > 0:
            pts.insert(0, (0.0, pts[0][1]))
        self.beats = [b for b, _ in pts]
        self.values = [v for _, v in pts]
        # elapsed seconds at each breakpoint, measured from beat 0
        self._elapsed = [0.0]
        for k in range(1, len(pts)):
            width = self.beats[k] - self.beats[k - 1]
            self._elapsed.append(
                self._elapsed[-1] + width * (self.values[k - 1] + self.values[k]) / 2
            )

    @classmethod
    def constant(cls, spq: float) -> "TempoCurve":
        return cls([(0.0, spq)])

    @classmethod
    def parse(cls, text: str) -> "TempoCurve":
        """Parse ``"0.5"`` or ``"beat:spq,beat:spq,..."``."""
        try:
            if ":" not in text:
                return cls.constant(float(text))
            pts = []
            for item in text.split(","):
                b, v = item.split(":")
                pts.append((float(b), float(v)))
        except ValueError as exc:
            raise DegenerateTempoCurve(f"bad tempo curve {text!r}: {exc}") from None
        return cls(pts)

    def tempo_at(self, beat: float) -> float:
        k = bisect.bisect_right(self.beats, beat) - 1
        if k < 0:
            return self.values[0]
        if k >= len(self.beats) - 1:
            return self.values[-1]
        frac = (beat - self.beats[k]) / (self.beats[k + 1] - self.beats[k])
        return self.values[k] + frac * (self.values[k + 1] - self.values[k])

    def seconds_at(self, beat: float) -> float:
        """Integral of the tempo from beat 0 to ``beat``."""
        if beat < 0:
            raise ValueError("beat must be >= 0")
        k = max(bisect.bisect_right(self.beats, beat) - 1, 0)
        return self._elapsed[k] + (beat - self.beats[k]) * (
            self.values[k] + self.tempo_at(beat)
        ) / 2


def synthesize(
    score: ScoreSequence,
    tempo_curve: TempoCurve,
    jitter_sd_s: float = 0.0,
    chord_spread_sd_s: float = 0.0,
    insert_rate: float = 0.0,
    delete_rate: float = 0.0,
    seed: int = 0,
) -> Tuple[PerformanceStream, GroundTruthAlignment]:
    """Render a score as a performance with timing noise and note errors.

    Every score onset gets a nominal time from the tempo curve. Each pitch
    of its set is dropped with probability ``delete_rate``, otherwise
    emitted at the nominal time plus a chord-spread and a jitter offset
    (independent Gaussians). For every score note, a spurious note with a
    uniform piano pitch and a uniform time over the performance span is
    added with probability ``insert_rate``. The ground truth holds the
    nominal times of all onsets, deleted or not.
    """
    if not (0 <= insert_rate <= 1 and 0 <= delete_rate <= 1):
        raise ValidationError("insert_rate and delete_rate must lie in [0, 1]")
    if jitter_sd_s < 0 or chord_spread_sd_s < 0:
        raise ValidationError("noise levels must be >= 0")
    rng = np.random.default_rng(seed)

    nominal = [tempo_curve.seconds_at(o.onset_b) for o in score]
    end = nominal[-1]
    notes = []
    n_inserts = 0
    for onset, t in zip(score, nominal):
        for pitch in sorted(onset.pitch_set):
            keep = rng.random() >= delete_rate
            spread = rng.normal(0.0, chord_spread_sd_s)
            jitter = rng.normal(0.0, jitter_sd_s)
            if keep:
                notes.append((max(t + spread + jitter, 0.0), pitch))
            if rng.random() < insert_rate:
                n_inserts += 1
    lo, hi = PIANO_RANGE
    for _ in range(n_inserts):
        pitch = int(rng.integers(lo, hi + 1))
        notes.append((float(rng.uniform(0.0, end)), pitch))
    notes.sort()

    perf = PerformanceStream(tuple(PerformanceNote(p, t) for t, p in notes))
    truth = GroundTruthAlignment(tuple((o.onset_b, t) for o, t in zip(score, nominal)))
    return perf, truth


def random_score(
    n_onsets: int,
    seed: int = 0,
    chord_prob: float = 0.3,
    durations: Sequence[float] = (0.25, 0.5, 0.5, 1.0, 1.0, 2.0),
) -> ScoreSequence:
    """Random piano-like score: a melodic random walk with occasional chords
    below it. Used for synthetic corpora."""
    rng = np.random.default_rng(seed)
    pitch = int(rng.integers(60, 73))
    beat = 0.0
    pairs = []
    for _ in range(n_onsets):
        pitch = int(np.clip(pitch + rng.integers(-4, 5), 55, 84))
        pitches = {pitch}
        if rng.random() < chord_prob:
            for _ in range(int(rng.integers(1, 4))):
                pitches.add(int(pitch - rng.integers(3, 20)))
        pairs.append((pitches, beat))
        beat += float(rng.choice(durations))
    return ScoreSequence.from_pairs(pairs)


def random_tempo_curve(
    n_beats: float,
    base_spq: float = 0.5,
    variation: float = 0.3,
    segment_beats: float = 16.0,
    seed: int = 0,
) -> TempoCurve:
    """Piecewise-linear curve with a breakpoint every ``segment_beats``,
    each drawn uniformly within ``base_spq * (1 +/- variation)``."""
    if not 0 <= variation < 1:
        raise DegenerateTempoCurve("variation must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    beats = np.arange(0.0, n_beats + segment_beats, segment_beats)
    values = base_spq * (1.0 + rng.uniform(-variation, variation, size=beats.size))
    return TempoCurve(list(zip(beats.tolist(), values.tolist())))


def replay(
    perf: PerformanceStream,
    sink: Callable[[PerformanceNote], None],
    pacing: str = "accelerated",
    clock: Callable[[], float] = time.perf_counter,
    sleep: Callable[[float], None] = time.sleep,
) -> int:
    """Deliver the notes of ``perf`` to ``sink`` in order.

    ``pacing="realtime"`` waits so that deliveries follow the performance
    timing relative to the first note; ``"accelerated"`` delivers at once.
    A sink signals that it is closed by raising :class:`SinkClosed`, which
    propagates. Returns the number of notes delivered.
    """
    if pacing not in ("realtime", "accelerated"):
        raise ValueError(f"unknown pacing {pacing!r}")
    if hasattr(sink, "put") and not callable(sink):
        sink = sink.put
    delivered = 0
    start: Optional[float] = None
    first = perf[0].onset_s if len(perf) else 0.0
    for note in perf:
        if pacing == "realtime":
            if start is None:
                start = clock()
            delay = start + (note.onset_s - first) - clock()
            if delay > 0:
                sleep(delay)
        sink(note)
        delivered += 1
    return delivered
