"""Value types shared by the tracker, the loaders and the evaluation code.

Time units are fixed throughout the package: score positions are in
quarter-note beats, performance times in seconds, and tempo in seconds per
quarter note (spq). Tempo values are plain floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import EmptyPitchSet, EmptyScore, NonIncreasingOnsets, ValidationError


@dataclass(frozen=True)
class PerformanceNote:
    """One performed (recorded or transcribed) note."""

    pitch: int
    onset_s: float

    def __post_init__(self):
        if not 0 <= self.pitch <= 127:
            raise ValidationError(f"pitch {self.pitch} outside [0, 127]")
        if not (math.isfinite(self.onset_s) and self.onset_s >= 0):
            raise ValidationError(f"onset {self.onset_s!r} must be finite and >= 0")


@dataclass(frozen=True)
class ScoreOnset:
    """All pitches that start together at one score position."""

    pitch_set: frozenset
    onset_b: float

    def __post_init__(self):
        object.__setattr__(self, "pitch_set", frozenset(self.pitch_set))
        if not self.pitch_set:
            raise EmptyPitchSet(f"empty pitch set at beat {self.onset_b}")
        for p in self.pitch_set:
            if not 0 <= p <= 127:
                raise ValidationError(f"pitch {p} outside [0, 127]")
        if not (math.isfinite(self.onset_b) and self.onset_b >= 0):
            raise ValidationError(f"onset {self.onset_b!r} must be finite and >= 0")


def validate_score(onsets: Sequence[ScoreOnset]) -> None:
    """Raise if ``onsets`` is not a valid score sequence."""
    if len(onsets) == 0:
        raise EmptyScore("score has no onsets")
    for k, onset in enumerate(onsets):
        if not onset.pitch_set:
            raise EmptyPitchSet(f"empty pitch set at index {k}")
        if k and onset.onset_b <= onsets[k - 1].onset_b:
            raise NonIncreasingOnsets(
                f"onset {k} at beat {onset.onset_b} does not follow "
                f"beat {onsets[k - 1].onset_b}"
            )


def validate_performance(notes: Sequence[PerformanceNote]) -> None:
    """Raise if the note onsets ever decrease."""
    for k in range(1, len(notes)):
        if notes[k].onset_s < notes[k - 1].onset_s:
            raise ValidationError(
                f"note {k} at {notes[k].onset_s}s precedes note {k - 1} "
                f"at {notes[k - 1].onset_s}s"
            )


@dataclass(frozen=True)
class ScoreSequence:
    """Validated, strictly increasing sequence of score onsets."""

    onsets: tuple
    _beats: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        onsets = tuple(self.onsets)
        validate_score(onsets)
        object.__setattr__(self, "onsets", onsets)
        beats = np.array([o.onset_b for o in onsets], dtype=float)
        beats.flags.writeable = False
        object.__setattr__(self, "_beats", beats)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple]) -> "ScoreSequence":
        """Build from ``(pitch_set, beats)`` pairs."""
        return cls(tuple(ScoreOnset(frozenset(p), float(b)) for p, b in pairs))

    @property
    def beats(self) -> np.ndarray:
        """Read-only array of onset positions in beats."""
        return self._beats

    def pitch_matrix(self) -> np.ndarray:
        """Boolean ``(len(self), 128)`` membership table."""
        table = np.zeros((len(self.onsets), 128), dtype=bool)
        for i, onset in enumerate(self.onsets):
            table[i, list(onset.pitch_set)] = True
        return table

    def __len__(self) -> int:
        return len(self.onsets)

    def __iter__(self) -> Iterator[ScoreOnset]:
        return iter(self.onsets)

    def __getitem__(self, i):
        return self.onsets[i]


@dataclass(frozen=True)
class PerformanceStream:
    """Performed notes ordered by onset (equal onsets allowed)."""

    notes: tuple = ()

    def __post_init__(self):
        notes = tuple(self.notes)
        validate_performance(notes)
        object.__setattr__(self, "notes", notes)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple]) -> "PerformanceStream":
        """Build from ``(pitch, seconds)`` pairs."""
        return cls(tuple(PerformanceNote(int(p), float(t)) for p, t in pairs))

    def __len__(self) -> int:
        return len(self.notes)

    def __iter__(self) -> Iterator[PerformanceNote]:
        return iter(self.notes)

    def __getitem__(self, j):
        return self.notes[j]


@dataclass(frozen=True)
class TrackerConfig:
    """Tuning parameters of the tracker.

    Defaults are the best configuration reported for recorded and
    transcribed piano MIDI: window 20, timing weight 2, unit direction
    weights, tempo decay 0.1 and an initial tempo of 0.5 s per quarter.

    Parameters
    ----------
    w : int
        Score window size in onsets.
    c : float
        Weight of the timing error relative to the pitch error.
    dw0, dw1, dw2 : float
        Step weights for the score, diagonal and performance directions.
    d : float
        Tempo smoothing factor in (0, 1]; 1 means no smoothing.
    t_init_spq : float
        Initial tempo in seconds per quarter note.
    tempo_min, tempo_max : float
        Clamp applied to every tempo estimate.
    faithful_line6 : bool
        Compute the between-onset tempo from the *sum* of performance
        onsets instead of their difference. Only useful for comparison.
    """

    w: int = 20
    c: float = 2.0
    dw0: float = 1.0
    dw1: float = 1.0
    dw2: float = 1.0
    d: float = 0.1
    t_init_spq: float = 0.5
    tempo_min: float = 0.05
    tempo_max: float = 5.0
    faithful_line6: bool = False

    def __post_init__(self):
        if int(self.w) != self.w or self.w < 2:
            raise ValidationError(f"w must be an integer >= 2, got {self.w}")
        object.__setattr__(self, "w", int(self.w))
        if self.c < 0:
            raise ValidationError(f"c must be >= 0, got {self.c}")
        for name in ("dw0", "dw1", "dw2"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be > 0")
        if not 0 < self.d <= 1:
            raise ValidationError(f"d must lie in (0, 1], got {self.d}")
        if not 0 < self.tempo_min < self.t_init_spq < self.tempo_max:
            raise ValidationError(
                "need 0 < tempo_min < t_init_spq < tempo_max, got "
                f"{self.tempo_min}, {self.t_init_spq}, {self.tempo_max}"
            )

    @property
    def weights(self) -> tuple:
        return (self.dw0, self.dw1, self.dw2)


@dataclass(frozen=True)
class MatchEvent:
    """The tracker's decision for one performed note."""

    score_index: int
    perf_index: int
    perf_onset_s: float
    tempo: float
