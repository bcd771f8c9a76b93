"""Loaders for scores, performances and reference alignments.

Two sources are supported: Standard MIDI Files (format 0/1, metrical time
division) and a tab-separated text format used for fixtures::

    # score:       beats<TAB>pitch[,pitch...]
    # performance: seconds<TAB>pitch
    # alignment:   beats<TAB>seconds
"""

from __future__ import annotations

import os
import struct
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

import mido

from .errors import ParseError, UnsupportedDivision, ValidationError
from .model import (
    PerformanceNote,
    PerformanceStream,
    ScoreOnset,
    ScoreSequence,
)
from .stream_sim import GroundTruthAlignment

PathLike = Union[str, os.PathLike]

MIDI_SUFFIXES = {".mid", ".midi", ".smf"}
KINDS = ("score", "performance", "alignment")


def group_onsets(
    notes: Iterable[Tuple[float, int]], merge_eps: float = 0.0
) -> ScoreSequence:
    """Group ``(beats, pitch)`` notes into a score of pitch sets.

    Notes whose onsets lie within ``merge_eps`` beats of the first onset of
    the current group join that group; with the default of 0 only exactly
    equal onsets are merged.
    """
    ordered = sorted((float(b), int(p)) for b, p in notes)
    groups: List[Tuple[float, set]] = []
    for beats, pitch in ordered:
        if groups and beats - groups[-1][0] <= merge_eps:
            groups[-1][1].add(pitch)
        else:
            groups.append((beats, {pitch}))
    return ScoreSequence(tuple(ScoreOnset(frozenset(p), b) for b, p in groups))


def _read_midi(path: PathLike) -> mido.MidiFile:
    try:
        mid = mido.MidiFile(path)
    except (OSError, EOFError, ValueError, KeyError, IndexError, struct.error) as exc:
        raise ParseError(f"cannot read MIDI file {path}: {exc}") from exc
    if mid.ticks_per_beat <= 0:
        raise UnsupportedDivision(f"{path}: SMPTE time division is not supported")
    if mid.type == 2:
        raise ParseError(f"{path}: format 2 MIDI files are not supported")
    return mid


def _note_ons(track, skip_channels):
    tick = 0
    for msg in track:
        tick += msg.time
        if msg.type == "note_on" and msg.velocity > 0 and msg.channel not in skip_channels:
            yield tick, msg.note


def load_score_midi(
    path: PathLike, merge_eps: float = 0.0, skip_channels: Sequence[int] = ()
) -> ScoreSequence:
    """Score onsets from a MIDI file, positions in quarter-note beats.

    Note-ons of all tracks are merged; ``skip_channels`` takes 0-based
    channel numbers (9 is the General MIDI percussion channel).
    """
    mid = _read_midi(path)
    division = mid.ticks_per_beat
    notes = [
        (tick / division, pitch)
        for track in mid.tracks
        for tick, pitch in _note_ons(track, skip_channels)
    ]
    return group_onsets(notes, merge_eps)


def load_performance_midi(
    path: PathLike, skip_channels: Sequence[int] = ()
) -> PerformanceStream:
    """Performed notes from a MIDI file, onsets in seconds.

    Ticks are converted through the file's tempo map (120 qpm until the
    first tempo event). Simultaneous notes are ordered by pitch.
    """
    mid = _read_midi(path)
    notes = []
    now = 0.0
    try:
        # iterating a MidiFile merges tracks and yields delta times in seconds
        for msg in mid:
            now += msg.time
            if (
                msg.type == "note_on"
                and msg.velocity > 0
                and msg.channel not in skip_channels
            ):
                notes.append((now, msg.note))
    except (ValueError, TypeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    notes.sort()
    return PerformanceStream(tuple(PerformanceNote(p, t) for t, p in notes))


def _records(text: str, n_fields: int):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != n_fields:
            raise ParseError(f"expected {n_fields} tab-separated fields, got {len(fields)}", lineno)
        yield lineno, [f.strip() for f in fields]


def _number(text: str, lineno: int, kind=float):
    try:
        return kind(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", lineno) from None


def parse_tsv(text: str, kind: str, merge_eps: float = 0.0):
    """Parse fixture text; see :func:`load_tsv`."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    try:
        if kind == "score":
            notes = []
            for lineno, (beats, pitches) in _records(text, 2):
                b = _number(beats, lineno)
                for p in pitches.split(","):
                    notes.append((b, _number(p.strip(), lineno, int)))
            return group_onsets(notes, merge_eps)
        if kind == "performance":
            return PerformanceStream(
                tuple(
                    PerformanceNote(_number(p, lineno, int), _number(t, lineno))
                    for lineno, (t, p) in _records(text, 2)
                )
            )
        return GroundTruthAlignment(
            tuple(
                (_number(b, lineno), _number(t, lineno))
                for lineno, (b, t) in _records(text, 2)
            )
        )
    except ValidationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ValidationError(str(exc)) from exc


def load_tsv(path: PathLike, kind: str, merge_eps: float = 0.0):
    """Load a score, performance or alignment fixture.

    Scores are regrouped by onset, so line order does not matter and
    repeated onsets are merged. Performances and alignments are validated
    as given.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return parse_tsv(text, kind, merge_eps)


def format_tsv(obj) -> str:
    """Serialise a score, performance or alignment to fixture text."""
    if isinstance(obj, ScoreSequence):
        lines = [
            f"{o.onset_b!r}\t{','.join(str(p) for p in sorted(o.pitch_set))}" for o in obj
        ]
    elif isinstance(obj, PerformanceStream):
        lines = [f"{n.onset_s!r}\t{n.pitch}" for n in obj]
    elif isinstance(obj, GroundTruthAlignment):
        lines = [f"{b!r}\t{t!r}" for b, t in obj.pairs]
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")
    return "".join(line + "\n" for line in lines)


def save_tsv(obj, path: PathLike) -> None:
    Path(path).write_text(format_tsv(obj), encoding="utf-8")


def load_score(path: PathLike, merge_eps: float = 0.0) -> ScoreSequence:
    """Score from a MIDI file or a TSV fixture, chosen by file suffix."""
    if Path(path).suffix.lower() in MIDI_SUFFIXES:
        return load_score_midi(path, merge_eps)
    return load_tsv(path, "score", merge_eps)


def load_performance(path: PathLike) -> PerformanceStream:
    """Performance from a MIDI file or a TSV fixture, chosen by file suffix."""
    if Path(path).suffix.lower() in MIDI_SUFFIXES:
        return load_performance_midi(path)
    return load_tsv(path, "performance")
