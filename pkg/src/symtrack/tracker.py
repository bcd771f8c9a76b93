"""Event-driven online time warping over a sliding score window.

Every incoming performed note adds one column to the accumulated-cost
matrix, restricted to the rows (score onsets) of the current window. Each
cell keeps three quantities: the accumulated cost ``AC``, the tempo of the
best path reaching it ``T`` and that path's length ``PL``. A cell is
reached from one of three predecessors:

* score direction, ``(i - 1, j)``: the same note also accounts for the
  previous score onset;
* diagonal, ``(i - 1, j - 1)``;
* performance direction, ``(i, j - 1)``: several notes on one onset (chords).

The local cost of each step comes from the pitch/time metric in
:mod:`symtrack.distance`, evaluated against the step's own predecessor and
that predecessor's tempo, and is scaled by the step's direction weight.
The reported match for a note is the cell of the new column with the
lowest path-length-normalised cost.

Only the latest column is retained, so memory is O(w) and each step
updates at most ``w`` cells.
"""

from __future__ import annotations

import logging
import math
from typing import Iterable, List, Optional

import numpy as np

from .errors import NoMatchYet, OutOfOrderInput, SessionEnded
from .model import (
    MatchEvent,
    PerformanceNote,
    ScoreSequence,
    TrackerConfig,
)

log = logging.getLogger(__name__)

# onset regressions up to this size (seconds) are clamped, larger ones rejected
ORDER_TOLERANCE_S = 1e-3


class OnlineTracker:
    """Real-time tracker of a note stream against a fixed score.

    Parameters
    ----------
    score : ScoreSequence
    config : TrackerConfig, optional
        Defaults to ``TrackerConfig()``.
    record : bool
        Keep a copy of every computed column in :attr:`history` as
        ``(window_start, AC, T, PL)``. Meant for debugging and tests; it
        makes memory grow with the performance length.

    Examples
    --------
    >>> score = ScoreSequence.from_pairs([({60}, 0.0), ({62}, 1.0)])
    >>> tracker = OnlineTracker(score)
    >>> tracker.step(PerformanceNote(60, 0.0)).score_index
    0
    >>> tracker.step(PerformanceNote(62, 0.5)).score_index
    1
    """

    def __init__(
        self,
        score: ScoreSequence,
        config: Optional[TrackerConfig] = None,
        record: bool = False,
    ):
        if not isinstance(score, ScoreSequence):
            score = ScoreSequence(tuple(score))
        self.score = score
        self.config = config if config is not None else TrackerConfig()
        self.n = len(score)
        self.span = min(self.config.w, self.n)

        self._beats = np.asarray(score.beats, dtype=float)
        beats = self._beats.tolist()
        self._sets = [o.pitch_set for o in score]
        # score inter-onset interval into each onset; unused for onset 0
        self._ioi = [1.0] + [beats[i] - beats[i - 1] for i in range(1, self.n)]

        self.window_start = 0
        self.perf_count = 0
        self.last_match: Optional[MatchEvent] = None
        self._ac = self._t = self._pl = None
        self._col_start = 0
        self._prev_onset: Optional[float] = None
        self._tail_run = 0

        self.cells_last_step = 0
        self.cells_total = 0
        self.record = record
        self.history: List[tuple] = []

    @property
    def window(self) -> range:
        """Score indices covered by the window used for the next note."""
        return range(self.window_start, self.window_start + self.span)

    def current_position(self) -> Optional[MatchEvent]:
        return self.last_match

    def extrapolate_position(self, lookahead_s: float) -> float:
        """Score position in beats ``lookahead_s`` seconds after the last
        match, assuming the matched tempo holds. Clipped to the score."""
        if lookahead_s < 0:
            raise ValueError("lookahead_s must be >= 0")
        if self.last_match is None:
            raise NoMatchYet("no note has been matched yet")
        m = self.last_match
        beats = self._beats[m.score_index] + lookahead_s / m.tempo
        return float(min(max(beats, self._beats[0]), self._beats[-1]))

    def step(self, note: PerformanceNote) -> MatchEvent:
        """Consume one performed note and return its match."""
        onset = note.onset_s
        if self._prev_onset is not None and onset < self._prev_onset:
            if self._prev_onset - onset > ORDER_TOLERANCE_S:
                raise OutOfOrderInput(
                    f"note at {onset}s arrives after note at {self._prev_onset}s"
                )
            onset = self._prev_onset
        if self._tail_run >= self.config.w:
            raise SessionEnded(
                f"{self._tail_run} consecutive notes matched the final score onset"
            )

        if self.perf_count == 0:
            ac, tempo, pl = self._first_column(note.pitch, onset)
        else:
            ac, tempo, pl = self._next_column(note.pitch, onset)

        self._ac, self._t, self._pl = ac, tempo, pl
        self._col_start = self.window_start
        self.cells_last_step = len(ac)
        self.cells_total += len(ac)
        if self.record:
            self.history.append((self.window_start, self.AC, self.T, self.PL))

        # minimal normalised cost; ties go to the later onset
        r, best = 0, ac[0] / pl[0]
        for k in range(1, len(ac)):
            v = ac[k] / pl[k]
            if v <= best:
                r, best = k, v
        score_index = self.window_start + r
        match = MatchEvent(score_index, self.perf_count, note.onset_s, tempo[r])

        self.last_match = match
        self.perf_count += 1
        self._prev_onset = onset
        self._tail_run = self._tail_run + 1 if score_index == self.n - 1 else 0
        self._advance(score_index)
        return match

    @property
    def AC(self) -> Optional[np.ndarray]:
        """Accumulated cost of the latest column over the window it was
        computed on (:attr:`column_start` onwards)."""
        return None if self._ac is None else np.array(self._ac)

    @property
    def T(self) -> Optional[np.ndarray]:
        """Path tempo (s per quarter) of the latest column."""
        return None if self._t is None else np.array(self._t)

    @property
    def PL(self) -> Optional[np.ndarray]:
        """Path lengths of the latest column."""
        return None if self._pl is None else np.array(self._pl, dtype=int)

    @property
    def column_start(self) -> int:
        return self._col_start

    def _advance(self, score_index: int) -> None:
        # centre the window on the match; never move backwards
        target = min(score_index - self.config.w // 2, self.n - self.span)
        if target > self.window_start:
            self.window_start = target

    def _first_column(self, pitch: int, b: float):
        # only score-direction steps exist below (0, 0); the cell itself is
        # scored against a virtual predecessor with zero timing error
        cfg = self.config
        s, L = self.window_start, self.span
        sets, ioi = self._sets, self._ioi
        t0 = cfg.t_init_spq
        ac = [0.0 if pitch in sets[s] else 1.0]
        for i in range(s + 1, s + L):
            err = 0.0 if pitch in sets[i] else 1.0
            time_err = abs((b + ioi[i] * t0) - b)
            ac.append(cfg.dw0 * (err + cfg.c * time_err) + ac[-1])
        return ac, [t0] * L, [float(k) for k in range(1, L + 1)]

    def _next_column(self, pitch: int, b: float):
        cfg = self.config
        c, d, keep = cfg.c, cfg.d, 1.0 - cfg.d
        lo, hi = cfg.tempo_min, cfg.tempo_max
        dw0, dw1, dw2 = cfg.dw0, cfg.dw1, cfg.dw2
        faithful = cfg.faithful_line6
        s, L = self.window_start, self.span
        shift = s - self._col_start
        b_prev = self._prev_onset
        sets, ioi = self._sets, self._ioi
        ac_old, t_old, pl_old = self._ac, self._t, self._pl
        L_old = len(ac_old)
        inf = math.inf
        # timing error of a step along the performance axis is the same for all rows
        perf_time_err = abs(b_prev - b)
        diag_num = (b + b_prev) if faithful else (b - b_prev)
        up_num = (b + b) if faithful else (b - b)

        ac = [0.0] * L
        tempo = [0.0] * L
        pl = [0.0] * L
        for r in range(L):
            i = s + r
            err = 0.0 if pitch in sets[i] else 1.0
            k = r + shift  # same row in the previous column
            # diagonal
            if i > 0 and 0 < k <= L_old:
                t_dg = t_old[k - 1]
                best = dw1 * (err + c * abs((b_prev + ioi[i] * t_dg) - b)) + ac_old[k - 1]
                way = 1
            else:
                best, way = inf, -1
            # score direction
            if r:
                t_up = tempo[r - 1]
                dc = dw0 * (err + c * abs((b + ioi[i] * t_up) - b)) + ac[r - 1]
                if dc < best:
                    best, way = dc, 0
            # performance direction
            if k < L_old:
                t_pf = t_old[k]
                dc = dw2 * (err + c * perf_time_err) + ac_old[k]
                if dc < best:
                    best, way = dc, 2

            if way == 1:
                cur = diag_num / ioi[i]
                t_new = cur * d + keep * t_dg
                n_steps = pl_old[k - 1]
            elif way == 0:
                cur = up_num / ioi[i]
                t_new = cur * d + keep * t_up
                n_steps = pl[r - 1]
            else:
                cur = t_pf + b - b_prev
                t_new = cur * d + keep * t_pf
                n_steps = pl_old[k]
            if t_new < lo:
                t_new = lo
            elif t_new > hi:
                t_new = hi
            ac[r] = best
            tempo[r] = t_new
            pl[r] = n_steps + 1.0
        return ac, tempo, pl


def track(
    score: ScoreSequence,
    notes: Iterable[PerformanceNote],
    config: Optional[TrackerConfig] = None,
    stop_on_end: bool = True,
) -> List[MatchEvent]:
    """Run a fresh tracker over ``notes`` and collect the matches.

    With ``stop_on_end`` a :class:`SessionEnded` condition ends the run
    early instead of propagating.
    """
    tracker = OnlineTracker(score, config)
    matches = []
    for note in notes:
        try:
            matches.append(tracker.step(note))
        except SessionEnded:
            if not stop_on_end:
                raise
            log.info("session ended after %d notes", tracker.perf_count)
            break
    return matches
