import itertools

import pytest
from hypothesis import given, strategies as st

from symtrack.distance import local_distance, pairwise_distance
from symtrack.model import PerformanceNote, ScoreOnset, TrackerConfig

CFG = TrackerConfig(c=2.0, d=0.1, t_init_spq=0.5)
EXACT = dict(rel=0, abs=1e-12)


def test_on_tempo_in_set_note_costs_nothing():
    pd, ts = pairwise_distance(
        ScoreOnset({62}, 1.0), ScoreOnset({60}, 0.0),
        PerformanceNote(62, 10.5), PerformanceNote(60, 10.0), 0.5, CFG,
    )
    assert pd == 0.0
    assert ts == pytest.approx(0.5, **EXACT)


def test_wrong_pitch_and_late_onset():
    pd, ts = pairwise_distance(
        ScoreOnset({62}, 1.0), ScoreOnset({60}, 0.0),
        PerformanceNote(63, 10.6), PerformanceNote(60, 10.0), 0.5, CFG,
    )
    # e^P = 1, e^T = 0.1, t_c = 0.6
    assert pd == pytest.approx(1.2, **EXACT)
    assert ts == pytest.approx(0.6 * 0.1 + 0.9 * 0.5, **EXACT)
    assert ts == pytest.approx(0.51, **EXACT)


def test_chord_branch_uses_additive_update():
    chord = ScoreOnset({60, 64}, 2.0)
    pd, ts = pairwise_distance(
        chord, chord, PerformanceNote(64, 11.02), PerformanceNote(60, 11.0), 0.5, CFG
    )
    assert ts == pytest.approx(0.502, **EXACT)
    # e^T = |11.0 - 11.02|, pitch in set
    assert pd == pytest.approx(2.0 * 0.02, **EXACT)


def test_faithful_line6_uses_sum_of_onsets():
    cfg = TrackerConfig(faithful_line6=True)
    _, ts = pairwise_distance(
        ScoreOnset({62}, 1.0), ScoreOnset({60}, 0.0),
        PerformanceNote(62, 1.5), PerformanceNote(60, 1.0), 0.5, cfg,
    )
    assert ts == pytest.approx(min(2.5 * 0.1 + 0.9 * 0.5, cfg.tempo_max), **EXACT)


@pytest.mark.parametrize("perf_ioi, expected", [(1e-6, 0.05), (1000.0, 5.0)])
def test_tempo_is_clamped(perf_ioi, expected):
    cfg = TrackerConfig(d=1.0)
    _, ts = local_distance(True, 1.0, 0.0, perf_ioi, 0.0, 0.5, cfg.c, cfg.d, cfg.tempo_min, cfg.tempo_max)
    assert ts == expected


def test_ema_converges_geometrically():
    # constant observed tempo v: |t_n - v| = (1 - d)^n |t_0 - v|
    d, v, t = 0.1, 0.8, 0.5
    t0 = t
    for n in range(1, 21):
        _, t = local_distance(True, float(n), float(n - 1), n * v, (n - 1) * v, t, 1.0, d, 0.05, 5.0)
        assert abs(t - v) == pytest.approx((1 - d) ** n * abs(t0 - v), rel=0, abs=1e-12)


beats = st.floats(0, 100, allow_nan=False)
times = st.floats(0, 1000, allow_nan=False)
tempi = st.floats(0.05, 5.0)


@given(st.booleans(), beats, beats, times, times, tempi, st.floats(0, 10), st.floats(0.01, 1))
def test_distance_non_negative_and_tempo_clamped(in_set, a1, a2, b1, b2, t, c, d):
    a_prev, a_cur = sorted((a1, a2))
    pd, ts = local_distance(in_set, a_cur, a_prev, b2, b1, t, c, d, 0.05, 5.0)
    assert pd >= 0
    assert 0.05 <= ts <= 5.0


@given(st.booleans(), beats, beats, times, times, tempi, st.floats(0.01, 10))
def test_zero_distance_iff_in_set_and_on_time(in_set, a1, a2, b1, b2, t, c):
    a_prev, a_cur = sorted((a1, a2))
    pd, _ = local_distance(in_set, a_cur, a_prev, b2, b1, t, c, 0.1, 0.05, 5.0)
    expected = b1 + (a_cur - a_prev) * t
    assert (pd == 0) == (in_set and expected == b2)


@given(st.booleans(), beats, beats, times, times, tempi, st.floats(0, 5), st.floats(0.01, 5))
def test_distance_strictly_increasing_in_c(in_set, a1, a2, b1, b2, t, c, dc):
    a_prev, a_cur = sorted((a1, a2))
    args = (in_set, a_cur, a_prev, b2, b1, t)
    time_err = abs(b1 + (a_cur - a_prev) * t - b2)
    if time_err < 1e-6:
        return
    low, _ = local_distance(*args, c, 0.1, 0.05, 5.0)
    high, _ = local_distance(*args, c + dc, 0.1, 0.05, 5.0)
    assert high > low


@given(st.sets(st.integers(0, 127), min_size=1, max_size=6), st.integers(0, 127))
def test_pitch_set_order_irrelevant(pitches, pitch):
    prev = ScoreOnset({60}, 0.0)
    results = set()
    for perm in itertools.islice(itertools.permutations(sorted(pitches)), 24):
        results.add(pairwise_distance(
            ScoreOnset(list(perm), 1.0), prev,
            PerformanceNote(pitch, 1.4), PerformanceNote(60, 1.0), 0.5, CFG,
        ))
    assert len(results) == 1
