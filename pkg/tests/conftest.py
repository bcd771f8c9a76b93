import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from symtrack.model import PerformanceStream, ScoreSequence  # noqa: E402


def random_pair(rng: random.Random, max_onsets=30, max_notes=40):
    """Small random score and an unrelated random performance."""
    n = rng.randint(1, max_onsets)
    m = rng.randint(1, max_notes)
    beats = sorted(rng.sample(range(200), n))
    score = ScoreSequence.from_pairs(
        (set(rng.sample(range(55, 70), rng.randint(1, 3))), b * 0.5) for b in beats
    )
    times = sorted(round(rng.uniform(0, 20), rng.choice([1, 3, 6])) for _ in range(m))
    perf = PerformanceStream.from_pairs((rng.randint(55, 70), t) for t in times)
    return score, perf


def rendered(score, spq=0.5):
    """Every pitch of every onset, exactly on time, chord notes by pitch."""
    return PerformanceStream.from_pairs(
        (p, o.onset_b * spq) for o in score for p in sorted(o.pitch_set)
    )


@pytest.fixture
def small_score():
    return ScoreSequence.from_pairs(
        [({60}, 0.0), ({62, 65}, 1.0), ({64}, 2.0), ({65}, 2.5), ({67, 71}, 3.0), ({72}, 4.0)]
    )


_acceptance_lines = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_lines):
            terminalreporter.write_line(line)
