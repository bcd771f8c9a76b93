"""Real-time symbolic score following.

A performed note stream (MIDI pitch and onset in seconds) is aligned online
to a score of pitch sets (onsets in quarter-note beats) with a windowed,
tempo-aware variant of online time warping.
"""

__version__ = "0.1.0"

from .distance import PairwiseResult, local_distance, pairwise_distance
from .errors import (
    DegenerateTempoCurve,
    EmptyPitchSet,
    EmptyScore,
    NoMatches,
    NoMatchYet,
    NonIncreasingOnsets,
    OutOfOrderInput,
    ParseError,
    SessionEnded,
    SinkClosed,
    SymtrackError,
    UnsupportedDivision,
    ValidationError,
)
from .evaluation import (
    DatasetReport,
    PieceReport,
    dataset_report,
    piece_report,
    predicted_times,
)
from .ingest import (
    format_tsv,
    load_performance,
    load_performance_midi,
    load_score,
    load_score_midi,
    load_tsv,
    parse_tsv,
    save_tsv,
)
from .model import (
    MatchEvent,
    PerformanceNote,
    PerformanceStream,
    ScoreOnset,
    ScoreSequence,
    TrackerConfig,
    validate_performance,
    validate_score,
)
from .stream_sim import (
    GroundTruthAlignment,
    TempoCurve,
    random_score,
    random_tempo_curve,
    replay,
    synthesize,
)
from .tracker import OnlineTracker, track

__all__ = [
    "__version__",
    "DatasetReport",
    "DegenerateTempoCurve",
    "EmptyPitchSet",
    "EmptyScore",
    "GroundTruthAlignment",
    "MatchEvent",
    "NoMatchYet",
    "NoMatches",
    "NonIncreasingOnsets",
    "OnlineTracker",
    "OutOfOrderInput",
    "PairwiseResult",
    "ParseError",
    "PerformanceNote",
    "PerformanceStream",
    "PieceReport",
    "ScoreOnset",
    "ScoreSequence",
    "SessionEnded",
    "SinkClosed",
    "SymtrackError",
    "TempoCurve",
    "TrackerConfig",
    "UnsupportedDivision",
    "ValidationError",
    "dataset_report",
    "format_tsv",
    "load_performance",
    "load_performance_midi",
    "load_score",
    "load_score_midi",
    "load_tsv",
    "local_distance",
    "pairwise_distance",
    "parse_tsv",
    "piece_report",
    "predicted_times",
    "random_score",
    "random_tempo_curve",
    "replay",
    "save_tsv",
    "synthesize",
    "track",
    "validate_performance",
    "validate_score",
]
