"""Command-line front end.

Sub-commands::

    symtrack track  --score S --perf P --out matches.jsonl
    symtrack eval   --manifest M --out report.json
    symtrack grid   --manifest M --grid G --out table.tsv
    symtrack synth  --score S --out-perf P --out-align A
    symtrack corpus --out-dir DIR

Exit codes: 0 success, 1 parse/usage/validation error, 2 empty score,
3 the tracker ended the session before the performance was consumed.
"""

from __future__ import annotations

import argparse
import dataclasses
import itertools
import json
import logging
import queue
import sys
import threading
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import __version__
from .errors import (
    EmptyScore,
    OutOfOrderInput,
    ParseError,
    SessionEnded,
    SinkClosed,
    SymtrackError,
    ValidationError,
)
from .evaluation import (
    THRESHOLDS_S,
    dataset_report,
    piece_report,
    predicted_times,
)
from .ingest import load_performance, load_score, load_tsv, save_tsv
from .model import TrackerConfig
from .stream_sim import (
    TempoCurve,
    random_score,
    random_tempo_curve,
    replay,
    synthesize,
)
from .tracker import OnlineTracker, track

log = logging.getLogger("symtrack")

EXIT_OK, EXIT_PARSE, EXIT_EMPTY, EXIT_ENDED = 0, 1, 2, 3

CONFIG_KEYS = {
    "w": int,
    "c": float,
    "dw0": float,
    "dw1": float,
    "dw2": float,
    "d": float,
    "t_init_spq": float,
    "tempo_min": float,
    "tempo_max": float,
    "faithful_line6": lambda v: {"true": True, "false": False, "1": True, "0": False}[v.lower()],
}
KEY_ALIASES = {"t_init": "t_init_spq"}


class UsageError(SymtrackError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which is reserved for empty scores
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _convert(key: str, value: str):
    key = KEY_ALIASES.get(key, key)
    if key not in CONFIG_KEYS:
        raise ParseError(f"unknown parameter {key!r}")
    try:
        return key, CONFIG_KEYS[key](value)
    except (ValueError, KeyError):
        raise ParseError(f"bad value {value!r} for {key}") from None


def parse_config(text: str, base: Optional[TrackerConfig] = None) -> TrackerConfig:
    """``key = value`` lines over the defaults; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected key=value", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            key, values[key] = _convert(key, value)
        except ParseError as exc:
            raise ParseError(str(exc), lineno) from None
    return dataclasses.replace(base or TrackerConfig(), **values)


def load_config(path: Optional[str]) -> TrackerConfig:
    if path is None:
        return TrackerConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def parse_grid(text: str) -> Dict[str, list]:
    """One ``key=v1,v2,...`` line per axis, in output order."""
    axes: Dict[str, list] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"grid line {lineno}: expected key=v1,v2,...")
        key, values = (part.strip() for part in line.split("=", 1))
        items = [v.strip() for v in values.split(",") if v.strip()]
        if not items:
            raise UsageError(f"grid line {lineno}: axis {key!r} has no values")
        try:
            converted = [_convert(key, v) for v in items]
        except ParseError as exc:
            raise UsageError(f"grid line {lineno}: {exc}") from None
        axes[converted[0][0]] = [v for _, v in converted]
    if not axes:
        raise UsageError("grid file defines no axes")
    return axes


def read_manifest(path: str) -> List[tuple]:
    """``score<TAB>performance<TAB>alignment`` per line, relative to the
    manifest's directory."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read manifest {path}: {exc}") from exc
    root = Path(path).parent
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split("\t")]
        if len(fields) != 3:
            raise ParseError("expected score, performance and alignment paths", lineno)
        entries.append(tuple(str(root / f) for f in fields))
    return entries


def _config_dict(cfg: TrackerConfig) -> dict:
    return dataclasses.asdict(cfg)


def run_piece(entry: tuple, cfg: TrackerConfig) -> dict:
    """Track and score one manifest entry; failures become an error record."""
    score_path, perf_path, align_path = entry
    record = {"score": score_path, "performance": perf_path, "alignment": align_path}
    try:
        score = load_score(score_path)
        perf = load_performance(perf_path)
        gt = load_tsv(align_path, "alignment")
        matches = track(score, perf, cfg)
        report = piece_report(predicted_times(matches, score, gt), gt)
    except (SymtrackError, OSError) as exc:
        record.update(status="error", error=f"{type(exc).__name__}: {exc}")
        return record
    record.update(
        status="ok",
        n_notes=len(perf),
        n_matched=len(matches),
        session_ended=len(matches) < len(perf),
        **report.to_dict(),
    )
    record["_report"] = report
    return record


def _run_piece_args(args):
    return run_piece(*args)


def evaluate_manifest(entries: Sequence[tuple], cfg: TrackerConfig, jobs: int = 1) -> dict:
    """Dataset report as a JSON-ready dict; pieces stay in manifest order."""
    work = [(e, cfg) for e in entries]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            pieces = list(pool.map(_run_piece_args, work))
    else:
        pieces = [run_piece(*w) for w in work]
    reports = [p.pop("_report") for p in pieces if p["status"] == "ok"]
    out = {"config": _config_dict(cfg)}
    if reports:
        out.update(dataset_report(reports).to_dict())
    else:
        out.update(n_pieces=0, n_lost=0, robustness=None, precision=None)
    out["n_errors"] = sum(p["status"] == "error" for p in pieces)
    out["pieces"] = pieces
    return out


def _dump_json(obj, path: str) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# -- commands -----------------------------------------------------------------


def cmd_track(args) -> int:
    cfg = load_config(args.config)
    score = load_score(args.score)
    perf = load_performance(args.perf)
    tracker = OnlineTracker(score, cfg)
    lookahead = None if args.lookahead_ms is None else args.lookahead_ms / 1000.0

    records = []
    ended = False
    start = time.perf_counter()

    def consume(note):
        m = tracker.step(note)
        rec = {
            "perf_index": m.perf_index,
            "score_index": m.score_index,
            "perf_onset_s": m.perf_onset_s,
            "score_beats": float(score.beats[m.score_index]),
            "tempo_spq": m.tempo,
            "wallclock_s": time.perf_counter() - start,
        }
        if lookahead is not None:
            rec["extrapolated_beats"] = tracker.extrapolate_position(lookahead)
        records.append(rec)

    try:
        if args.realtime:
            ended = _track_realtime(perf, consume)
        else:
            for note in perf:
                consume(note)
    except SessionEnded as exc:
        log.warning("%s", exc)
        ended = True

    with open(args.out, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    if ended and len(records) < len(perf):
        print(
            f"session ended after {len(records)} of {len(perf)} notes",
            file=sys.stderr,
        )
        return EXIT_ENDED
    return EXIT_OK


def _track_realtime(perf, consume) -> bool:
    """Feed ``consume`` from a real-time replay thread. Returns True if the
    tracker ended the session early."""
    notes: queue.Queue = queue.Queue()
    closed = threading.Event()
    done = object()

    def sink(note):
        if closed.is_set():
            raise SinkClosed("tracker stopped consuming")
        notes.put(note)

    def produce():
        try:
            replay(perf, sink, pacing="realtime")
        except SinkClosed:
            pass
        finally:
            notes.put(done)

    producer = threading.Thread(target=produce, daemon=True)
    producer.start()
    try:
        while True:
            note = notes.get()
            if note is done:
                return False
            consume(note)
    except SessionEnded:
        closed.set()
        raise
    finally:
        producer.join(timeout=0.1)


def cmd_eval(args) -> int:
    cfg = load_config(args.config)
    report = evaluate_manifest(read_manifest(args.manifest), cfg, args.jobs)
    _dump_json(report, args.out)
    print(_summary_line(report))
    return EXIT_OK


def _summary_line(report: dict) -> str:
    if report["robustness"] is None:
        return "no piece could be evaluated"
    prec = report["precision"]
    parts = [f"robustness {report['robustness']:.2f}%"]
    if prec is None:
        parts.append("precision undefined (all pieces lost)")
    else:
        parts += [f"<={float(t) * 1000:g}ms {v:.2f}%" for t, v in prec.items()]
    return ", ".join(parts)


def grid_table(axes: Dict[str, list], results: List[dict]) -> str:
    """TSV with one column per configuration: parameter rows, robustness,
    then precision from the loosest to the tightest threshold."""

    def fmt(v):
        return "NA" if v is None else f"{v:.2f}"

    rows = [[key] + [str(r["config"][key]) for r in results] for key in axes]
    rows.append(["robustness"] + [fmt(r["robustness"]) for r in results])
    for t in sorted(THRESHOLDS_S, reverse=True):
        cells = []
        for r in results:
            prec = r["precision"]
            cells.append(fmt(None if prec is None else prec[str(t)]))
        rows.append([f"% abs error <= {t:g} s"] + cells)
    return "".join("\t".join(row) + "\n" for row in rows)


def cmd_grid(args) -> int:
    try:
        axes = parse_grid(Path(args.grid).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read grid {args.grid}: {exc}") from exc
    base = load_config(args.config)
    entries = read_manifest(args.manifest)
    keys = list(axes)
    results = []
    for combo in itertools.product(*(axes[k] for k in keys)):
        cfg = dataclasses.replace(base, **dict(zip(keys, combo)))
        log.info("evaluating %s", dict(zip(keys, combo)))
        results.append(evaluate_manifest(entries, cfg, args.jobs))

    out = Path(args.out)
    tsv_path = out if out.suffix != ".json" else out.with_suffix(".tsv")
    tsv_path.write_text(grid_table(axes, results), encoding="utf-8")
    _dump_json({"axes": axes, "results": results}, str(tsv_path.with_suffix(".json")))
    print(f"{len(results)} configurations -> {tsv_path}")
    return EXIT_OK


def _rate(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return v


def _non_negative(text: str) -> float:
    v = float(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"{text} is negative")
    return v


def cmd_synth(args) -> int:
    score = load_score(args.score)
    curve = TempoCurve.parse(args.tempo_curve)
    perf, gt = synthesize(
        score,
        curve,
        jitter_sd_s=args.jitter_ms / 1000.0,
        chord_spread_sd_s=args.chord_spread_ms / 1000.0,
        insert_rate=args.insert_rate,
        delete_rate=args.delete_rate,
        seed=args.seed,
    )
    save_tsv(perf, args.out_perf)
    save_tsv(gt, args.out_align)
    return EXIT_OK


def cmd_corpus(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = []
    for k in range(args.pieces):
        seed = args.seed + k
        score = random_score(args.onsets, seed=seed)
        curve = random_tempo_curve(
            score.beats[-1], args.base_spq, args.tempo_variation, seed=seed
        )
        perf, gt = synthesize(
            score,
            curve,
            jitter_sd_s=args.jitter_ms / 1000.0,
            chord_spread_sd_s=args.chord_spread_ms / 1000.0,
            insert_rate=args.insert_rate,
            delete_rate=args.delete_rate,
            seed=seed,
        )
        names = [f"piece{k:03d}.{kind}.tsv" for kind in ("score", "perf", "align")]
        for obj, name in zip((score, perf, gt), names):
            save_tsv(obj, out / name)
        lines.append("\t".join(names))
    (out / "manifest.tsv").write_text("".join(l + "\n" for l in lines), encoding="utf-8")
    print(f"wrote {args.pieces} pieces to {out}")
    return EXIT_OK


def _noise_options(p, defaults=(0.0, 0.0, 0.0, 0.0)):
    p.add_argument("--jitter-ms", type=_non_negative, default=defaults[0])
    p.add_argument("--chord-spread-ms", type=_non_negative, default=defaults[1])
    p.add_argument("--insert-rate", type=_rate, default=defaults[2])
    p.add_argument("--delete-rate", type=_rate, default=defaults[3])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="symtrack", description="Symbolic real-time score following.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("track", help="track one performance, write JSON lines")
    p.add_argument("--score", required=True)
    p.add_argument("--perf", required=True)
    p.add_argument("--config")
    p.add_argument("--realtime", action="store_true", help="pace input at performance speed")
    p.add_argument("--lookahead-ms", type=_non_negative)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_track)

    for name, func, help_ in (
        ("eval", cmd_eval, "evaluate a manifest of pieces"),
        ("grid", cmd_grid, "evaluate a parameter grid over a manifest"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--manifest", required=True)
        if name == "grid":
            p.add_argument("--grid", required=True)
        p.add_argument("--config")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--out", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("synth", help="synthesise a performance of a score")
    p.add_argument("--score", required=True)
    p.add_argument("--tempo-curve", default="0.5", help='"spq" or "beat:spq,beat:spq,..."')
    _noise_options(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-perf", required=True)
    p.add_argument("--out-align", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("corpus", help="generate a synthetic evaluation corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--pieces", type=int, default=20)
    p.add_argument("--onsets", type=int, default=250)
    p.add_argument("--base-spq", type=float, default=0.5)
    p.add_argument("--tempo-variation", type=float, default=0.3)
    _noise_options(p, (20.0, 10.0, 0.05, 0.05))
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except EmptyScore as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except SessionEnded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENDED
    except (ParseError, ValidationError, UsageError, OutOfOrderInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
