import json

import pytest

from symtrack.cli import grid_table, main, parse_config, parse_grid, read_manifest
from symtrack.errors import ParseError
from symtrack.ingest import save_tsv
from symtrack.model import TrackerConfig
from symtrack.stream_sim import TempoCurve, random_score, synthesize


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


@pytest.fixture
def pair(tmp_path):
    score = write(tmp_path / "s.tsv", "0\t60\n1\t62\n")
    perf = write(tmp_path / "p.tsv", "0.0\t60\n0.5\t62\n")
    return score, perf


@pytest.fixture
def corpus(tmp_path):
    lines = []
    for k in range(3):
        score = random_score(60, seed=k)
        perf, gt = synthesize(score, TempoCurve.constant(0.5), seed=k)
        names = [f"{k}.{kind}.tsv" for kind in ("score", "perf", "align")]
        for obj, name in zip((score, perf, gt), names):
            save_tsv(obj, tmp_path / name)
        lines.append("\t".join(names))
    return write(tmp_path / "manifest.tsv", "\n".join(lines) + "\n")


def read_lines(path):
    return [json.loads(l) for l in open(path, encoding="utf-8")]


def test_track_two_onsets(pair, tmp_path):
    out = tmp_path / "out.jsonl"
    assert main(["track", "--score", pair[0], "--perf", pair[1], "--out", str(out)]) == 0
    recs = read_lines(out)
    assert [r["score_index"] for r in recs] == [0, 1]
    assert set(recs[0]) == {
        "perf_index", "score_index", "perf_onset_s", "score_beats", "tempo_spq", "wallclock_s",
    }


def test_track_lookahead(pair, tmp_path):
    out = tmp_path / "out.jsonl"
    argv = ["track", "--score", pair[0], "--perf", pair[1], "--lookahead-ms", "174", "--out", str(out)]
    assert main(argv) == 0
    recs = read_lines(out)
    assert recs[0]["extrapolated_beats"] == pytest.approx(0.174 / 0.5)
    assert recs[1]["extrapolated_beats"] == 1.0  # clipped to the last onset


def test_track_realtime(pair, tmp_path):
    out = tmp_path / "out.jsonl"
    argv = ["track", "--realtime", "--score", pair[0], "--perf", pair[1], "--out", str(out)]
    assert main(argv) == 0
    recs = read_lines(out)
    assert [r["score_index"] for r in recs] == [0, 1]
    assert recs[1]["wallclock_s"] >= 0.45


def test_missing_file(tmp_path, pair, capsys):
    argv = ["track", "--score", str(tmp_path / "nope.tsv"), "--perf", pair[1], "--out", str(tmp_path / "o")]
    assert main(argv) == 1
    assert "nope.tsv" in capsys.readouterr().err


def test_empty_score(tmp_path, pair):
    empty = write(tmp_path / "empty.tsv", "# nothing\n")
    argv = ["track", "--score", empty, "--perf", pair[1], "--out", str(tmp_path / "o")]
    assert main(argv) == 2


def test_session_ended(tmp_path, pair):
    perf = write(tmp_path / "long.tsv", "".join(f"{0.5 * k}\t62\n" for k in range(30)))
    out = tmp_path / "o"
    assert main(["track", "--score", pair[0], "--perf", perf, "--out", str(out)]) == 3
    # every note matches the final onset, so the session stops after w of them
    assert len(read_lines(out)) == TrackerConfig().w


def test_eval_zero_noise(corpus, tmp_path):
    out = tmp_path / "report.json"
    assert main(["eval", "--manifest", corpus, "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["robustness"] == 100.0
    assert list(report["precision"].values()) == [100.0] * 5
    assert [p["status"] for p in report["pieces"]] == ["ok"] * 3


def test_eval_unreadable_piece(corpus, tmp_path):
    with open(corpus, "a", encoding="utf-8") as fh:
        fh.write("missing.tsv\t0.perf.tsv\t0.align.tsv\n")
    out = tmp_path / "report.json"
    assert main(["eval", "--manifest", corpus, "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert [p["status"] for p in report["pieces"]] == ["ok"] * 3 + ["error"]
    assert report["n_pieces"] == 3 and report["n_errors"] == 1


def test_grid_twelve_configurations(corpus, tmp_path):
    grid = write(tmp_path / "grid.txt", "w=10,20\nc=0.5,1.0,2.0\ndw0=1,2\n")
    out = tmp_path / "grid.tsv"
    assert main(["grid", "--manifest", corpus, "--grid", grid, "--out", str(out)]) == 0
    rows = [l.split("\t") for l in out.read_text().splitlines()]
    assert all(len(r) == 13 for r in rows)
    assert [r[0] for r in rows[:4]] == ["w", "c", "dw0", "robustness"]
    assert len(rows) == 4 + 5
    assert len(json.loads(out.with_suffix(".json").read_text())["results"]) == 12


def test_singleton_grid_matches_eval(corpus, tmp_path):
    grid = write(tmp_path / "grid.txt", "w=20\n")
    assert main(["grid", "--manifest", corpus, "--grid", grid, "--out", str(tmp_path / "g.tsv")]) == 0
    assert main(["eval", "--manifest", corpus, "--out", str(tmp_path / "e.json")]) == 0
    from_grid = json.loads((tmp_path / "g.json").read_text())["results"][0]
    assert from_grid == json.loads((tmp_path / "e.json").read_text())


def test_grid_empty_axis(corpus, tmp_path):
    grid = write(tmp_path / "grid.txt", "w=10,20\nc=\n")
    assert main(["grid", "--manifest", corpus, "--grid", grid, "--out", str(tmp_path / "g.tsv")]) == 1


def synth_args(score, tmp_path, tag, *extra):
    return [
        "synth", "--score", score, "--tempo-curve", "0.5", "--seed", "7",
        "--out-perf", str(tmp_path / f"{tag}.perf.tsv"),
        "--out-align", str(tmp_path / f"{tag}.align.tsv"), *extra,
    ]


def test_synth_zero_noise(pair, tmp_path):
    assert main(synth_args(pair[0], tmp_path, "a")) == 0
    assert (tmp_path / "a.perf.tsv").read_text() == "0.0\t60\n0.5\t62\n"
    assert (tmp_path / "a.align.tsv").read_text() == "0.0\t0.0\n1.0\t0.5\n"


def test_synth_same_seed_identical(tmp_path):
    score = tmp_path / "s.tsv"
    save_tsv(random_score(100, seed=3), score)
    noise = ["--jitter-ms", "20", "--chord-spread-ms", "10", "--insert-rate", "0.1", "--delete-rate", "0.1"]
    for tag in ("a", "b"):
        assert main(synth_args(str(score), tmp_path, tag, *noise)) == 0
    for kind in ("perf", "align"):
        assert (tmp_path / f"a.{kind}.tsv").read_bytes() == (tmp_path / f"b.{kind}.tsv").read_bytes()


def test_synth_rejects_bad_rate(pair, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(synth_args(pair[0], tmp_path, "a", "--insert-rate", "2.0"))
    assert exc.value.code == 1


def test_config_parsing():
    cfg = parse_config("# tuned\nw = 40\nc=1.0\nt_init=0.6\n")
    assert (cfg.w, cfg.c, cfg.t_init_spq, cfg.d) == (40, 1.0, 0.6, 0.1)
    with pytest.raises(ParseError, match="line 1"):
        parse_config("window=3\n")
    with pytest.raises(ParseError):
        parse_config("w=ten\n")


def test_grid_parsing_keeps_axis_order():
    axes = parse_grid("dw0=1,2\nw=10\n")
    assert list(axes) == ["dw0", "w"] and axes["dw0"] == [1.0, 2.0]


def test_manifest_paths_relative_to_manifest(corpus, tmp_path):
    entries = read_manifest(corpus)
    assert entries[0][0] == str(tmp_path / "0.score.tsv")


def test_grid_table_marks_undefined_precision():
    result = {"config": {"w": 20}, "robustness": 0.0, "precision": None}
    table = grid_table({"w": [20]}, [result])
    assert "NA" in table and table.startswith("w\t20\n")
