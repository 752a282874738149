from __future__ import annotations

import csv
import dataclasses
import json
import math
import sys
from pathlib import Path

import pytest

from epistom.cli import (
    COMPARE_COLUMNS,
    SCORE_COLUMNS,
    InputError,
    RunConfig,
    StatementRow,
    accuracy,
    emit,
    load_statements,
    main,
    parse_judgment_points,
    resolve_scenario,
    run_context_comparison,
    run_scenario,
)
from epistom.elot import parse_elot
from epistom.translator import fixture_backend

from statements import blue_key

MOCK = Path(__file__).with_name("mock_translator.py")
MUST3 = f"believes(player, must({blue_key(3)}))"
MORE12 = f"believes(player, more(likely, {blue_key(1)}, {blue_key(2)}))"
TAUT = "or(believes(player, formula(empty(box1))), not(believes(player, formula(empty(box1)))))"

DEGENERATE = """\
name: deg
map: |
  #######
  #g#..g#
  #D#...#
  #.....#
  #1.@..#
  #######
doors: [red]
contents: {box1: blue}
rules: {key_colors: [red], max_hidden: 1, require_solvable: false}
actions: left open_box(1)
"""


def write_statements(path: Path, rows) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "tense", "elot", "sentence"])
        w.writerows(rows)
    return path


@pytest.fixture
def stmts(tmp_path):
    return write_statements(tmp_path / "s.csv", [
        ("must3", "initial", MUST3, ""),
        ("more12", "current", MORE12, ""),
        ("taut", "current", TAUT, ""),
    ])


def rows(statements):
    return [StatementRow(i, tense, [(parse_elot(text), 1.0)]) for i, tense, text in statements]


def data_rows(text: str):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.DictReader(lines))


def test_emit_header_and_empty_table():
    assert emit([], "csv") == (",".join(SCORE_COLUMNS) + "\n").encode()
    assert emit([], "jsonl") == b""
    out = emit([], "csv", {"beta": 1.0}).decode().splitlines()
    assert out[0] == '# config: {"beta": 1.0}'
    assert out[1] == ",".join(SCORE_COLUMNS)


def test_emit_float_format_and_jsonl_rows():
    table = [dict(scenario="a", statement="s", judgment_point="p", t=1, posterior=1 / 3,
                  normalized_likelihood=None, variant="full")] * 3
    text = emit(table, "csv").decode()
    assert "0.333333333" in text and "0.3333333333" not in text
    assert len(data_rows(text)) == 3
    lines = emit(table, "jsonl", {"k": 3}).decode().splitlines()
    assert json.loads(lines[0]) == {"config": {"k": 3}}
    assert len(lines) - 1 == 3
    assert list(json.loads(lines[1])) == list(SCORE_COLUMNS)
    with pytest.raises(ValueError):
        emit(table, "xml")


def test_run_scenario_three_boxes_directions():
    sc = resolve_scenario("three_boxes")
    table = run_scenario(sc, rows([("must3", "initial", MUST3), ("more12", "current", MORE12)]))
    must = {r["judgment_point"]: r["normalized_likelihood"] for r in table if r["statement"] == "must3"}
    more = {r["judgment_point"]: r["normalized_likelihood"] for r in table if r["statement"] == "more12"}
    assert must["start"] == pytest.approx(0.5)
    assert must["at_box3"] > must["start"]
    assert more["past_box2"] > 0.8 > more["approaching_box3"]
    goals = [r for r in table if r["statement"].startswith("goal:")]
    assert len(goals) == 4 * (sc.T + 1)
    for t in range(sc.T + 1):
        assert math.fsum(r["posterior"] for r in goals if r["t"] == t) == pytest.approx(1.0)


def test_tautology_scores_one_everywhere():
    table = run_scenario(resolve_scenario("three_boxes"), rows([("taut", "current", TAUT)]))
    for r in table:
        if r["statement"] == "taut":
            assert r["posterior"] == 1.0 and r["normalized_likelihood"] == 1.0


def test_no_statements_gives_goal_rows_only():
    sc = resolve_scenario("corridor")
    table = run_scenario(sc, [])
    assert table and all(r["statement"].startswith("goal:") for r in table)


def test_judgment_point_equals_truncated_run():
    sc = resolve_scenario("three_boxes")
    statements = rows([("must3", "initial", MUST3), ("more12", "current", MORE12)])
    full = run_scenario(sc, statements)
    for label, tau in sc.points().items():
        short = dataclasses.replace(sc, actions=sc.actions[:tau], judgment_points={label: tau})
        got = {r["statement"]: r for r in run_scenario(short, statements) if not r["statement"].startswith("goal:")}
        for r in full:
            if r["judgment_point"] == label and r["statement"] in got:
                assert got[r["statement"]]["normalized_likelihood"] == r["normalized_likelihood"]
                assert got[r["statement"]]["posterior"] == r["posterior"]


def test_judgment_point_parsing():
    assert parse_judgment_points("start=0, mid=5") == {"start": 0, "mid": 5}
    assert parse_judgment_points("0,5") == {"t0": 0, "t5": 5}
    for bad in ("", "a=b", ","):
        with pytest.raises(InputError):
            parse_judgment_points(bad)
    with pytest.raises(InputError):
        run_scenario(resolve_scenario("three_boxes"), [], judgment_points={"late": 99})


def test_load_statements_errors(tmp_path):
    path = write_statements(tmp_path / "a.csv", [("x", "current", MUST3, ""), ("x", "current", MUST3, "")])
    with pytest.raises(InputError, match=r"a\.csv:3"):
        load_statements(path)
    path = write_statements(tmp_path / "b.csv", [("x", "soon", MUST3, "")])
    with pytest.raises(InputError, match="tense"):
        load_statements(path)
    path = write_statements(tmp_path / "c.csv", [("x", "current", MUST3, "also a sentence")])
    with pytest.raises(InputError, match="exactly one"):
        load_statements(path)
    path = write_statements(tmp_path / "d.csv", [("x", "current", "believes(player, empty(box1))", "")])
    with pytest.raises(InputError, match=r"d\.csv:2"):
        load_statements(path)
    path = write_statements(tmp_path / "e.csv", [("x", "current", "", "Some sentence.")])
    with pytest.raises(InputError, match="backend"):
        load_statements(path)


def test_load_statements_translates_sentences(tmp_path):
    sentence = "The player initially expected to find a key in box 3."
    path = write_statements(tmp_path / "s.csv", [("x", "initial", "", sentence)])
    top = load_statements(path, fixture_backend())
    assert len(top[0].candidates) == 1 and top[0].candidates[0][1] == 1.0
    mix = load_statements(path, fixture_backend(), mixture=True)
    assert len(mix[0].candidates) == 2
    assert math.fsum(w for _, w in mix[0].candidates) == pytest.approx(1.0)


def test_context_comparison():
    statements = rows([("must3", "initial", MUST3), ("taut", "current", TAUT)])
    pairs = [(statements[0], "three_boxes", ["three_boxes_box2"]), (statements[1], "three_boxes", ["three_boxes_box2", "three_boxes_direct"])]
    table = run_context_comparison(pairs)
    by_id = {r["statement"]: r for r in table}
    assert list(table[0]) == list(COMPARE_COLUMNS)
    assert by_id["taut"]["difference"] == 0.0 and by_id["taut"]["accurate"] == 0
    for r in table:
        assert r["accurate"] == int(r["in_context"] > r["out_of_context"])
        assert r["difference"] == pytest.approx(r["in_context"] - r["out_of_context"])
    assert accuracy(table) == sum(r["accurate"] for r in table) / 2
    assert accuracy([]) == 0.0


def test_accuracy_hand_count():
    table = [{"accurate": a} for a in (1, 0, 1, 1, 0, 0, 0, 1)]
    assert accuracy(table) == 0.5


def test_main_run_is_deterministic(tmp_path, stmts):
    outs = []
    for i in range(2):
        out = tmp_path / f"out{i}.csv"
        assert main(["run", "three_boxes", "--statements", str(stmts), "-o", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    text = outs[0].decode()
    config = json.loads(text.splitlines()[0][len("# config: "):])
    assert config["k"] == 3 and config["variant"] == "full" and config["prior"] == "statement"
    assert config["thresholds"]["must"] == 0.95 and config["beta"] == pytest.approx(2 ** 1.5)
    assert text.splitlines()[1] == ",".join(SCORE_COLUMNS)


def test_main_jsonl_matches_csv(tmp_path, stmts):
    a, b = tmp_path / "a.csv", tmp_path / "b.jsonl"
    main(["run", "three_boxes", "--statements", str(stmts), "-o", str(a), "--no-config"])
    main(["run", "three_boxes", "--statements", str(stmts), "-o", str(b), "--format", "jsonl"])
    csv_rows = data_rows(a.read_text())
    json_rows = [json.loads(l) for l in b.read_text().splitlines()[1:]]
    assert len(csv_rows) == len(json_rows)
    assert [r["statement"] for r in csv_rows] == [r["statement"] for r in json_rows]


def test_main_flags(tmp_path, stmts):
    th = tmp_path / "th.yaml"
    th.write_text("must: 0.9\n")
    out = tmp_path / "o.csv"
    assert main(["run", "three_boxes", "--statements", str(stmts), "--thresholds", str(th), "-k", "2",
                 "--variant", "true_belief", "--prior", "worlds", "--judgment-points", "0,6", "-o", str(out)]) == 0
    text = out.read_text()
    assert '"must": 0.9' in text
    body = data_rows(text)
    assert {r["judgment_point"] for r in body if not r["statement"].startswith("goal:")} == {"t0", "t6"}
    assert all(r["variant"] == "true_belief" for r in body)


def test_main_compare(tmp_path, stmts, capsys):
    pairs = tmp_path / "pairs.csv"
    pairs.write_text("statement,home,others\nmust3,three_boxes,three_boxes_box2 three_boxes_direct\ntaut,three_boxes,three_boxes_box2\n")
    assert main(["compare", "--statements", str(stmts), "--pairs", str(pairs)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert '"accuracy"' in lines[0]
    assert lines[1] == ",".join(COMPARE_COLUMNS)
    assert len(lines) == 4


def test_main_external_backend(tmp_path):
    path = write_statements(tmp_path / "s.csv", [("x", "current", "", "Anything at all.")])
    out = tmp_path / "o.csv"
    backend = f"external:{sys.executable} {MOCK}"
    assert main(["run", "three_boxes", "--statements", str(path), "--backend", backend, "-o", str(out)]) == 0
    assert any(r["statement"] == "x" for r in data_rows(out.read_text()))


def test_exit_codes(tmp_path, stmts, capsys):
    assert main(["run", str(tmp_path / "missing.yaml")]) == 2
    assert main(["run", "three_boxes", "--statements", str(tmp_path / "none.csv")]) == 2
    bad = write_statements(tmp_path / "bad.csv", [("x", "current", "believes(player", "")])
    assert main(["run", "three_boxes", "--statements", str(bad)]) == 2
    assert "bad.csv:2" in capsys.readouterr().err
    assert main(["run", "three_boxes", "-k", "0"]) == 2
    assert main(["run", "three_boxes", "--judgment-points", "start=40"]) == 2
    unknown = write_statements(tmp_path / "u.csv", [("x", "current", "", "Never seen before.")])
    assert main(["run", "three_boxes", "--statements", str(unknown)]) == 2
    deg = tmp_path / "deg.yaml"
    deg.write_text(DEGENERATE)
    assert main(["run", str(deg)]) == 3
    assert "degenerate" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["run", "three_boxes", "--variant", "lazy"])


def test_run_config_echo():
    echo = RunConfig().echo()
    assert set(echo) >= {"beta", "k", "thresholds", "variant", "prior"}
    json.dumps(echo)
