import numpy as np
import pytest

from discrimpower.errors import ParseError, ValidationError
from discrimpower.trec import (
    CANDIDATE,
    Qrels,
    RunSet,
    load_run,
    load_runs,
    load_runs_dir,
    merge_runs,
    parse_qrels,
    parse_run,
    save_qrels,
    serialize_qrels,
    serialize_run,
)

RUN_TEXT = """\
q1 Q0 d3 1 9.5 sysA
q1 Q0 d1 2 7.25 sysA
q1 Q0 d2 3 7.25 sysA
q2 Q0 d9 1 3.0 sysA
"""

QRELS_TEXT = """\
q1 0 d1 2
q1 0 d2 0
q1 0 d3 3
q2 0 d9 1
"""


def test_parse_run_orders_by_score_then_docid():
    rs = parse_run(RUN_TEXT)
    docs = rs.runs["sysA"]["q1"]
    assert [d.doc_id for d in docs] == ["d3", "d2", "d1"]  # tie broken doc_id desc
    assert [d.rank for d in docs] == [1, 2, 3]
    assert docs[0].score == 9.5


def test_parse_run_rewrites_nonsense_ranks():
    text = "q1 Q0 dA 40 2.0 s\nq1 Q0 dB 1 5.0 s\n"
    docs = parse_run(text).runs["s"]["q1"]
    assert [(d.doc_id, d.rank) for d in docs] == [("dB", 1), ("dA", 2)]


def test_parse_run_column_count_error_names_line():
    with pytest.raises(ParseError, match="line 2"):
        parse_run("q1 Q0 d1 1 2.0 s\nq1 Q0 d2 1 2.0\n")


def test_parse_run_bad_numbers():
    with pytest.raises(ParseError, match="line 1"):
        parse_run("q1 Q0 d1 x 2.0 s\n")
    with pytest.raises(ParseError, match="line 1"):
        parse_run("q1 Q0 d1 1 notafloat s\n")


def test_parse_run_duplicate_doc_in_topic():
    with pytest.raises(ValidationError, match="d1"):
        parse_run("q1 Q0 d1 1 2.0 s\nq1 Q0 d1 2 1.0 s\n")


def test_parse_run_multiple_tags_needs_override():
    text = "q1 Q0 d1 1 2.0 one\nq1 Q0 d2 2 1.0 two\n"
    with pytest.raises(ValidationError):
        parse_run(text)
    rs = parse_run(text, system_tag_override="merged")
    assert rs.systems() == ["merged"]
    assert len(rs.runs["merged"]["q1"]) == 2


def test_parse_run_empty_input():
    rs = parse_run("")
    assert rs.systems() == []


def test_parse_qrels_basic_and_duplicate():
    q = parse_qrels(QRELS_TEXT)
    assert q.grade("q1", "d3") == 3
    assert q.grade("q1", "dZ") == 0  # unjudged
    assert q.topics() == ["q1", "q2"]
    with pytest.raises(ValidationError, match="duplicate"):
        parse_qrels(QRELS_TEXT + "q1 0 d1 1\n")


def test_parse_qrels_negative_clamped_and_counted():
    q = parse_qrels("q1 0 d1 -2\nq1 0 d2 1\n")
    assert q.grade("q1", "d1") == 0
    assert q.clamp_warnings == 1


def test_parse_qrels_grade_above_max():
    with pytest.raises(ValidationError, match="grade"):
        parse_qrels("q1 0 d1 4\n", max_grade=3)
    q = parse_qrels("q1 0 d1 4\n", max_grade=5)
    assert q.grade("q1", "d1") == 4


def test_parse_qrels_column_error_names_line():
    with pytest.raises(ParseError, match="line 3"):
        parse_qrels("q1 0 d1 1\nq1 0 d2 0\nq1 0 d3\n")


def test_qrels_equality_ignores_role():
    a = parse_qrels("q1 0 d1 1\n")
    b = parse_qrels("q1 0 d1 1\n", role=CANDIDATE)
    assert a == b


def test_serialize_qrels_sorted_and_round_trip():
    q = parse_qrels(QRELS_TEXT)
    text = serialize_qrels(q)
    assert text.splitlines()[0] == "q1 0 d1 2"
    assert parse_qrels(text) == q


def test_serialize_run_round_trips_exact_scores():
    rs = parse_run("q1 Q0 d1 1 0.1234567890123456789 s\nq1 Q0 d2 2 -3.5e-7 s\n")
    again = parse_run(serialize_run(rs))
    assert again == rs


def test_random_round_trips():
    rng = np.random.default_rng(8)
    for _ in range(50):
        judgments = {}
        for t in range(int(rng.integers(1, 5))):
            for d in rng.choice(40, size=int(rng.integers(1, 10)), replace=False):
                judgments[(f"q{t}", f"d{d}")] = int(rng.integers(0, 4))
        q = Qrels(judgments=judgments)
        assert parse_qrels(serialize_qrels(q)) == q

    for _ in range(50):
        runs = {}
        tag = "sys"
        runs[tag] = {}
        for t in range(int(rng.integers(1, 4))):
            entries = [
                (f"d{d}", float(rng.normal()))
                for d in rng.choice(60, size=int(rng.integers(1, 15)), replace=False)
            ]
            text = "".join(
                f"q{t} Q0 {doc} {i + 1} {score!r} {tag}\n"
                for i, (doc, score) in enumerate(entries)
            )
            runs[tag][f"q{t}"] = parse_run(text).runs[tag][f"q{t}"]
        rs = RunSet(runs=runs)
        assert parse_run(serialize_run(rs)) == rs


def test_merge_runs_duplicate_tag():
    a = parse_run("q1 Q0 d1 1 1.0 s\n")
    with pytest.raises(ValidationError, match="s"):
        merge_runs([a, a])


def test_load_helpers(tmp_path):
    run_path = tmp_path / "alpha.run"
    run_path.write_text("q1 Q0 d1 1 1.0 tagged\n")
    (tmp_path / "beta.run").write_text("q1 Q0 d2 1 2.0 beta\n")

    assert load_run(run_path).systems() == ["tagged"]
    assert load_run(run_path, tag_from_filename=True).systems() == ["alpha"]

    rs = load_runs([run_path, tmp_path / "beta.run"], tag_from_filename=True)
    assert rs.systems() == ["alpha", "beta"]

    qdir = tmp_path / "runs"
    qdir.mkdir()
    (qdir / "one").write_text("q1 Q0 d1 1 1.0 one\n")
    (qdir / "two").write_text("q1 Q0 d1 1 1.0 two\n")
    assert load_runs_dir(qdir).systems() == ["one", "two"]


def test_save_qrels(tmp_path):
    q = parse_qrels(QRELS_TEXT)
    path = tmp_path / "out.qrels"
    save_qrels(q, path)
    assert parse_qrels(path.read_text()) == q
