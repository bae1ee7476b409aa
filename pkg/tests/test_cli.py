import csv
import io

import pytest

from repinv.cli import build_parser, main
from repinv.stats import CSV_HEADER, RunStats, average_rows, format_row

from .conftest import corpus_path


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    import repinv.cli as cli

    args = build_parser().parse_args(argv)
    code = {"infer": cli.cmd_infer, "bench": cli.cmd_bench, "check": cli.cmd_check}[args.command](args, out, err)
    return code, out.getvalue(), err.getvalue()


def test_header_is_frozen():
    assert ",".join(CSV_HEADER) == "Name,Size,Time,TVT,TVC,MVT,TST,TSC,MST,Outcome,Mode"


def test_infer_listset():
    code, out, _ = run(["infer", corpus_path("listset")])
    assert code == 0 and "lookup" in out


def test_infer_buggyset_reports_counterexample():
    code, out, _ = run(["infer", corpus_path("buggyset")])
    assert code == 2 and out.startswith("Counterexample") and "insert" in out


def test_oneshot_on_two_quantifiers_is_usage_error():
    code, _, err = run(["infer", corpus_path("listset"), "--mode", "oneshot"])
    assert code == 1 and "UnsupportedMode" in err


def test_timeout_exit_code():
    code, out, _ = run(["infer", corpus_path("listset"), "--timeout", "0"])
    assert code == 4 and out.startswith("Timeout")


def test_synthesis_failure_exit_code():
    code, _, _ = run(["infer", corpus_path("listset"), "--budget-synth-size", "3"])
    assert code == 3


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.inv"
    bad.write_text("type list = Nil |\n")
    code, _, err = run(["infer", str(bad)])
    assert code == 1 and "bad.inv:" in err
    assert main(["infer", str(tmp_path / "missing.inv")]) == 1
    assert main(["frobnicate"]) == 1


def test_check_examples():
    f = corpus_path("listset")
    nodup = "let rec nd (l : t) : bool = match l with Nil -> true | Cons (h, tl) -> not (lookup tl h) && nd tl in nd"
    assert run(["check", f, nodup])[0] == 0
    assert run(["check", f, "fun (s : t) -> true"])[0] != 0
    hd = "fun (l : t) -> match l with Nil -> true | Cons (h, _) -> not (h = 1)"
    assert run(["check", f, hd])[0] != 0
    assert run(["check", f, "fun (s : t) -> 3"])[0] == 1


def test_bench_csv_round_trip(tmp_path):
    path = tmp_path / "out.csv"
    code, _, _ = run(
        ["bench", corpus_path("toggle"), corpus_path("counter4"), "--repeat", "2", "--mode", "hanoi", "--mode", "la", "--csv", str(path)]
    )
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    assert list(rows[0]) == list(CSV_HEADER)
    assert [(r["Name"], r["Mode"]) for r in rows] == [
        ("toggle", "hanoi"),
        ("toggle", "la"),
        ("counter4", "hanoi"),
        ("counter4", "la"),
    ]
    for r in rows:
        assert r["Outcome"] == "Invariant"
        assert abs(float(r["MVT"]) * float(r["TVC"]) - float(r["TVT"])) < 1e-3
        assert abs(float(r["MST"]) * float(r["TSC"]) - float(r["TST"])) < 1e-3


def test_bench_records_failures_without_aborting(tmp_path):
    bad = tmp_path / "bad.inv"
    bad.write_text("nonsense")
    code, out, _ = run(["bench", str(bad), corpus_path("listset"), "--repeat", "1", "--mode", "oneshot"])
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows[0]["Outcome"].startswith("Error") and rows[1]["Outcome"] == "UnsupportedMode"


def test_bench_empty_corpus(tmp_path):
    code, out, _ = run(["bench", str(tmp_path)])
    assert code == 0 and out.strip() == ",".join(CSV_HEADER)


def test_bench_defaults():
    args = build_parser().parse_args(["bench"])
    assert args.repeat == 10 and args.timeout == 1800
    args = build_parser().parse_args(["infer", "x"])
    assert args.repeat == 1 and args.mode == "hanoi"


def test_reports_are_deterministic():
    a = run(["infer", corpus_path("heaplite")])
    b = run(["infer", corpus_path("heaplite")])
    assert a == b


def test_bench_parallel_matches_serial(tmp_path):
    files = [corpus_path("toggle"), corpus_path("counter4")]
    _, serial, _ = run(["bench", *files, "--repeat", "1"])
    _, par, _ = run(["bench", *files, "--repeat", "1", "--jobs", "2"])
    strip = lambda s: [(r["Name"], r["Size"], r["TVC"], r["TSC"], r["Outcome"]) for r in csv.DictReader(io.StringIO(s))]  # noqa: E731
    assert strip(serial) == strip(par)


# ---------------------------------------------------------------- stats


def test_averaging_and_timeouts():
    a, b = RunStats("x"), RunStats("x")
    a.record_verify(1.0)
    a.record_verify(3.0)
    b.record_verify(2.0)
    a.finish("Invariant", 5)
    b.finish("Timeout")
    row = average_rows([a, b])
    assert row["Outcome"] == "Timeout"
    assert row["TVC"] == 1.5 and row["TVT"] == 3.0
    assert format_row(row)[CSV_HEADER.index("TVC")] == "1.5"
    with pytest.raises(ValueError):
        average_rows([])


def test_mean_times():
    s = RunStats()
    assert s.mvt == 0.0 and s.mst == 0.0
    s.record_synth(0.5, 3)
    s.record_synth(1.5, 3)
    assert s.tsc == 2 and s.mst == 1.0
