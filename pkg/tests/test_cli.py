import csv

import pytest

from fastppr.cli import main


@pytest.fixture()
def two_cycle_file(tmp_path):
    p = tmp_path / "two_cycle.txt"
    p.write_text("0 1\n1 0\n")
    return str(p)


def test_estimate_prints_value_in_envelope(two_cycle_file, capsys):
    rc = main(["estimate", "--graph", two_cycle_file, "--source", "1",
               "--target", "0", "--algo", "fastppr", "--delta", "0.1",
               "--seed", "7"])
    assert rc == 0
    value = float(capsys.readouterr().out.strip())
    truth = 0.8 / 1.8
    assert abs(value - truth) <= max(0.1, truth) / 4 + 1e-9


def test_estimate_missing_graph_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["estimate"])
    assert exc.value.code == 2


def test_unknown_flag_is_usage_error(two_cycle_file):
    with pytest.raises(SystemExit) as exc:
        main(["estimate", "--graph", two_cycle_file, "--source", "1",
              "--target", "0", "--frobnicate"])
    assert exc.value.code == 2


def test_missing_file_is_runtime_error(capsys):
    rc = main(["estimate", "--graph", "/nonexistent/g.txt", "--source", "0",
               "--target", "0"])
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_store_query_matches_storeless(two_cycle_file, tmp_path, capsys):
    store = str(tmp_path / "store.bin")
    assert main(["precompute", "--graph", two_cycle_file, "--eps-r", "0.5",
                 "--out", store]) == 0
    capsys.readouterr()
    common = ["--graph", two_cycle_file, "--source", "1", "--target", "0",
              "--delta", "0.1", "--eps-r", "0.5", "--seed", "7"]
    assert main(["estimate"] + common + ["--store", store]) == 0
    with_store = capsys.readouterr().out.strip()
    assert main(["estimate"] + common) == 0
    without_store = capsys.readouterr().out.strip()
    assert with_store == without_store


def test_seed_fixes_estimate_output(two_cycle_file, capsys):
    args = ["estimate", "--graph", two_cycle_file, "--source", "1",
            "--target", "0", "--delta", "0.1", "--eps-r", "0.5",
            "--algo", "montecarlo", "--seed", "3"]
    main(args)
    a = capsys.readouterr().out
    main(args)
    b = capsys.readouterr().out
    assert a == b


def test_symbolic_delta_and_auto_eps(tmp_path, capsys):
    gpath = str(tmp_path / "g.txt")
    assert main(["gen", "--nodes", "100", "--edges", "400", "--seed", "5",
                 "--out", gpath]) == 0
    rc = main(["estimate", "--graph", gpath, "--source", "1",
               "--target", "0", "--delta", "4/n", "--eps-r", "auto"])
    assert rc == 0


def test_gen_then_benchmark_and_ccdf(tmp_path, capsys):
    gpath = str(tmp_path / "g.txt")
    assert main(["gen", "--nodes", "200", "--edges", "1000", "--seed", "3",
                 "--out", gpath]) == 0
    out_csv = str(tmp_path / "bench.csv")
    assert main(["benchmark", "--graph", gpath, "--pairs", "4",
                 "--algos", "fastppr,montecarlo", "--delta", "0.05",
                 "--out", out_csv]) == 0
    rows = list(csv.reader(open(out_csv)))
    assert len(rows) == 1 + 8
    ccdf_csv = str(tmp_path / "ccdf.csv")
    assert main(["ccdf", "--graph", gpath, "--pairs", "20", "--floor", "0.01",
                 "--out", ccdf_csv]) == 0
    assert open(ccdf_csv).readline().strip() == "threshold,fraction"


def test_groundtruth_subcommand(two_cycle_file, tmp_path, capsys):
    out = str(tmp_path / "gt.csv")
    assert main(["groundtruth", "--graph", two_cycle_file, "--target", "0",
                 "--tol", "1e-9", "--out", out]) == 0
    rows = {r[0]: float(r[1]) for r in list(csv.reader(open(out)))[1:]}
    assert rows["0"] == pytest.approx(1 / 1.8, abs=1e-8)
    assert rows["1"] == pytest.approx(0.8 / 1.8, abs=1e-8)


def test_original_ids_translated(tmp_path, capsys):
    p = tmp_path / "g.txt"
    p.write_text("10 20\n20 10\n")
    rc = main(["estimate", "--graph", str(p), "--source", "20",
               "--target", "10", "--delta", "0.1", "--eps-r", "0.3"])
    assert rc == 0
    value = float(capsys.readouterr().out.strip())
    assert abs(value - 0.8 / 1.8) < 0.05
