import csv
import json
import subprocess
import sys

import pytest

from qsplit.cli import _seeds, main
from qsplit.topology import pegasus_mask


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_seed_syntax():
    assert _seeds(["0..3"]) == (0, 1, 2, 3)
    assert _seeds(["1,5", "7"]) == (1, 5, 7)


def test_topology_dump_edgelist(capsys):
    code, out, _ = run_cli(capsys, "topology", "dump", "--family", "pegasus", "--size", "2", "--format", "edgelist")
    assert code == 0
    pairs = [tuple(map(int, ln.split())) for ln in out.splitlines()]
    assert pairs == sorted(pairs) and set(pairs) == pegasus_mask(2).edge_set()


def test_topology_dump_chimera_json(capsys):
    _, out, _ = run_cli(capsys, "topology", "dump", "--family", "chimera", "--size", "2,1,4", "--format", "json")
    d = json.loads(out)
    assert d["n"] == 16 and len(d["edges"]) == 36


def test_instance_and_oracle(capsys):
    _, out, _ = run_cli(capsys, "instance", "gen", "reg", "--n", "3")
    d = json.loads(out)
    assert d["biases"] == [1.0, 0.0, -1.0] and [0, 1, 1.0] in d["couplings"]
    _, out, _ = run_cli(capsys, "oracle", "reg", "--n", "11")
    d = json.loads(out)
    assert d["k"] == 2 and d["energy"] == pytest.approx(-28.8)


def test_run_curves_rank(tmp_path, capsys):
    out = tmp_path / "run"
    code, _, err = run_cli(capsys, "run", "reg:8", "reg:10", "--method", "splitting", "lnls", "--lambda-mode", "scan", "zero",
                           "--m", "4", "--maxiter", "2", "--maxsubiter", "3", "--seeds", "0..1",
                           "--reads", "5", "--sweeps", "50", "--out", str(out))
    assert code == 0, err
    summary = json.loads((out / "summary.json").read_text())
    assert {c["method"] for c in summary["cells"]} == {"splitting", "splitting-zero", "lnls-m4"}
    assert len(summary["cells"]) == 2 * 3 * 2

    code, text, _ = run_cli(capsys, "curves", str(out))
    rows = list(csv.DictReader(text.splitlines()))
    assert list(rows[0]) == ["method", "iteration", "mean_ratio", "n_instances"]
    assert {r["method"] for r in rows} == {"splitting", "splitting-zero", "lnls-m4"}

    code, text, _ = run_cli(capsys, "rank", str(out / "trace.csv"))
    rows = list(csv.DictReader(text.splitlines()))
    assert len(rows) == 2 and "splitting" in rows[0]

    counts_file = tmp_path / "counts.csv"
    run_cli(capsys, "rank", str(out), "--compare", "splitting", "splitting-zero", "--out", str(counts_file))
    (row,) = csv.DictReader(counts_file.read_text().splitlines())
    assert int(row["better"]) + int(row["equal"]) + int(row["worse"]) == int(row["total"]) == 2


def test_run_with_config_and_topology(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text("[solver]\nnum_reads = 3\nsweeps = 20\n[splitting]\nmaxiter = 1\nmaxsubiter = 2\n")
    code, _, err = run_cli(capsys, "run", "reg:12", "--topology", "chimera:1,2,4", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert code == 0, err
    lines = (tmp_path / "o" / "trace.csv").read_text().splitlines()
    assert 2 <= len(lines) - 1 <= 3


def test_invalid_arguments_report_errors(tmp_path, capsys):
    code, _, err = run_cli(capsys, "run", "reg:8", "--method", "kopt", "--k", "3", "--out", str(tmp_path))
    assert code == 2 and "k in" in err
    code, _, err = run_cli(capsys, "run", "reg:8", "--lambda-mode", "sometimes", "--out", str(tmp_path))
    assert code == 2 and "lambda" in err
    with pytest.raises(SystemExit):
        main(["run", "reg:8", "--method", "tabu"])


def test_failed_cell_exit_code(tmp_path, capsys):
    code, _, err = run_cli(capsys, "run", str(tmp_path / "nope.txt"), "--reads", "2", "--sweeps", "5", "--out", str(tmp_path / "o"))
    assert code == 1 and "nope.txt" in err


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "qsplit.cli", "oracle", "reg", "--n", "4"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["instance"] == "reg:4"
