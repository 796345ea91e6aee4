import json

import pytest

from qmv import __version__
from qmv.algebra import DomainSpec, format_matrix, generate_instance, parse_matrices, sparse_product_instance
from qmv.cli import main, parse_config


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def csv_rows(text):
    return [line.split(",") for line in text.splitlines() if not line.startswith("#")]


def test_gap_csv(capsys):
    code, out, _ = run(capsys, "gap", "--n", "6", "--k", "2", "3")
    assert code == 0
    assert out.startswith(f"# qmv {__version__}")
    assert "# config:" in out
    rows = csv_rows(out)
    assert rows[0] == ["n", "k", "formula_gap", "eig_gap", "abs_err"]
    assert rows[1][:3] == ["6", "2", "0.75"]


def test_gap_json(capsys):
    code, out, _ = run(capsys, "gap", "--n", "4", "--k", "2", "--product", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["version"] == __version__
    assert float(doc["rows"][0][2]) == pytest.approx(0.75)


def test_epsilon_exact_and_mc(capsys):
    code, out, _ = run(capsys, "epsilon", "--n", "6", "--pattern", "single", "--r", "2", "--s", "3")
    row = csv_rows(out)[1]
    assert code == 0 and row[4] == "exact" and float(row[5]) == pytest.approx(1 / 6)
    code, out, _ = run(capsys, "epsilon", "--n", "6", "--r", "2", "--s", "3", "--mc", "20000")
    assert code == 0 and csv_rows(out)[1][4] == "monte_carlo"


def test_exact_and_mc_conflict(capsys):
    code, _, err = run(capsys, "epsilon", "--n", "6", "--r", "2", "--s", "2", "--exact", "--mc", "10")
    assert code == 2 and "not allowed" in err


def test_walk_demo(capsys):
    code, out, _ = run(capsys, "walk-demo", "--n", "4", "--k", "2", "--lmax", "3")
    rows = csv_rows(out)
    assert code == 0 and rows[0] == ["ell", "prob_one"] and len(rows) == 5
    assert rows[1] == ["0", "0"]


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "--n", "6", "--pattern", "single", "--domain", "gf:7",
                       "--trials", "3", "--seed", "1")
    assert code == 1
    assert {r[1] for r in csv_rows(out)[1:]} == {"not_equal"}
    code, out, _ = run(capsys, "verify", "--n", "4", "--pattern", "none", "--trials", "2")
    assert code == 0


def test_verify_output_is_deterministic(capsys):
    argv = ["verify", "--n", "5", "--pattern", "row", "--trials", "4", "--seed", "9"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_verify_matrix_file(tmp_path, capsys):
    A, B, C, _ = generate_instance(4, 3, "single", DomainSpec.gf(5), seed=0)
    path = tmp_path / "abc.txt"
    path.write_text(format_matrix(A) + format_matrix(B) + format_matrix(C))
    code, out, _ = run(capsys, "verify", "--matrix-file", str(path), "--trials", "2")
    assert code == 1
    path.write_text(format_matrix(A) + format_matrix(B))
    assert run(capsys, "verify", "--matrix-file", str(path))[0] == 2


def test_multiply_writes_matrix(tmp_path, capsys):
    out_path = tmp_path / "C.txt"
    code, out, _ = run(capsys, "multiply", "--n", "6", "--m", "4", "--domain", "gf:5",
                       "--wrong-pattern", "random:3", "--seed", "2", "--output-matrix", str(out_path))
    report = json.loads(out)
    assert code == 0 and report["audit_ok"] is True
    (C,) = parse_matrices(out_path.read_text())
    assert C.shape == (6, 6) and (C.entries != 0).sum() == 3


def test_multiply_matrix_file(tmp_path, capsys):
    A, B = sparse_product_instance(5, 3, [(1, 1), (4, 2)], DomainSpec.gf(7), seed=1)
    path = tmp_path / "ab.txt"
    path.write_text(format_matrix(A) + format_matrix(B))
    code, out, _ = run(capsys, "multiply", "--matrix-file", str(path))
    assert code == 0 and json.loads(out)["iterations"] >= 1


def test_multiply_bool(capsys):
    code, out, _ = run(capsys, "multiply", "--n", "6", "--bool", "--wrong-pattern", "random:4")
    report = json.loads(out)
    assert code == 0 and report["mode"] == "boolean" and report["ones_found"] == 4


def test_suite_quick_and_unknown(tmp_path, capsys):
    code, out, _ = run(capsys, "suite", "gaps", "--out-dir", str(tmp_path))
    assert code == 0
    assert (tmp_path / "johnson_gap.csv").exists()
    assert all(r[2] == "pass" for r in csv_rows(out)[1:])
    assert run(capsys, "suite", "nope")[0] == 2


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nn = 4\nk = 1 2\nseed = 5\nproduct = true\n")
    args = parse_config(["gap", "--config", str(cfg), "--n", "5"])
    assert args.n == 5 and args.k == [1, 2] and args.seed == 5 and args.product


def test_config_file_errors(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("bogus = 1\n")
    code, _, err = run(capsys, "gap", "--config", str(cfg), "--n", "4", "--k", "1")
    assert code == 2 and "bogus" in err
    assert run(capsys, "gap", "--config", str(tmp_path / "missing"), "--n", "4", "--k", "1")[0] == 2


def test_verify_config_example():
    args = parse_config("verify --n 6 --pattern single --domain gf:7 --trials 300 --seed 1".split())
    assert (args.n, args.pattern, args.domain, args.trials, args.seed) == (6, "single", "gf:7", 300, 1)


def test_bad_values_are_usage_errors(capsys):
    assert run(capsys, "verify", "--domain", "gf:6")[0] == 2
    assert run(capsys, "verify", "--pattern", "zigzag")[0] == 2
    assert run(capsys, "gap", "--n", "3", "--k", "3")[0] == 2
