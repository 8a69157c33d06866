import csv
import io
import json
import math
import os

import pytest

from expweights.cli import main

FREUD2_FLAGS = ["--family", "freud", "--alpha", "2"]


def run_cli(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_csv(text):
    return list(csv.reader(io.StringIO(text)))


def test_mrs_table_csv(capsys):
    code, out, _ = run_cli(["mrs-table", *FREUD2_FLAGS, "--x", "1,4,9"], capsys)
    assert code == 0
    rows = parse_csv(out)
    assert rows[0] == ["x", "a_x", "T_a", "Q_a", "rel_residual"]
    for row, ref in zip(rows[1:], (1, 2, 3)):
        assert float(row[1]) == pytest.approx(ref, rel=1e-12)


def test_csv_round_trips_full_precision(capsys):
    _, out, _ = run_cli(["mrs-table", "--family", "erdos", "--alpha", "2", "--x", "7,300"],
                        capsys)
    for row in parse_csv(out)[1:]:
        for field in row:
            v = float(field)
            assert float("%.17g" % v) == v and field == "%.17g" % v


def test_empty_invocation_exits_2(capsys):
    code, _, err = run_cli([], capsys)
    assert code == 2 and "usage:" in err


def test_empty_config_file_exits_2(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text("{}")
    code, _, err = run_cli(["--config", str(cfg)], capsys)
    assert code == 2 and "usage:" in err


def test_bad_config_values_exit_2(tmp_path, capsys):
    assert run_cli(["verify", *FREUD2_FLAGS, "--ineq", "1.12", "--p", "1"], capsys)[0] == 2
    assert run_cli(["verify", *FREUD2_FLAGS, "--ineq", "2.3", "--p", "0.5"], capsys)[0] == 2
    assert run_cli(["eval", "--family", "hermite", "--alpha", "2", "--x", "0", "--n", "2"],
                   capsys)[0] == 2
    assert run_cli(["eval", *FREUD2_FLAGS, "--x", "0"], capsys)[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert run_cli(["--config", str(bad)], capsys)[0] == 2


def test_config_file_with_flag_override(tmp_path, capsys):
    weight = tmp_path / "w.json"
    weight.write_text(json.dumps({"family": "freud", "alpha": 4}))
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "mrs-table", "weight": str(weight), "x": [4.0]}))
    code, out, _ = run_cli(["--config", str(cfg)], capsys)
    assert code == 0
    assert float(parse_csv(out)[1][1]) == pytest.approx((8 / 3) ** 0.25, rel=1e-12)
    code, out, _ = run_cli(["--config", str(cfg), "--alpha", "2"], capsys)
    assert float(parse_csv(out)[1][1]) == pytest.approx(2.0, rel=1e-12)


def test_numerical_gate_exits_3(capsys):
    code, _, err = run_cli(["christoffel", *FREUD2_FLAGS, "--n", "8", "--x", "1000"], capsys)
    assert code == 3 and "degenerate-sum" in err


def test_christoffel_oracle_column(capsys):
    code, out, _ = run_cli(["christoffel", *FREUD2_FLAGS, "--n", "8", "--j", "2",
                            "--x", "0.5", "--oracle"], capsys)
    rows = parse_csv(out)
    assert code == 0 and rows[0] == ["x", "n", "j", "lambda_weighted", "oracle"]
    assert float(rows[1][3]) == pytest.approx(float(rows[1][4]), rel=1e-6)
    _, out, _ = run_cli(["christoffel", *FREUD2_FLAGS, "--n", "2", "--x", "0"], capsys)
    row = parse_csv(out)[1]
    assert float(row[3]) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-13) and row[4] == ""


def test_recurrence_and_eval(capsys):
    _, out, _ = run_cli(["recurrence", *FREUD2_FLAGS, "--N", "4"], capsys)
    rows = parse_csv(out)
    assert rows[0] == ["k", "a_k", "b_k_minus_1", "gamma_ratio"]
    assert float(rows[4][1]) == pytest.approx(1.0, rel=1e-12)
    _, out, _ = run_cli(["eval", *FREUD2_FLAGS, "--x", "0", "--n", "2", "--j-max", "1"],
                        capsys)
    rows = parse_csv(out)
    assert rows[0] == ["x", "k", "j", "pkw"] and len(rows) == 5
    assert float(rows[1][3]) == pytest.approx((math.pi / 2) ** -0.25, rel=1e-14)


def test_vp_apply_reproduces_polynomial(capsys):
    code, out, _ = run_cli(["vp-apply", *FREUD2_FLAGS, "--n", "4", "--f", "poly0",
                            "--x", "0,1"], capsys)
    rows = parse_csv(out)
    assert code == 0 and rows[0] == ["x", "j", "value"]
    # poly0 is a constant c, so v_n(f) w = c w
    ratio = float(rows[2][2]) / float(rows[1][2])
    assert ratio == pytest.approx(math.exp(-1), rel=1e-9)
    assert run_cli(["vp-apply", *FREUD2_FLAGS, "--n", "4", "--f", "nope", "--x", "0"],
                   capsys)[0] == 2


def test_class_report(capsys):
    code, out, _ = run_cli(["class-report", *FREUD2_FLAGS, "--grid", "0.5,10,50"], capsys)
    table = dict(parse_csv(out)[1:])
    assert code == 0 and float(table["T_min"]) == 2.0


def test_list_functions(capsys):
    code, out, _ = run_cli(["--list-functions"], capsys)
    ids = [line.split("\t")[0] for line in out.splitlines()]
    assert code == 0 and ids[:3] == ["bump+0", "bump+0.75", "bump-1.5"] and "poly12" in ids


def test_verify_restricted_range_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run_cli(["verify", *FREUD2_FLAGS, "--ineq", "2.3", "--p", "inf",
                          "--n-grid", "8,16,32", "--out", str(out)], capsys)
    rep = json.loads(out.read_text(encoding="utf-8"))
    assert code == 0 and rep["verdict"] == "pass" and rep["empirical_constant"] <= 2
    assert {"rows", "slope", "verdict", "empirical_constant", "config"} <= set(rep)
    assert rep["config"]["weight"] == {"family": "freud", "alpha": 2.0, "u": 0.0, "l": 1}
    assert rep["config"]["seed"] == 0


def test_verify_outputs_are_deterministic(tmp_path, capsys):
    out, svg = tmp_path / "r.json", tmp_path / "r.svg"
    args = ["verify", "--family", "erdos", "--alpha", "2", "--ineq", "2.6", "--p", "2",
            "--n-grid", "8,16,32", "--out", str(out), "--svg", str(svg)]
    blobs = []
    for _ in range(2):
        assert run_cli(args, capsys)[0] == 0
        blobs.append((out.read_bytes(), svg.read_bytes()))
    assert blobs[0] == blobs[1]
    text = blobs[0][1].decode("utf-8")
    assert "<svg" in text and "<image" not in text and 'href="http' not in text
    assert sorted(os.listdir(tmp_path)) == ["r.json", "r.svg"]


def test_svg_only_for_verify(tmp_path, capsys):
    code, out, _ = run_cli(["mrs-table", *FREUD2_FLAGS, "--x", "1",
                          "--svg", str(tmp_path / "x.svg")], capsys)
    assert code == 2 and out == ""


def test_json_sorted_and_csv_file(tmp_path, capsys):
    out, table = tmp_path / "r.json", tmp_path / "t.csv"
    code, stdout, _ = run_cli(["mrs-table", *FREUD2_FLAGS, "--x", "4", "--out", str(out),
                               "--csv", str(table)], capsys)
    assert code == 0 and stdout == ""
    text = out.read_text(encoding="utf-8")
    assert list(json.loads(text)) == sorted(json.loads(text))
    assert parse_csv(table.read_text())[1][0] == "4"
