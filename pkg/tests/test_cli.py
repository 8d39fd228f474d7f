import csv

import numpy as np
import pytest

from semigroup_calculus.cli import EXIT_DIVERGENT, EXIT_INPUT, EXIT_OK, EXIT_ORACLE, build_parser, main
from semigroup_calculus.data.matrix_io import read_vector_csv


def _result_fields(path):
    with path.open("r", encoding="utf-8", newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["field", "value"]
    return rows[1:]


def _field(rows, name):
    return [value for key, value in rows if key == name]


def test_catalog_lists_examples(capsys):
    assert main(["catalog"]) == EXIT_OK

    output = capsys.readouterr().out
    assert "frac_power" in output
    assert "Example 2" in output
    assert "neg_frac_power_bernstein" in output


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_apply_writes_result_files(tmp_path):
    code = main(["apply", "--operator", "diag_1_4", "--symbol", "frac_power:0.5", "--out", str(tmp_path)])

    assert code == EXIT_OK
    rows = _result_fields(tmp_path / "result.csv")
    assert _field(rows, "domain_verdict") == ["converged"]
    assert _field(rows, "symbol") == ["frac_power(alpha=0.5)"]
    assert float(_field(rows, "value[0,0]")[0]) == pytest.approx(1.0, abs=1e-9)
    assert float(_field(rows, "value[1,1]")[0]) == pytest.approx(0.5, abs=1e-9)
    assert np.allclose(read_vector_csv(tmp_path / "value.csv"), np.diag([1.0, 0.5]), atol=1e-9)
    assert (tmp_path / "oracle_delta.csv").exists()


def test_apply_fills_parameter_from_flag(tmp_path):
    vector = tmp_path / "x.csv"
    vector.write_text("dim=2\n1.0,1.0\n", encoding="utf-8")

    code = main(
        [
            "apply",
            "--operator",
            "diag_1_4",
            "--vector",
            str(vector),
            "--symbol",
            "neg_frac_power_bernstein",
            "--beta",
            "0.5",
            "--out",
            str(tmp_path / "out"),
        ]
    )

    assert code == EXIT_OK
    assert np.allclose(read_vector_csv(tmp_path / "out" / "value.csv"), [-1.0, -2.0], atol=1e-8)


def test_apply_inverse_on_non_injective_operator(tmp_path):
    code = main(["apply", "--operator", "zero_block", "--symbol", "inverse", "--out", str(tmp_path)])

    assert code == EXIT_DIVERGENT
    rows = _result_fields(tmp_path / "result.csv")
    assert _field(rows, "domain_verdict") == ["non_convergent"]
    assert not (tmp_path / "value.csv").exists()


def test_apply_rejects_calculus_mismatch(tmp_path):
    code = main(
        ["apply", "--operator", "diag_1_4", "--symbol", "log_shift", "--calculus", "hp", "--out", str(tmp_path)]
    )

    assert code == EXIT_INPUT


def test_apply_with_missing_operator(tmp_path):
    code = main(["apply", "--operator", str(tmp_path / "missing.csv"), "--symbol", "inverse", "--out", str(tmp_path)])

    assert code == EXIT_INPUT


def test_require_oracle_on_jordan_block(tmp_path):
    operator = tmp_path / "jordan.csv"
    operator.write_text("dim=2\n-1.0,1.0\n0.0,-1.0\n", encoding="utf-8")

    code = main(
        [
            "apply",
            "--operator",
            str(operator),
            "--symbol",
            "frac_power:0.5",
            "--require-oracle",
            "--out",
            str(tmp_path / "out"),
        ]
    )

    assert code == EXIT_ORACLE
    rows = _result_fields(tmp_path / "out" / "result.csv")
    assert _field(rows, "domain_verdict") == ["converged"]


def test_subordinate_command(tmp_path):
    code = main(
        [
            "subordinate",
            "--operator",
            "diag_1_4",
            "--symbol",
            "neg_frac_power_bernstein:0.5",
            "--t",
            "1",
            "--route",
            "subordination",
            "--out",
            str(tmp_path),
        ]
    )

    assert code == EXIT_OK
    value = read_vector_csv(tmp_path / "value.csv")
    assert np.allclose(value, np.diag([np.exp(-1.0), np.exp(-2.0)]), atol=1e-7)


def test_subordinate_needs_time(tmp_path):
    code = main(["subordinate", "--operator", "diag_1_4", "--symbol", "log_shift", "--out", str(tmp_path)])

    assert code == EXIT_INPUT


def test_verify_unknown_suite(tmp_path):
    assert main(["verify", "--suites", "eq99", "--out", str(tmp_path)]) == EXIT_INPUT


def test_verify_writes_report(tmp_path):
    code = main(["verify", "--operator", "diag_1_4", "--suites", "ex2,eq1", "--out", str(tmp_path)])

    assert code == EXIT_OK
    report = (tmp_path / "report.md").read_text(encoding="utf-8")
    assert "- operator: diag_1_4" in report
    assert "- suites: ex2, eq1" in report
    with (tmp_path / "report.csv").open("r", encoding="utf-8", newline="") as handle:
        rows = list(csv.DictReader(handle))
    assert rows
    assert all(row["passed"] == "pass" for row in rows)


def test_config_file_supplies_run(tmp_path):
    config = tmp_path / "run.ini"
    config.write_text(
        "[run]\noperator = ops.csv\noutput_dir = results\n\n[symbol]\nspec = frac_power\nalpha = 0.5\n",
        encoding="utf-8",
    )
    (tmp_path / "ops.csv").write_text("dim=2\n-1.0,0.0\n0.0,-4.0\n", encoding="utf-8")

    assert main(["apply", "--config", str(config)]) == EXIT_OK
    assert np.allclose(read_vector_csv(tmp_path / "results" / "value.csv"), np.diag([1.0, 0.5]), atol=1e-9)


@pytest.mark.parametrize(
    ("args", "files"),
    [
        (["apply", "--operator", "diag_1_4", "--symbol", "neg_frac_power_bernstein:0.25"], ("result.csv", "value.csv", "oracle_delta.csv")),
        (["verify", "--suites", "ex2,eq5", "--seed", "3", "--dim", "4"], ("report.csv", "report.md")),
    ],
    ids=["apply", "verify"],
)
def test_repeated_runs_write_identical_files(tmp_path, args, files):
    first = main(args + ["--out", str(tmp_path / "first")])
    second = main(args + ["--out", str(tmp_path / "second")])

    assert first == second == EXIT_OK
    for name in files:
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()
