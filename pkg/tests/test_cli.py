"""
Tests for the command line surface
"""

import csv
import json

import pytest

from coxcell.api.routes import build_parser, dispatch, glue_negative_values


def _rows(path):
    with open(path, newline="") as handle:
        return list(csv.reader(handle))


def test_every_subcommand_is_registered():
    parser = build_parser()
    for command in ("assoc", "distance", "coverage", "links", "compare"):
        args = parser.parse_args([command] if command != "compare" else [command, "coverage"])
        assert callable(args.handler)
    assert callable(parser.parse_args(["figure", "fig5"]).handler)


def test_assoc_writes_csv_and_sidecar(tmp_path):
    out = tmp_path / "assoc.csv"
    code = dispatch(["assoc", "--mu-b", "0", "--sweep", "lambda_b", "--grid", "1,2", "--out", str(out)])
    assert code == 0
    rows = _rows(out)
    assert rows[0] == ["sweep", "analytic", "analytic_err", "mc", "mc_stderr", "n_trials", "z"]
    assert [row[:2] for row in rows[1:]] == [["1", "1"], ["2", "1"]]
    metadata = json.loads((tmp_path / "assoc.json").read_text())
    assert metadata["status"] == "PASS"
    assert metadata["config"]["mu_b"] == 0.0
    assert metadata["sweep"] == "lambda_b"


def test_csv_goes_to_stdout_without_out(capsys):
    code = dispatch(["distance", "--mu-b", "0", "--lambda-b", "1", "--grid", "0.5"])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("sweep,analytic")
    assert lines[1].startswith("0.5,")


def test_empty_grid_exits_with_configuration_code(capsys):
    assert dispatch(["coverage", "--grid", ""]) == 3
    assert "grid is empty" in capsys.readouterr().err


def test_negative_grid_values_parse(tmp_path):
    out = tmp_path / "coverage.csv"
    code = dispatch(["coverage", "--mu-b", "0", "--lambda-b", "1", "--grid", "-5,0,5", "--out", str(out)])
    assert code == 0
    assert [row[0] for row in _rows(out)[1:]] == ["-5", "0", "5"]


def test_negative_threshold_flag_parses(capsys):
    assert dispatch(["coverage", "--mu-b", "0", "--threshold-db", "-3", "--sweep", "lambda_b", "--grid", "1"]) == 0
    assert capsys.readouterr().out.splitlines()[1].startswith("1,")


def test_glue_leaves_other_tokens_alone():
    argv = ["coverage", "--grid", "-5,0", "--alpha", "4", "--", "-x"]
    assert glue_negative_values(argv) == ["coverage", "--grid=-5,0", "--alpha", "4", "--", "-x"]


def test_zero_trials_exits_with_configuration_code():
    assert dispatch(["coverage", "--engine", "mc", "--trials", "0", "--grid", "0"]) == 3


def test_bad_parameter_exits_with_configuration_code():
    assert dispatch(["coverage", "--alpha", "1.5", "--grid", "0"]) == 3


def test_usage_errors_exit_with_configuration_code():
    with pytest.raises(SystemExit) as exc:
        dispatch(["links"])
    assert exc.value.code == 3


def test_fig3_requires_lambda_l(tmp_path):
    assert dispatch(["figure", "fig3", "--out", str(tmp_path)]) == 3


def test_degenerate_link_exits_with_configuration_code(tmp_path):
    out = tmp_path / "v2i.csv"
    assert dispatch(["links", "--link", "v2i", "--mu-b", "0", "--grid", "0", "--out", str(out)]) == 3
    assert _rows(out) == [["sweep", "analytic", "analytic_err", "mc", "mc_stderr", "n_trials", "z"]]
    assert json.loads((tmp_path / "v2i.json").read_text())["status"] == "FAIL"


def test_dump_realization(tmp_path):
    snapshot = tmp_path / "snapshot.csv"
    code = dispatch(
        ["assoc", "--mu-b", "0", "--grid", "1", "--sweep", "lambda_b", "--dump-realization", str(snapshot),
         "--out", str(tmp_path / "assoc.csv")]
    )
    assert code == 0
    rows = _rows(snapshot)
    assert rows[0] == ["kind", "r", "theta", "t", "x", "y"]
    kinds = {row[0] for row in rows[1:]}
    assert kinds <= {"line", "pbs"}
    assert "pbs" in kinds


@pytest.mark.slow
def test_compare_degenerate_sweep_passes(tmp_path, capsys):
    out = tmp_path / "compare.csv"
    code = dispatch(
        ["compare", "coverage", "--mu-b", "0", "--lambda-b", "1", "--grid", "-5,0,5", "--trials", "2000",
         "--out", str(out)]
    )
    assert code == 0
    assert "PASS" in capsys.readouterr().err
    assert len(_rows(out)) == 4


@pytest.mark.slow
def test_figure_writes_one_csv_per_curve(tmp_path):
    code = dispatch(["figure", "fig3", "--lambda-l", "5", "--out", str(tmp_path)])
    assert code == 0
    for lambda_b in ("1", "10", "100"):
        rows = _rows(tmp_path / f"fig3-lambda_b-{lambda_b}.csv")
        values = [float(row[1]) for row in rows[1:]]
        assert len(values) == 13
        assert values == sorted(values)
        assert (tmp_path / f"fig3-lambda_b-{lambda_b}.json").exists()
