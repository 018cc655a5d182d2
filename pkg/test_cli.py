"""
Command-line surface: CSV tables, reproducibility, configuration errors and
exit codes.
"""

import io
import json

import pandas as pd
import pytest

from cli import run
from cli.commands import build_parser, get_cli_commands
from cli.config import load_run_config, parse_grid
from exceptions import InvalidParameter


def _table(text: str) -> pd.DataFrame:
    return pd.read_csv(io.StringIO(text))


def _log_records(text: str):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_registry_names_every_command():
    names = [command['name'] for command in get_cli_commands()]
    assert names == ["price", "psi", "phi1", "phi2", "verify"]
    assert all("columns:" in command['help'] for command in get_cli_commands())


def test_price_writes_one_row(capsys, baseline_config):
    code = run(["price", "--config", baseline_config, "--mc-n", "20000"])
    out = capsys.readouterr().out
    assert code == 0
    frame = _table(out)
    assert list(frame.columns) == ["payoff", "strike", "price", "price_error", "method",
                                   "mc_price", "mc_std_error", "mc_n", "seed"]
    assert len(frame) == 1
    row = frame.iloc[0]
    assert row["payoff"] == "digital" and row["mc_n"] == 20000 and row["seed"] == 20240601
    assert abs(row["price"] - row["mc_price"]) <= 3.0 * row["mc_std_error"] + row["price_error"]


def test_full_hedge_cost_prints_the_price(capsys, baseline_config):
    assert run(["price", "--config", baseline_config, "--mc-n", "1000"]) == 0
    price_line = capsys.readouterr().out.splitlines()[1].split(",")
    assert run(["phi2", "--config", baseline_config, "--alpha-grid", "0"]) == 0
    phi2_line = capsys.readouterr().out.splitlines()[1].split(",")
    assert phi2_line[1] == price_line[2]
    assert phi2_line[4] == "full_hedge"


def test_reruns_are_byte_identical(capsys, baseline_config):
    argv = ["psi", "--config", baseline_config, "--payoff", "spread", "--strike", "5"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    assert capsys.readouterr().out == first
    assert first.startswith("c,psi1,psi1_error,psi2,psi2_error,method\n")


def test_grids_come_from_the_run_file(capsys, baseline_config):
    assert run(["phi1", "--config", baseline_config]) == 0
    frame = _table(capsys.readouterr().out)
    assert frame["x"].tolist() == [0.0, 10.0, 20.0, 30.0, 45.0]
    assert frame["branch"].iloc[0] == "zero_budget"
    assert frame["phi1"].is_monotonic_increasing


def test_out_writes_a_file(tmp_path, capsys, baseline_config):
    target = tmp_path / "tables" / "phi2.csv"
    code = run(["phi2", "--config", baseline_config, "--alpha-grid", "0,0.05", "--out", str(target)])
    assert code == 0
    assert capsys.readouterr().out == ""
    frame = _table(target.read_text())
    assert frame["cost_ratio"].iloc[0] == 1.0
    assert frame["cost_ratio"].iloc[1] < 1.0


@pytest.mark.parametrize("argv", [
    ["price", "--config", "configs/missing.toml"],
    ["price", "--payoff", "basket"],
    ["psi", "--c-grid", "0.1,zero"],
    ["psi", "--c-grid", "0.2,0.1"],
    ["phi2", "--alpha-grid", "0.5,1.5"],
    ["bogus"],
])
def test_bad_input_exits_1(capsys, baseline_config, argv):
    if "--config" not in argv and argv[0] != "bogus":
        argv = argv + ["--config", baseline_config]
    assert run(argv) == 1
    assert capsys.readouterr().out == ""


def test_invalid_market_is_named(tmp_path, capsys, baseline_config):
    text = open(baseline_config, encoding="utf-8").read().replace("rho = 0.5", "rho = 1.0")
    path = tmp_path / "bad.toml"
    path.write_text(text, encoding="utf-8")
    assert run(["price", "--config", str(path)]) == 1
    records = _log_records(capsys.readouterr().err)
    assert any("rho" in json.dumps(record) for record in records)


def test_unreachable_tolerance_exits_2(capsys, baseline_config):
    code = run(["psi", "--config", baseline_config, "--abs-tol", "1e-300", "--rel-tol", "0"])
    captured = capsys.readouterr()
    assert code == 2
    records = _log_records(captured.err)
    assert any(r.get("customDimensions", {}).get("error_type") == "ToleranceNotMet" for r in records)


@pytest.fixture
def small_verify_grids(monkeypatch):
    import cli.verify as verify

    monkeypatch.setattr(verify, "SPREAD_PAIRS", 200)
    monkeypatch.setattr(verify, "SPREAD_POINTS", 101)
    monkeypatch.setattr(verify, "NP_MARKETS", 5)


VERIFY_ROWS = [
    "measure.density_mean", "anchor.psi1_at_zero", "anchor.psi2_at_zero", "monotone.psi_curve",
    "limit.psi1_to_prob_zero", "limit.psi2_to_zero", "phi.monotone", "phi1.budget_feasible",
    "phi2.success_probability", "duality.round_trip", "neyman_pearson.threshold_optimal",
    "spread.set_membership",
]


def test_verify_covers_limits_and_phi_checks(capsys, baseline_config, small_verify_grids):
    code = run(["verify", "--config", baseline_config, "--mc-n", "50000"])
    frame = _table(capsys.readouterr().out)
    assert set(VERIFY_ROWS) <= set(frame["check"])
    assert (frame["status"] == "PASS").all(), frame[frame["status"] != "PASS"].to_dict("records")
    assert code == 0


def test_verify_uses_full_grids_by_default():
    import cli.verify as verify

    assert verify.MONOTONE_POINTS == 50
    assert verify.SPREAD_PAIRS == 10_000 and verify.SPREAD_POINTS == 1000
    assert (verify.NP_MARKETS, verify.NP_ATOMS) == (50, 12)


@pytest.mark.slow
def test_verify_full_grids_pass_on_baseline(capsys, baseline_config):
    assert run(["verify", "--config", baseline_config, "--mc-n", "100000"]) == 0
    frame = _table(capsys.readouterr().out)
    row = frame[frame["check"] == "spread.set_membership"].iloc[0]
    assert row["status"] == "PASS" and row["value"] == 0.0
    assert "10000 (c, y) pairs" in row["detail"]


def test_verify_reports_degenerate_measure(capsys, degenerate_config, small_verify_grids):
    code = run(["verify", "--config", degenerate_config, "--mc-n", "20000"])
    frame = _table(capsys.readouterr().out)
    assert code == 0
    assert list(frame.columns) == ["check", "status", "value", "error", "detail"]
    status = dict(zip(frame["check"], frame["status"]))
    row = frame[frame["check"] == "duality.round_trip"].iloc[0]
    assert row["status"] == "DEGENERATE"
    assert "DegenerateMeasure" in row["detail"]
    assert status["degenerate.digital_closed_form"] == "PASS"
    assert status["phi.monotone"] == status["phi2.success_probability"] == "DEGENERATE"
    assert status["limit.psi1_to_prob_zero"] == status["limit.psi2_to_zero"] == "PASS"
    assert (frame["status"] != "FAIL").all()


def test_parse_grid():
    assert parse_grid("0, 0.5,1e-3") == [0.0, 0.5, 0.001]
    with pytest.raises(InvalidParameter):
        parse_grid("a,b")


def test_overrides_replace_run_file_values(baseline_config):
    config = load_run_config(baseline_config, {
        "payoff": {"kind": "outperf", "strike": 90.0},
        "monte_carlo": {"n": 10, "seed": None},
        "grids": {"c": None},
    })
    assert config.payoff.kind.value == "outperf" and config.payoff.strike == 90.0
    assert config.monte_carlo.n == 10 and config.monte_carlo.seed == 20240601
    assert config.grids.c == [0.001, 0.01, 0.02, 0.05, 0.1]


def test_parser_rejects_instead_of_exiting():
    with pytest.raises(InvalidParameter):
        build_parser().parse_args(["price", "--strike", "abc"])
