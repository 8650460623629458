import json

import numpy as np
import pytest

from relperf import lognormal_market, market_to_csv
from relperf.cli import main

BASE_MARKET = """
[market]
kind = "lognormal"
theta = 0.3
horizon = 1.0
nodes = 16
"""

CRRA_AGENTS = """
[[agents]]
family = "crra"
r = 2.0
lambda = 0.5
x0 = 1.0

[[agents]]
family = "crra"
r = 3.0
lambda = 0.3
x0 = 2.0
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def solve_config(tmp_path, agents=CRRA_AGENTS, market=BASE_MARKET):
    report = tmp_path / "report.json"
    wealth = tmp_path / "wealth.csv"
    text = market + agents + (
        '\n[outputs]\nreport = "%s"\nwealth_csv = "%s"\n' % (report, wealth)
    )
    return write(tmp_path, "cfg.toml", text), report, wealth


def test_solve_and_verify_round_trip(tmp_path):
    cfg, report, wealth = solve_config(tmp_path)
    assert main(["solve", cfg]) == 0
    data = json.loads(report.read_text())
    assert data["regime_label"] == "crra-closed-form"
    assert data["unique"] is True
    assert data["residuals"]["foc"] <= 1e-8
    # feeding the solve output back verifies cleanly
    assert main(["verify", cfg, str(wealth)]) == 0


def test_solve_deterministic_outputs(tmp_path):
    cfg, report, wealth = solve_config(tmp_path)
    assert main(["solve", cfg]) == 0
    first = report.read_text(), wealth.read_text()
    assert main(["solve", cfg]) == 0
    assert (report.read_text(), wealth.read_text()) == first


def test_verify_rejects_perturbed_wealth(tmp_path):
    cfg, _, wealth = solve_config(tmp_path)
    assert main(["solve", cfg]) == 0
    rows = wealth.read_text().splitlines()
    cells = rows[1].split(",")
    cells[3] = str(float(cells[3]) * 1.05)
    rows[1] = ",".join(cells)
    wealth.write_text("\n".join(rows) + "\n")
    assert main(["verify", cfg, str(wealth)]) == 3


def test_verify_rejects_truncated_csv(tmp_path):
    cfg, _, wealth = solve_config(tmp_path)
    assert main(["solve", cfg]) == 0
    rows = wealth.read_text().splitlines()
    wealth.write_text("\n".join(rows[: len(rows) // 2]) + "\n")
    assert main(["verify", cfg, str(wealth)]) == 1


def test_config_errors_exit_1(tmp_path):
    assert main(["solve", str(tmp_path / "missing.toml")]) == 1
    bad_family = BASE_MARKET + '\n[[agents]]\nfamily = "nope"\nr = 2.0\n' * 2
    assert main(["solve", write(tmp_path, "a.toml", bad_family)]) == 1
    no_agents = write(tmp_path, "b.toml", BASE_MARKET)
    assert main(["solve", no_agents]) == 1
    not_toml = write(tmp_path, "c.toml", "[market\nkind=")
    assert main(["solve", not_toml]) == 1


def test_rra_bound_violation_is_a_config_error(tmp_path, capsys):
    # CRRA(0.4) with lambda = 1 in a 2-player game: rra_lo <= mu/(1+mu)
    agents = """
[[agents]]
family = "crra"
r = 0.4
lambda = 1.0

[[agents]]
family = "crra"
r = 2.0
lambda = 1.0
"""
    cfg = write(tmp_path, "bound.toml", BASE_MARKET + agents)
    assert main(["solve", cfg]) == 1
    err = capsys.readouterr().err
    assert "mu/(1+mu)" in err


def test_csv_market_kind(tmp_path):
    m = lognormal_market(0.2, 1.0, 8)
    market_csv = tmp_path / "market.csv"
    market_to_csv(m, market_csv)
    market = '[market]\nkind = "csv"\npath = "%s"\n' % market_csv
    cfg, report, _ = solve_config(tmp_path, market=market)
    assert main(["solve", cfg]) == 0
    assert json.loads(report.read_text())["regime_label"] == "crra-closed-form"


def test_oracle_agreement(tmp_path):
    # decoupled game
    agents0 = CRRA_AGENTS.replace("lambda = 0.5", "lambda = 0.0").replace(
        "lambda = 0.3", "lambda = 0.0"
    )
    cfg0, _, _ = solve_config(tmp_path, agents=agents0)
    assert main(["oracle", cfg0]) == 0
    # small-competition game
    agents_small = """
[[agents]]
family = "tanh_blend_crra"
r_mean = 2.0
delta = 0.5
lambda = 0.05

[[agents]]
family = "sine_perturbed_crra"
r = 2.0
eps_amp = 0.1
lambda = 0.08
"""
    cfg1, _, _ = solve_config(tmp_path, agents=agents_small)
    assert main(["oracle", cfg1]) == 0


def test_oracle_never_silently_disagrees(tmp_path):
    """Outside the provable regimes the oracle reports 0, 3 or 4."""
    agents = """
[[agents]]
family = "tanh_blend_crra"
r_mean = 2.0
delta = 0.9
lambda = 0.9

[[agents]]
family = "tanh_blend_crra"
r_mean = 3.0
delta = 1.2
lambda = 0.8
"""
    cfg, _, _ = solve_config(tmp_path, agents=agents)
    assert main(["oracle", cfg]) in (0, 3, 4)


def sweep_config(tmp_path, axis, agents, grid="[0.2, 0.1, 0.05, 0.025]"):
    out = tmp_path / "sweep.csv"
    text = BASE_MARKET + agents + (
        '\n[sweep]\naxis = "%s"\ngrid = %s\noutput = "%s"\n' % (axis, grid, out)
    )
    return write(tmp_path, "sweep.toml", text), out


def test_sweep_rra_reference(tmp_path):
    agents = 3 * '\n[[agents]]\nfamily = "crra"\nr = 2.0\nlambda = 0.5\n'
    cfg, out = sweep_config(tmp_path, "rra_perturbation", agents)
    assert main(["sweep", cfg]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 5
    sup = [float(line.split(",")[1]) for line in lines[1:]]
    assert all(b < a for a, b in zip(sup, sup[1:]))


def test_sweep_lambda_reference(tmp_path):
    agents = 3 * (
        '\n[[agents]]\nfamily = "tanh_blend_crra"\nr_mean = 2.0\ndelta = 0.5\nlambda = 0.5\n'
    )
    cfg, _ = sweep_config(tmp_path, "lambda", agents)
    assert main(["sweep", cfg]) == 0


def test_sweep_bad_grid_exits_1(tmp_path):
    agents = 2 * '\n[[agents]]\nfamily = "crra"\nr = 2.0\nlambda = 0.5\n'
    cfg, _ = sweep_config(tmp_path, "rra_perturbation", agents, grid="[0.1, 0.2]")
    assert main(["sweep", cfg]) == 1


def test_global_tol_flag(tmp_path):
    cfg, _, _ = solve_config(tmp_path)
    assert main(["--tol", "1e-8", "solve", cfg]) == 0
