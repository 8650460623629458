import csv

import numpy as np
import pytest

from relperf import AgentSpec, CRRA, Game, SweepConfig, TanhBlendCRRA, lognormal_market, run_sweep, write_sweep_csv
from relperf.sweeps import AXIS_LAMBDA, AXIS_RRA, SWEEP_COLUMNS, distances_monotone

GRID = np.array([0.2, 0.1, 0.05, 0.025])


def crra_base(n=3, lam=0.5):
    return Game(tuple(AgentSpec(CRRA(2.0), lam) for _ in range(n)))


def test_config_validation():
    m = lognormal_market(0.3, 1.0, 8)
    with pytest.raises(ValueError):
        SweepConfig(base_game=crra_base(), market=m, axis="bogus", grid=GRID)
    with pytest.raises(ValueError):
        SweepConfig(base_game=crra_base(), market=m, axis=AXIS_RRA, grid=np.array([0.1, 0.2]))
    with pytest.raises(ValueError):
        SweepConfig(base_game=crra_base(), market=m, axis=AXIS_RRA, grid=np.array([0.2, -0.1]))
    tanh_base = Game(tuple(AgentSpec(TanhBlendCRRA(2.0, 0.5), 0.5) for _ in range(2)))
    with pytest.raises(ValueError):
        # RRA-perturbation sweeps only make sense from an all-CRRA base
        SweepConfig(base_game=tanh_base, market=m, axis=AXIS_RRA, grid=GRID)
    cfg = SweepConfig(base_game=crra_base(), market=m, axis=AXIS_RRA, grid=GRID)
    assert cfg.reference == "crra_closed_form"
    cfg2 = SweepConfig(base_game=tanh_base, market=m, axis=AXIS_LAMBDA, grid=GRID)
    assert cfg2.reference == "no_competition"


def test_rra_sweep_distances_shrink():
    m = lognormal_market(0.3, 1.0, 16)
    cfg = SweepConfig(base_game=crra_base(), market=m, axis=AXIS_RRA, grid=GRID)
    rows = run_sweep(cfg)
    assert [r["epsilon"] for r in rows] == list(GRID)
    assert all(r["status"] == "ok" for r in rows)
    for key in ("sup_dist", "l1_dist", "l2_dist"):
        vals = [r[key] for r in rows]
        assert all(b < a for a, b in zip(vals, vals[1:]))
    assert distances_monotone(rows)


def test_lambda_sweep_distances_shrink():
    m = lognormal_market(0.3, 1.0, 16)
    base = Game(tuple(AgentSpec(TanhBlendCRRA(2.0, 0.5), 0.5) for _ in range(3)))
    cfg = SweepConfig(base_game=base, market=m, axis=AXIS_LAMBDA, grid=GRID)
    rows = run_sweep(cfg)
    assert distances_monotone(rows)
    # the probability-weighted distances reach the closed-form reference
    assert rows[-1]["l1_dist"] < 1e-2
    assert rows[-1]["l2_dist"] < 1e-2


def test_solver_failures_recorded_per_row():
    m = lognormal_market(0.3, 1.0, 8)
    # amplitude 2.5 >= r = 2 is an invalid preference: the row fails, the
    # sweep itself survives
    cfg = SweepConfig(
        base_game=crra_base(), market=m, axis=AXIS_RRA, grid=np.array([2.5, 0.1])
    )
    rows = run_sweep(cfg)
    assert rows[0]["status"].startswith("error")
    assert np.isnan(rows[0]["sup_dist"])
    assert rows[1]["status"] == "ok"
    assert not distances_monotone(rows)


def test_monotonicity_check_logic():
    ok = [
        {"status": "ok", "sup_dist": 2.0, "l1_dist": 1.0, "l2_dist": 1.5},
        {"status": "ok", "sup_dist": 1.0, "l1_dist": 0.5, "l2_dist": 0.7},
    ]
    assert distances_monotone(ok)
    bumpy = [dict(ok[0]), dict(ok[1])]
    bumpy[1]["l2_dist"] = 1.6
    assert not distances_monotone(bumpy)


def test_csv_output(tmp_path):
    m = lognormal_market(0.3, 1.0, 8)
    cfg = SweepConfig(
        base_game=crra_base(2, 0.4), market=m, axis=AXIS_RRA, grid=np.array([0.1, 0.05])
    )
    rows = run_sweep(cfg)
    path = tmp_path / "sweep.csv"
    write_sweep_csv(rows, path)
    with open(path, newline="") as fh:
        read = list(csv.reader(fh))
    assert read[0] == SWEEP_COLUMNS
    assert len(read) == 3
    assert float(read[1][0]) == 0.1
    assert float(read[2][1]) == pytest.approx(rows[1]["sup_dist"])
