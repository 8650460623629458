"""Convergence sweeps toward the two closed-form limits.

Two one-parameter families of games admit a known limit: shrinking the
RRA perturbation of near-CRRA agents toward zero recovers the CRRA
closed form, and shrinking all competition weights toward zero recovers
the decoupled no-competition optimum.  A sweep solves the game along a
decreasing grid of the parameter and tabulates the distances to the
reference profile.  The theory guarantees convergence but no rate, so
the table is descriptive; only monotone decrease is asserted.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import equilibrium
from .errors import RelperfError
from .gmap import Game
from .hmap import WealthVector
from .market import Market
from .preferences import AgentSpec, CRRA, SinePerturbedCRRA

AXIS_RRA = "rra_perturbation"
AXIS_LAMBDA = "lambda"

_REFERENCE_FOR_AXIS = {
    AXIS_RRA: "crra_closed_form",
    AXIS_LAMBDA: "no_competition",
}

SWEEP_COLUMNS = [
    "epsilon",
    "sup_dist",
    "l1_dist",
    "l2_dist",
    "newton_iters",
    "foc_residual",
    "budget_residual",
    "status",
]

MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class SweepConfig:
    base_game: Game
    market: Market
    axis: str
    grid: np.ndarray
    x0: WealthVector | None = None
    reference: str = field(init=False)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("grid must be a non-empty 1-d sequence")
        if np.any(grid <= 0.0):
            raise ValueError("grid values must be positive")
        if np.any(np.diff(grid) >= 0.0):
            raise ValueError("grid must be strictly decreasing")
        if self.axis not in _REFERENCE_FOR_AXIS:
            raise ValueError("axis must be %r or %r" % (AXIS_RRA, AXIS_LAMBDA))
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "reference", _REFERENCE_FOR_AXIS[self.axis])
        if self.axis == AXIS_RRA:
            if not all(isinstance(a.pref, CRRA) for a in self.base_game.agents):
                raise ValueError(
                    "rra_perturbation sweeps need an all-CRRA base game"
                )


def _game_at(cfg: SweepConfig, eps: float) -> Game:
    agents = []
    for a in cfg.base_game.agents:
        if cfg.axis == AXIS_RRA:
            pref = SinePerturbedCRRA(a.pref.r, eps)
            agents.append(AgentSpec(pref=pref, lam=a.lam, x0=a.x0))
        else:
            agents.append(AgentSpec(pref=a.pref, lam=eps, x0=a.x0))
    return Game(tuple(agents))


def _reference_profile(cfg: SweepConfig):
    if cfg.axis == AXIS_RRA:
        return equilibrium.crra_closed_form(cfg.base_game, cfg.market, cfg.x0)
    zero_agents = tuple(
        AgentSpec(pref=a.pref, lam=0.0, x0=a.x0) for a in cfg.base_game.agents
    )
    return equilibrium.no_competition_solve(Game(zero_agents), cfg.market, cfg.x0)


def run_sweep(cfg: SweepConfig):
    """Solve the game along the grid; one result row per grid value.

    Solver failures are recorded in the row's ``status`` and do not
    abort the sweep.  Returns a list of dicts with :data:`SWEEP_COLUMNS`
    keys, in grid order.
    """
    ref = _reference_profile(cfg)
    m = cfg.market
    rows = []
    for eps in cfg.grid:
        row = {"epsilon": float(eps)}
        try:
            game = _game_at(cfg, float(eps))
            profile = equilibrium.solve(game, m, cfg.x0)
        except (RelperfError, ValueError) as exc:
            row.update(
                sup_dist=np.nan,
                l1_dist=np.nan,
                l2_dist=np.nan,
                newton_iters=-1,
                foc_residual=np.nan,
                budget_residual=np.nan,
                status="error: %s" % exc,
            )
            rows.append(row)
            continue
        diff = profile.wealth - ref.wealth
        l1 = m.expect_p(np.abs(diff)).max()
        l2 = np.sqrt(m.expect_p(diff**2)).max()
        row.update(
            sup_dist=float(np.abs(diff).max()),
            l1_dist=float(l1),
            l2_dist=float(l2),
            newton_iters=profile.newton_iters,
            foc_residual=profile.foc_residual,
            budget_residual=profile.budget_residual,
            status="ok",
        )
        rows.append(row)
    return rows


def distances_monotone(rows, slack: float = MONOTONE_SLACK) -> bool:
    """True when every distance column is nonincreasing along the grid."""
    ok_rows = [r for r in rows if r["status"] == "ok"]
    if len(ok_rows) != len(rows):
        return False
    for key in ("sup_dist", "l1_dist", "l2_dist"):
        vals = [r[key] for r in ok_rows]
        if any(b > a + slack for a, b in zip(vals, vals[1:])):
            return False
    return True


def write_sweep_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            out = []
            for key in SWEEP_COLUMNS:
                val = row[key]
                if isinstance(val, float):
                    out.append("%.17g" % val)
                else:
                    out.append(val)
            writer.writerow(out)
