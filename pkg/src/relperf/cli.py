"""Command-line entry point.

Configuration is a TOML file; reports are JSON; numeric tables are CSV
with 17 significant digits.  Identical configs produce bit-identical
outputs.  Exit codes:

* solve:  0 verified, 1 config error, 2 solver failure, 3 verification failure
* verify: 0 within tolerance, 1 input error, 3 residuals too large
* oracle: 0 agreement, 1 config error, 2 solver failure,
          3 disagreement, 4 oracle did not converge (inconclusive)
* sweep:  0 all rows solved and distances monotone, 1 config error,
          5 row failure or monotonicity breach
"""

from __future__ import annotations

import argparse
import sys

try:
    import tomllib
except ImportError:  # python < 3.11
    import tomli as tomllib

import numpy as np

from . import equilibrium, oracle, sweeps
from .errors import (
    MaxIterationsExceeded,
    RelperfError,
    SingularJacobianError,
    VerificationFailed,
)
from .gmap import Game
from .hmap import WealthVector
from .market import lognormal_market, market_from_csv
from .preferences import AgentSpec, CRRA, SinePerturbedCRRA, TanhBlendCRRA


class ConfigError(Exception):
    pass


_FAMILIES = {
    "crra": (CRRA, ("r",)),
    "sine_perturbed_crra": (SinePerturbedCRRA, ("r", "eps_amp")),
    "tanh_blend_crra": (TanhBlendCRRA, ("r_mean", "delta")),
}


def _require(table, key, where):
    if key not in table:
        raise ConfigError("missing key %r in [%s]" % (key, where))
    return table[key]


def load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc)) from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("config parse error in %s: %s" % (path, exc)) from exc


def build_market(cfg: dict):
    table = _require(cfg, "market", "config")
    kind = _require(table, "kind", "market")
    try:
        if kind == "lognormal":
            return lognormal_market(
                theta=float(_require(table, "theta", "market")),
                horizon=float(table.get("horizon", 1.0)),
                nodes=int(table.get("nodes", 64)),
            )
        if kind == "csv":
            return market_from_csv(_require(table, "path", "market"))
    except (ValueError, OSError) as exc:
        raise ConfigError("invalid market: %s" % exc) from exc
    raise ConfigError("market kind must be 'lognormal' or 'csv', got %r" % kind)


def build_game(cfg: dict) -> Game:
    agent_tables = cfg.get("agents")
    if not agent_tables:
        raise ConfigError("config needs at least two [[agents]] tables")
    agents = []
    for idx, table in enumerate(agent_tables):
        family = _require(table, "family", "agents[%d]" % idx)
        if family not in _FAMILIES:
            raise ConfigError(
                "agents[%d]: unknown family %r (choose from %s)"
                % (idx, family, sorted(_FAMILIES))
            )
        cls, params = _FAMILIES[family]
        try:
            pref = cls(**{p: float(_require(table, p, "agents[%d]" % idx)) for p in params})
            agents.append(
                AgentSpec(
                    pref=pref,
                    lam=float(table.get("lambda", 0.0)),
                    x0=float(table.get("x0", 1.0)),
                )
            )
        except ValueError as exc:
            raise ConfigError("agents[%d]: %s" % (idx, exc)) from exc
    try:
        return Game(tuple(agents))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _solver_opts(cfg: dict, args) -> dict:
    table = cfg.get("solver", {})
    tol = args.tol if args.tol is not None else float(table.get("tol", 1e-10))
    max_iter = (
        args.max_iter if args.max_iter is not None else int(table.get("max_iter", 60))
    )
    return {"tol": tol, "max_iter": max_iter}


def _write_trace(trace, path) -> None:
    with open(path, "w") as fh:
        fh.write("iteration,residual,step_size\n")
        for it, resid, step in trace:
            fh.write("%d,%.17g,%.17g\n" % (it, resid, step))


def cmd_solve(args) -> int:
    try:
        cfg = load_config(args.config)
        m = build_market(cfg)
        game = build_game(cfg)
        opts = _solver_opts(cfg, args)
        outputs = cfg.get("outputs", {})
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 1
    try:
        profile, trace = equilibrium.solve(game, m, collect_trace=True, **opts)
    except (MaxIterationsExceeded, SingularJacobianError, RelperfError) as exc:
        if isinstance(exc, VerificationFailed):
            print("verification failed: %s" % exc, file=sys.stderr)
            return 3
        print("solver failure: %s" % exc, file=sys.stderr)
        return 2
    wealth_path = outputs.get("wealth_csv", "wealth.csv")
    report_path = outputs.get("report", "report.json")
    equilibrium.write_wealth_csv(m, profile.wealth, wealth_path)
    equilibrium.write_report(profile, report_path, wealth_csv_path=wealth_path)
    if "trace" in outputs:
        _write_trace(trace, outputs["trace"])
    print(
        "solved: regime=%s foc=%.3g budget=%.3g iters=%d"
        % (
            profile.regime_label,
            profile.foc_residual,
            profile.budget_residual,
            profile.newton_iters,
        )
    )
    return 0


def cmd_verify(args) -> int:
    try:
        cfg = load_config(args.config)
        m = build_market(cfg)
        game = build_game(cfg)
        _, _, wealth = equilibrium.read_wealth_csv(args.wealth)
    except (ConfigError, ValueError, OSError) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return 1
    if wealth.shape != (m.atom_count, game.n):
        print(
            "input error: wealth matrix shape %s does not match %d atoms x %d agents"
            % (wealth.shape, m.atom_count, game.n),
            file=sys.stderr,
        )
        return 1
    try:
        foc, budget = equilibrium.verify(game, m, None, wealth)
    except ValueError as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return 1
    tol = args.tol if args.tol is not None else 1e-8
    print("foc_residual=%.17g budget_residual=%.17g" % (foc, budget))
    return 0 if (foc <= tol and budget <= tol) else 3


def cmd_oracle(args) -> int:
    try:
        cfg = load_config(args.config)
        m = build_market(cfg)
        game = build_game(cfg)
        opts = _solver_opts(cfg, args)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 1
    try:
        profile = equilibrium.solve(game, m, **opts)
    except RelperfError as exc:
        print("solver failure: %s" % exc, file=sys.stderr)
        return 2
    # independent start: each agent's decoupled optimum, ignoring others
    start = np.empty_like(profile.wealth)
    ones = np.ones(m.atom_count)
    for i, agent in enumerate(game.agents):
        start[:, i], _ = oracle.single_agent_solve(agent.pref, m, ones, agent.x0)
    iterated, converged, history = oracle.fixed_point_iterate(
        game, m, game.x0, start
    )
    if not converged:
        print(
            "oracle inconclusive: best-response iteration did not converge "
            "(last change %.3g)" % history[-1],
            file=sys.stderr,
        )
        return 4
    diff = float(np.abs(iterated - profile.wealth).max())
    print("oracle sup-norm disagreement: %.17g (rounds=%d)" % (diff, len(history)))
    if diff > 1e-6:
        print("oracle and solver disagree beyond tolerance", file=sys.stderr)
        return 3
    return 0


def cmd_sweep(args) -> int:
    try:
        cfg = load_config(args.config)
        m = build_market(cfg)
        game = build_game(cfg)
        table = _require(cfg, "sweep", "config")
        axis = _require(table, "axis", "sweep")
        grid = _require(table, "grid", "sweep")
        output = table.get("output", "sweep.csv")
        sweep_cfg = sweeps.SweepConfig(
            base_game=game, market=m, axis=axis, grid=np.asarray(grid, dtype=float)
        )
    except (ConfigError, ValueError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 1
    rows = sweeps.run_sweep(sweep_cfg)
    sweeps.write_sweep_csv(rows, output)
    failed = [r for r in rows if r["status"] != "ok"]
    if failed:
        print("%d sweep row(s) failed" % len(failed), file=sys.stderr)
        return 5
    if not sweeps.distances_monotone(rows):
        print("sweep distances are not monotone along the grid", file=sys.stderr)
        return 5
    print("sweep complete: %d rows written to %s" % (len(rows), output))
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relperf",
        description="Nash equilibria of the multiplicative relative-performance game",
    )
    parser.add_argument("--tol", type=float, default=None, help="solver/verify tolerance")
    parser.add_argument("--max-iter", type=int, default=None, help="Newton iteration cap")
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="accepted for compatibility; computation is vectorized, not threaded",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve the equilibrium for a config")
    p_solve.add_argument("config")
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="check a wealth matrix against a config")
    p_verify.add_argument("config")
    p_verify.add_argument("wealth")
    p_verify.set_defaults(func=cmd_verify)

    p_oracle = sub.add_parser("oracle", help="cross-check with best-response iteration")
    p_oracle.add_argument("config")
    p_oracle.set_defaults(func=cmd_oracle)

    p_sweep = sub.add_parser("sweep", help="run a convergence sweep to CSV")
    p_sweep.add_argument("config")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
