"""Top-level equilibrium solve, verification and closed-form cases."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import VerificationFailed
from .gmap import Game, g_apply
from .hmap import WealthVector, crra_reference, h_cal, h_invert
from .market import Market
from .oracle import single_agent_solve
from .preferences import CRRA

FOC_TOL = 1e-8
BUDGET_TOL = 1e-8

REGIME_CRRA = "crra-closed-form"
REGIME_NO_COMPETITION = "no-competition"
REGIME_PROP_42 = "prop-4.2"
REGIME_PROP_43 = "prop-4.3"
REGIME_UNVERIFIED = "unverified-regime"

# engineering defaults, not theoretical certificates: the provable
# thresholds behind the two diffeomorphism regimes are non-constructive
PROP_42_RRA_SPREAD = 0.25
PROP_43_LAMBDA_MAX = 0.1


@dataclass
class EquilibriumProfile:
    """Terminal wealths per atom and agent, plus diagnostics."""

    wealth: np.ndarray  # (K, N), strictly positive
    dual: np.ndarray  # (N,), log dual constants
    budgets: np.ndarray  # (N,), E^Q of each agent's wealth
    foc_residual: float
    budget_residual: float
    regime_label: str
    newton_iters: int = 0


def classify_regime(game: Game) -> str:
    """Regime label from the certified preference bounds."""
    if all(isinstance(a.pref, CRRA) for a in game.agents):
        return REGIME_CRRA
    if np.all(game.lam == 0.0):
        return REGIME_NO_COMPETITION
    if np.max(game.rra_hi - game.rra_lo) <= PROP_42_RRA_SPREAD:
        return REGIME_PROP_42
    if game.lam.max() <= PROP_43_LAMBDA_MAX and np.all(np.isfinite(game.rra_hi)):
        return REGIME_PROP_43
    return REGIME_UNVERIFIED


def _wealths(game: Game, x0) -> WealthVector:
    if x0 is None:
        return WealthVector(game.x0)
    if isinstance(x0, WealthVector):
        return x0
    return WealthVector(np.asarray(x0, dtype=float))


def verify(game: Game, m: Market, x0, profile):
    """First-order-condition and budget residuals of a wealth matrix.

    At an equilibrium, G(ln X_k) - ln z_k is the same dual vector at
    every atom; the residual measures the spread around its Q-weighted
    mean.  Returns ``(foc_residual, budget_residual)``.
    """
    wv = _wealths(game, x0)
    profile = np.asarray(profile, dtype=float)
    if profile.shape != (m.atom_count, game.n):
        raise ValueError("profile must have shape (atoms, agents)")
    if np.any(profile <= 0.0):
        raise ValueError("profile entries must be strictly positive")
    u = g_apply(game, np.log(profile)) - m.log_z[:, None]
    q_weights = m.p * m.z  # sums to 1 by the density normalization
    d_star = q_weights @ u
    foc_residual = float(np.abs(u - d_star).max())
    budget_residual = float(np.abs(m.expect_q(profile) - wv.x0).max())
    return foc_residual, budget_residual


def _finish(game, m, wv, wealth, dual, regime, iters) -> EquilibriumProfile:
    budgets = m.expect_q(wealth)
    foc, bud = verify(game, m, wv, wealth)
    if foc > FOC_TOL or bud > BUDGET_TOL * wv.x0.max():
        raise VerificationFailed(
            "solved profile failed verification (foc %g, budget %g)" % (foc, bud),
            foc_residual=foc,
            budget_residual=bud,
        )
    return EquilibriumProfile(
        wealth=wealth,
        dual=np.asarray(dual, dtype=float),
        budgets=budgets,
        foc_residual=foc,
        budget_residual=bud,
        regime_label=regime,
        newton_iters=iters,
    )


def solve(
    game: Game,
    m: Market,
    x0=None,
    tol: float = 1e-10,
    max_iter: int = 60,
    collect_trace: bool = False,
):
    """Compute the Nash equilibrium financing the given initial wealths.

    Inverts h at ln(x0), evaluates the wealth map at the resulting dual
    vector, and verifies the first-order conditions and budgets.  When
    ``collect_trace`` is set, returns ``(profile, trace)``.
    """
    wv = _wealths(game, x0)
    res = h_invert(
        game, m, wv.log_x0, tol=tol, max_iter=max_iter, collect_trace=collect_trace
    )
    wealth = h_cal(game, m, res.d)
    profile = _finish(game, m, wv, wealth, res.d, classify_regime(game), res.iterations)
    if collect_trace:
        return profile, res.trace
    return profile


def crra_closed_form(game: Game, m: Market, x0=None) -> EquilibriumProfile:
    """Closed-form equilibrium for an all-CRRA game.

    With A = J_c^{-1} 1, agent i holds x0_i * z^{A_i} / E^Q[z^{A_i}].
    """
    if not all(isinstance(a.pref, CRRA) for a in game.agents):
        raise ValueError("closed form requires every preference to be CRRA")
    wv = _wealths(game, x0)
    j_c, a, hc0 = crra_reference(game, m)
    denom = np.array([m.expect_q(m.z**ai) for ai in a])
    wealth = wv.x0 * m.z[:, None] ** a / denom
    dual = j_c @ (wv.log_x0 - hc0)
    return _finish(game, m, wv, wealth, dual, REGIME_CRRA, 0)


def no_competition_solve(game: Game, m: Market, x0=None) -> EquilibriumProfile:
    """Decoupled solve when every competition weight is zero.

    Each agent independently holds I_i(y_i z) with y_i fixed by the
    budget; the dual vector is ln(y).
    """
    if np.any(game.lam != 0.0):
        raise ValueError("decoupled solve requires lam_i = 0 for every agent")
    wv = _wealths(game, x0)
    ones = np.ones(m.atom_count)
    wealth = np.empty((m.atom_count, game.n))
    dual = np.empty(game.n)
    for i, agent in enumerate(game.agents):
        g, y = single_agent_solve(agent.pref, m, ones, float(wv.x0[i]))
        wealth[:, i] = g
        dual[i] = np.log(y)
    return _finish(game, m, wv, wealth, dual, REGIME_NO_COMPETITION, 0)


def write_wealth_csv(m: Market, wealth, path) -> None:
    """CSV with columns atom, p, z, X^1..X^N at 17 significant digits."""
    wealth = np.asarray(wealth, dtype=float)
    n = wealth.shape[1]
    header = "atom,p,z," + ",".join("X%d" % (i + 1) for i in range(n))
    data = np.column_stack([np.arange(m.atom_count), m.p, m.z, wealth])
    fmt = ["%d"] + ["%.17g"] * (2 + n)
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt=fmt)


def read_wealth_csv(path):
    """Read a wealth CSV back as ``(p, z, wealth)``."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] < 4:
        raise ValueError("wealth CSV needs columns atom, p, z and one agent")
    return data[:, 1], data[:, 2], data[:, 3:]


def report_dict(profile: EquilibriumProfile, wealth_csv_path=None) -> dict:
    """JSON-ready summary of a solved equilibrium.

    Uniqueness is asserted only inside the provable regimes.
    """
    return {
        "regime_label": profile.regime_label,
        "unique": profile.regime_label != REGIME_UNVERIFIED,
        "dual": profile.dual.tolist(),
        "budgets": profile.budgets.tolist(),
        "residuals": {
            "foc": profile.foc_residual,
            "budget": profile.budget_residual,
        },
        "newton_iterations": profile.newton_iters,
        "wealth_csv": None if wealth_csv_path is None else str(wealth_csv_path),
    }


def write_report(profile: EquilibriumProfile, path, wealth_csv_path=None) -> None:
    with open(path, "w") as fh:
        json.dump(report_dict(profile, wealth_csv_path), fh, indent=2, sort_keys=True)
        fh.write("\n")
