"""Independent verification path for equilibria.

The characterization-based solver never touches the individual
optimization problems directly, so this module provides a second road
to the same object: single-agent utility maximization with a numeraire
(solved by monotone root-finding on the dual variable), and
best-response iteration over agents as a fixed-point check.  The
fixed-point oracle is only trusted where it converges; non-convergence
is reported, not treated as evidence of non-existence.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad

from .errors import RootBracketError
from .gmap import Game
from .market import Market
from .preferences import Preference

BUDGET_RTOL = 1e-12
FIXED_POINT_TOL = 1e-9


def single_agent_solve(pref: Preference, m: Market, l, x: float, rtol: float = BUDGET_RTOL):
    """Maximize E[U(g/L)] over payoffs with price x.

    The optimizer satisfies U'(g/L) = y L Z for a constant y > 0 pinned
    down by the budget E^Q[g] = x.  Returns ``(g, y)`` with g the payoff
    per atom.  The budget is monotone decreasing in y, so y is found by
    bisection on ln y after geometric bracket expansion.
    """
    if not x > 0:
        raise ValueError("budget x must be positive")
    l = np.asarray(l, dtype=float)
    if l.shape != (m.atom_count,) or np.any(l <= 0.0):
        raise ValueError("numeraire must be strictly positive with one entry per atom")

    def budget(t):
        g = l * pref.inverse_marginal(np.exp(t) * l * m.z)
        return m.expect_q(g) - x

    lo, hi = -1.0, 1.0
    for _ in range(200):
        if budget(lo) >= 0.0:
            break
        lo *= 2.0
    else:
        raise RootBracketError("budget bracket expansion failed (lo=%g)" % lo)
    for _ in range(200):
        if budget(hi) <= 0.0:
            break
        hi *= 2.0
    else:
        raise RootBracketError("budget bracket expansion failed (hi=%g)" % hi)

    t = 0.5 * (lo + hi)
    for _ in range(200):
        t = 0.5 * (lo + hi)
        f = budget(t)
        if abs(f) <= rtol * x:
            break
        if f > 0.0:
            lo = t
        else:
            hi = t
        if hi - lo < 1e-16 * (1.0 + abs(t)):
            break
    y = np.exp(t)
    g = l * pref.inverse_marginal(y * l * m.z)
    return g, float(y)


def best_response(game: Game, m: Market, x0, profile, i: int):
    """Optimal wealth of agent i given the others' columns of profile."""
    profile = np.asarray(profile, dtype=float)
    if np.any(profile <= 0.0):
        raise ValueError("profile must be strictly positive")
    x0 = np.asarray(x0, dtype=float)
    log_others = np.log(profile).sum(axis=1) - np.log(profile[:, i])
    l = np.exp(game.mu[i] * log_others)
    g, _ = single_agent_solve(game.agents[i].pref, m, l, float(x0[i]))
    return g


def fixed_point_iterate(
    game: Game,
    m: Market,
    x0,
    start,
    max_rounds: int = 200,
    tol: float = FIXED_POINT_TOL,
):
    """Gauss-Seidel best-response sweeps from a starting profile.

    Agents are updated in order 1..N within each round for determinism.
    Returns ``(profile, converged, history)`` where history holds the
    sup-norm change per round.
    """
    profile = np.array(start, dtype=float)
    if np.any(profile <= 0.0):
        raise ValueError("starting profile must be strictly positive")
    history = []
    converged = False
    for _ in range(max_rounds):
        change = 0.0
        for i in range(game.n):
            new_col = best_response(game, m, x0, profile, i)
            change = max(change, float(np.abs(new_col - profile[:, i]).max()))
            profile[:, i] = new_col
        history.append(change)
        if change <= tol:
            converged = True
            break
    return profile, converged, history


def utility_value(pref: Preference, x):
    """Recover U from v by quadrature, anchored at U(1) = 0.

    U(x) = integral_1^x exp(v(ln t)) dt; used only for optimality
    spot-checks, never by the solvers.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("utility defined on positive wealth only")

    def marginal(t):
        return np.exp(pref.v(np.log(t)))

    flat = np.atleast_1d(x)
    vals = np.array([quad(marginal, 1.0, xi, limit=200)[0] for xi in flat])
    return vals[0] if x.ndim == 0 else vals


def expected_utility(pref: Preference, m: Market, g, l=None):
    """E_P[U(g/L)] with U anchored at U(1) = 0 (spot-check helper)."""
    g = np.asarray(g, dtype=float)
    ratio = g if l is None else g / np.asarray(l, dtype=float)
    return float(m.expect_p(utility_value(pref, ratio)))
