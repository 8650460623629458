"""The coupled log-marginal map G of the N-player game.

With mu_i = lam_i/(N-1) and v_i the log-marginal of agent i, the map is

    G^i(y) = v_i(y_i - mu_i * sum_{j != i} y_j) - mu_i * sum_{j != i} y_j.

Nash equilibria are level sets of G at D + ln(Z) * 1, so everything in
the pipeline reduces to applying and inverting G.  Inversion goes
through a single scalar unknown s = sum_j y_j: for each component,
y_i is recovered from s via the inverse W_i of u -> v_i(u) +
(mu_i/(1+mu_i)) u, and s itself solves a strictly decreasing scalar
equation with a unique root.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InternalConsistencyError, RootBracketError
from .preferences import AgentSpec

S_BISECT_WIDTH = 1e-8
S_RESIDUAL = 1e-13
G_INVERT_RESIDUAL = 1e-10
CROSS_CHECK_TOL = 1e-10


@dataclass(frozen=True)
class Game:
    """N >= 2 agents with valid competition weights and RRA bounds."""

    agents: tuple[AgentSpec, ...]
    lam: np.ndarray = field(init=False, repr=False)
    mu: np.ndarray = field(init=False, repr=False)
    mu_tilde: np.ndarray = field(init=False, repr=False)  # mu/(1+mu)
    eps: np.ndarray = field(init=False, repr=False)  # rra_lo - mu/(1+mu)
    rra_lo: np.ndarray = field(init=False, repr=False)
    rra_hi: np.ndarray = field(init=False, repr=False)
    x0: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        agents = tuple(self.agents)
        n = len(agents)
        if n < 2:
            raise ValueError("game needs at least two agents")
        lam = np.array([a.lam for a in agents])
        mu = lam / (n - 1)
        mu_tilde = mu / (1.0 + mu)
        rra_lo = np.array([a.pref.rra_lo for a in agents])
        rra_hi = np.array([a.pref.rra_hi for a in agents])
        eps = rra_lo - mu_tilde
        bad = np.flatnonzero(eps <= 0.0)
        if bad.size:
            i = bad[0]
            raise ValueError(
                "agent %d violates the RRA lower bound: rra_lo=%g must exceed "
                "mu/(1+mu)=%g" % (i, rra_lo[i], mu_tilde[i])
            )
        if np.all(lam == 1.0) and not np.any(np.isfinite(rra_hi)):
            raise ValueError(
                "when every competition weight equals 1, at least one agent "
                "must have a finite RRA upper bound"
            )
        for arr in (lam, mu, mu_tilde, eps, rra_lo, rra_hi):
            arr.setflags(write=False)
        x0 = np.array([a.x0 for a in agents])
        x0.setflags(write=False)
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "mu_tilde", mu_tilde)
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "rra_lo", rra_lo)
        object.__setattr__(self, "rra_hi", rra_hi)
        object.__setattr__(self, "x0", x0)

    @property
    def n(self) -> int:
        return len(self.agents)

    def v_at(self, arg):
        """Stack v_i(arg[..., i]) along the last axis."""
        arg = np.asarray(arg, dtype=float)
        return np.stack(
            [a.pref.v(arg[..., i]) for i, a in enumerate(self.agents)], axis=-1
        )

    def v_prime_at(self, arg):
        arg = np.asarray(arg, dtype=float)
        return np.stack(
            [a.pref.v_prime(arg[..., i]) for i, a in enumerate(self.agents)], axis=-1
        )


def _own_argument(game: Game, y):
    """y_i - mu_i * sum_{j != i} y_j, vectorized over leading axes."""
    y = np.asarray(y, dtype=float)
    others = y.sum(axis=-1, keepdims=True) - y
    return y - game.mu * others, others


def g_apply(game: Game, y):
    """Evaluate G at y; accepts shape (N,) or (..., N)."""
    arg, others = _own_argument(game, y)
    return game.v_at(arg) - game.mu * others


def g_jacobian(game: Game, y):
    """Jacobian of G at y: diagonal v_i' and off-diagonal -(v_i'+1)*mu_i."""
    arg, _ = _own_argument(game, y)
    v = game.v_prime_at(arg)
    n = game.n
    jac = np.broadcast_to(
        (-(v + 1.0) * game.mu)[..., :, None], v.shape + (n,)
    ).copy()
    idx = np.arange(n)
    jac[..., idx, idx] = v
    return jac


def _w_all(game: Game, args):
    """W_i(args[..., i]) for all agents; args shape (..., N)."""
    return np.stack(
        [a.pref.w(game.mu[i], args[..., i]) for i, a in enumerate(game.agents)],
        axis=-1,
    )


def _w_prime_all(game: Game, w_vals):
    """W_i' evaluated through already-computed W values."""
    cols = []
    for i, a in enumerate(game.agents):
        cols.append(1.0 / (a.pref.v_prime(w_vals[..., i]) + game.mu_tilde[i]))
    return np.stack(cols, axis=-1)


def s_equation_residual(game: Game, z, s):
    """Left minus right side of the scalar equation determining s.

    Strictly decreasing in s with a unique root; exposed for testing.
    """
    z = np.asarray(z, dtype=float)
    s = np.asarray(s, dtype=float)
    c2 = 1.0 / (1.0 + game.mu)
    c0 = 1.0 - game.mu_tilde.sum()
    args = z + game.mu_tilde * s[..., None]
    w_vals = _w_all(game, args)
    return (c2 * w_vals).sum(axis=-1) - c0 * s


def g_invert(game: Game, z):
    """Invert G: the unique y with G(y) = z; accepts (N,) or (..., N)."""
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    z2 = z.reshape(-1, game.n)

    mt = game.mu_tilde
    c2 = 1.0 / (1.0 + game.mu)
    c0 = 1.0 - mt.sum()
    b_w = game.rra_hi - mt  # magnitude of the steepest slope of v + c*u

    def psi(s):
        args = z2 + mt * s[:, None]
        w_vals = _w_all(game, args)
        return (c2 * w_vals).sum(axis=1) - c0 * s, w_vals

    def psi_prime(s):
        args = z2 + mt * s[:, None]
        w_vals = _w_all(game, args)
        return (c2 * mt * _w_prime_all(game, w_vals)).sum(axis=1) - c0

    # slope of psi lies in [-slope_hi, -slope_lo] with slope_lo > 0 by the
    # standing RRA assumptions, which brackets the root directly
    inv_b = np.where(np.isfinite(b_w), 1.0 / b_w, 0.0)
    slope_lo = c0 + (c2 * mt * inv_b).sum()
    slope_hi = c0 + (c2 * mt / game.eps).sum()
    psi0, _ = psi(np.zeros(z2.shape[0]))
    end_a = psi0 / slope_lo
    end_b = psi0 / slope_hi
    pad = 1e-9 * (1.0 + np.abs(psi0))
    lo = np.minimum(end_a, end_b) - pad
    hi = np.maximum(end_a, end_b) + pad

    for _ in range(60):
        width = hi - lo
        bad_lo = psi(lo)[0] < 0.0
        bad_hi = psi(hi)[0] > 0.0
        if not (bad_lo.any() or bad_hi.any()):
            break
        lo = np.where(bad_lo, lo - width, lo)
        hi = np.where(bad_hi, hi + width, hi)
    else:
        raise RootBracketError(
            "failed to bracket the s-equation root (lo in [%g, %g], hi in [%g, %g])"
            % (lo.min(), lo.max(), hi.min(), hi.max())
        )

    for _ in range(200):
        if np.max(hi - lo) <= S_BISECT_WIDTH:
            break
        mid = 0.5 * (lo + hi)
        fm, _ = psi(mid)
        lo = np.where(fm >= 0.0, mid, lo)
        hi = np.where(fm < 0.0, mid, hi)

    s = 0.5 * (lo + hi)
    atol = S_RESIDUAL * (1.0 + np.max(np.abs(psi0)))
    w_vals = None
    for _ in range(12):
        fs, w_vals = psi(s)
        if np.max(np.abs(fs)) <= atol:
            break
        s = np.clip(s - fs / psi_prime(s), lo, hi)
    if w_vals is None:  # pragma: no cover - psi always evaluated above
        _, w_vals = psi(s)

    y = (w_vals + game.mu * s[:, None]) / (1.0 + game.mu)

    resid = np.abs(g_apply(game, y) - z2).max()
    if resid > G_INVERT_RESIDUAL:
        # one full Newton correction on G(y) = z cleans up accumulated
        # scalar-solver error
        r = g_apply(game, y) - z2
        step = np.linalg.solve(g_jacobian(game, y), r[..., None])[..., 0]
        y = y - step
        resid = np.abs(g_apply(game, y) - z2).max()
        if resid > G_INVERT_RESIDUAL:
            raise RootBracketError(
                "g_invert residual %g exceeds tolerance %g"
                % (resid, G_INVERT_RESIDUAL)
            )
    return y[0] if single else y.reshape(z.shape)


def g_inverse_jacobian(game: Game, z, check: bool = False):
    """[JG]^{-1} evaluated at G^{-1}(z).

    Defaults to a direct linear solve (LU with partial pivoting).  With
    ``check=True`` the explicit column construction is computed as well
    and a disagreement beyond tolerance raises.
    """
    z = np.asarray(z, dtype=float)
    y = g_invert(game, z)
    inv = np.linalg.inv(g_jacobian(game, y))
    if check:
        explicit = _explicit_inverse_at(game, y)
        diff = np.abs(inv - explicit).max()
        if diff > CROSS_CHECK_TOL:
            raise InternalConsistencyError(
                "explicit and LU inverse Jacobians disagree by %g" % diff
            )
    return inv


def g_inverse_jacobian_explicit(game: Game, z):
    """[JG]^{-1} via the closed-form column construction."""
    y = g_invert(game, np.asarray(z, dtype=float))
    return _explicit_inverse_at(game, y)


def _explicit_inverse_at(game: Game, y):
    """Closed form for [JG(y)]^{-1}: rank-one update of a diagonal.

    With v_i the diagonal slopes and mt_i = mu_i/(1+mu_i),
    the k-th column is g * s_k + e_k * diag_term, where
    e_k = 1/((1+mu_k)(v_k+mt_k)), g_i = (v_i+1)*mt_i/(v_i+mt_i), and
    s_k = e_k / (1 - sum_i g_i).
    """
    arg, _ = _own_argument(game, y)
    v = game.v_prime_at(arg)
    mt = game.mu_tilde
    denom = v + mt
    e = 1.0 / ((1.0 + game.mu) * denom)
    g_vec = (v + 1.0) * mt / denom
    c_fac = 1.0 - g_vec.sum(axis=-1, keepdims=True)
    s = e / c_fac
    inv = g_vec[..., :, None] * s[..., None, :]
    idx = np.arange(game.n)
    inv[..., idx, idx] += e
    return inv


def lipschitz_bound(game: Game) -> float:
    """A finite uniform bound on ||[JG]^{-1}||_inf over all of R^N.

    Assembled from the certified slope ranges: the scalar s in each
    column of the explicit inverse is bounded through the uniform gap
    between 1 and the sum of the off-diagonal contraction factors.
    """
    mt = game.mu_tilde
    mu = game.mu
    eps = game.eps
    rra_hi = game.rra_hi
    # sup over the allowed slope range of (v+1)*mt/(v+mt)
    with np.errstate(divide="ignore"):
        correction = (mu / (1.0 + mu) ** 2) / (rra_hi - mt)
    term_sup = np.where(np.isfinite(rra_hi), mt - correction, mt)
    c_min = 1.0 - term_sup.sum()
    if not c_min > 0:
        raise ValueError(
            "game violates the Lipschitz assumptions (all competition "
            "weights 1 with unbounded RRA)"
        )
    col_s = 1.0 / ((1.0 + mu) * eps * c_min)  # bound on |s| per column
    beta = (1.0 + 1.0 / ((1.0 + mu) * eps)) * mt
    row = 1.0 / ((1.0 + mu) * eps) + beta * col_s.sum()
    return float(row.max())
