"""The dual-to-wealth map h and its globally damped Newton inversion.

A dual vector D produces the candidate equilibrium wealths

    H(D) = exp G^{-1}(D + ln(Z) * 1)        (one row per market atom)

and the log initial wealths financing it,

    h(D) = ln E^Q[H(D)].

Solving the game for given initial wealths means inverting h, which is
C^1, globally Lipschitz, and (in the regimes covered by the theory) a
diffeomorphism of R^N.  The solver is a damped Newton iteration with a
backtracking line search on the sup-norm residual, started from the
tangent-CRRA approximation, under which h is exactly affine and the
first step is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import MaxIterationsExceeded, SingularJacobianError
from .gmap import Game, _explicit_inverse_at, _own_argument, g_invert
from .market import Market

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 60
MAX_BACKTRACKS = 40
ARMIJO = 1e-4


@dataclass(frozen=True)
class WealthVector:
    """Strictly positive initial wealths with cached logarithms."""

    x0: np.ndarray
    log_x0: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        x0 = np.atleast_1d(np.asarray(self.x0, dtype=float))
        if np.any(x0 <= 0.0):
            raise ValueError("initial wealths must be strictly positive")
        x0.setflags(write=False)
        log_x0 = np.log(x0)
        log_x0.setflags(write=False)
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "log_x0", log_x0)


def _log_wealth(game: Game, m: Market, d):
    """G^{-1}(d + ln z_k) for every atom k; d (..., N) -> (..., K, N)."""
    d = np.asarray(d, dtype=float)
    args = d[..., None, :] + m.log_z[:, None]
    return g_invert(game, args)


def h_cal(game: Game, m: Market, d):
    """The candidate wealth matrix H(d): shape (..., K, N), all positive."""
    return np.exp(_log_wealth(game, m, d))


def h_apply(game: Game, m: Market, d):
    """h(d) = ln E^Q[H(d)] componentwise; shape matches d."""
    log_w = _log_wealth(game, m, d)
    log_pz = np.log(m.p * m.z)
    return logsumexp(log_w + log_pz[:, None], axis=-2)


def _jacobian_from_log_wealth(game: Game, m: Market, log_w):
    """h-Jacobian given precomputed log wealths (..., K, N)."""
    log_pz = np.log(m.p * m.z)
    shifted = log_w + log_pz[:, None]
    h = logsumexp(shifted, axis=-2)
    weights = np.exp(shifted - h[..., None, :])  # (..., K, N), sum over K is 1
    inv = _explicit_inverse_at(game, log_w)  # (..., K, N, N)
    jac = np.einsum("...ki,...kij->...ij", weights, inv)
    return h, jac


def h_jacobian(game: Game, m: Market, d):
    """Exact Jacobian of h: the H^i-weighted Q-average of [JG]^{-1}."""
    log_w = _log_wealth(game, m, d)
    _, jac = _jacobian_from_log_wealth(game, m, log_w)
    return jac


def _tangent_crra_matrix(game: Game) -> np.ndarray:
    """Constant Jacobian of G for the CRRA game tangent at y = 0."""
    r = -game.v_prime_at(np.zeros(game.n))
    jac = np.broadcast_to(((r - 1.0) * game.mu)[:, None], (game.n, game.n)).copy()
    idx = np.arange(game.n)
    jac[idx, idx] = -r
    return jac


def crra_reference(game: Game, m: Market):
    """(J_c, A, h_c(0)) for the tangent-CRRA game: the exponents
    A = J_c^{-1} 1 and the zero-dual log wealths ln E^Q[z^A]."""
    j_c = _tangent_crra_matrix(game)
    ones = np.ones(game.n)
    a = np.linalg.solve(j_c, ones)
    hc0 = np.array([np.log(m.expect_q(m.z**ai)) for ai in a])
    return j_c, a, hc0


@dataclass
class HInvertResult:
    """Outcome of the damped Newton inversion of h."""

    d: np.ndarray
    iterations: int
    residual: float
    trace: list  # (iteration, residual, step size) triples; empty unless requested


def h_invert(
    game: Game,
    m: Market,
    target,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    d0=None,
    collect_trace: bool = False,
) -> HInvertResult:
    """Solve h(d) = target by damped Newton; target (N,) or (B, N).

    The initial guess is the exact solution of the tangent-CRRA game,
    d0 = J_c (target - h_c(0)), so all-CRRA games converge immediately.
    Raises :class:`MaxIterationsExceeded` (carrying the best iterate)
    or :class:`SingularJacobianError` on failure.
    """
    target = np.asarray(target, dtype=float)
    single = target.ndim == 1
    tgt = target.reshape(-1, game.n)

    if d0 is None:
        j_c, _, hc0 = crra_reference(game, m)
        d = (tgt - hc0) @ j_c.T
    else:
        d = np.broadcast_to(np.asarray(d0, dtype=float), tgt.shape).copy()

    trace = []
    resid_vec = h_apply(game, m, d) - tgt
    res = np.abs(resid_vec).max(axis=1)
    if collect_trace:
        trace.append((0, float(res.max()), 0.0))

    iterations = 0
    for it in range(1, max_iter + 1):
        if np.all(res <= tol):
            break
        iterations = it
        log_w = _log_wealth(game, m, d)
        _, jac = _jacobian_from_log_wealth(game, m, log_w)
        try:
            step = -np.linalg.solve(jac, resid_vec[..., None])[..., 0]
        except np.linalg.LinAlgError as exc:
            raise SingularJacobianError(
                "h-Jacobian singular at iteration %d" % it
            ) from exc

        alpha = np.ones(d.shape[0])
        accepted = res <= tol  # converged rows keep their iterate
        d_new = d.copy()
        res_new = res.copy()
        resid_new = resid_vec.copy()
        for _ in range(MAX_BACKTRACKS):
            active = ~accepted
            if not active.any():
                break
            trial = d + alpha[:, None] * step
            r_trial = h_apply(game, m, trial) - tgt
            res_trial = np.abs(r_trial).max(axis=1)
            ok = active & (res_trial <= (1.0 - ARMIJO * alpha) * res)
            d_new[ok] = trial[ok]
            resid_new[ok] = r_trial[ok]
            res_new[ok] = res_trial[ok]
            accepted |= ok
            alpha = np.where(accepted, alpha, alpha * 0.5)
        if not accepted.all():
            raise MaxIterationsExceeded(
                "line search stalled at iteration %d (residual %g); the "
                "target may lie outside the provable diffeomorphism regimes"
                % (it, float(res.max())),
                best=d[0] if single else d.reshape(target.shape),
                residual=float(res.max()),
            )
        d, resid_vec, res = d_new, resid_new, res_new
        if collect_trace:
            trace.append((it, float(res.max()), float(alpha.max())))

    if np.any(res > tol):
        raise MaxIterationsExceeded(
            "no convergence within %d iterations (residual %g)"
            % (max_iter, float(res.max())),
            best=d[0] if single else d.reshape(target.shape),
            residual=float(res.max()),
        )

    return HInvertResult(
        d=d[0] if single else d.reshape(target.shape),
        iterations=iterations,
        residual=float(res.max()),
        trace=trace,
    )
