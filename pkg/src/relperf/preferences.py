"""Agent preferences in log-marginal form.

A utility U on (0, inf) enters the equilibrium computation only through
the strictly decreasing map

    v(y) = ln U'(exp y),

which is a bijection of R whenever U satisfies the Inada conditions.
Relative risk aversion is -v'(ln x), so certified RRA bounds are slope
bounds on v.  All families are normalized so that U'(1) = 1, i.e.
v(0) = 0 (a harmless affine rescaling of U).

The families below are chosen so the RRA bounds are analytic rather
than estimated:

* ``CRRA(r)``: constant RRA r.
* ``SinePerturbedCRRA(r, eps_amp)``: RRA = r + eps_amp * sin(y), a
  utility whose RRA stays within eps_amp of the constant r.
* ``TanhBlendCRRA(r_mean, delta)``: RRA = r_mean + delta * tanh(y), a
  genuinely non-CRRA utility with finite RRA bounds on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RootBracketError

# Root-finder tuning: bracket by the certified slope bounds, bisect to
# this interval width, then Newton-polish to the residual tolerance.
BISECT_WIDTH = 1e-8
POLISH_RESIDUAL = 1e-14
MAX_BISECT = 200
MAX_POLISH = 12


class Preference:
    """Base class: a utility given by its log-scale marginal map v."""

    #: certified lower bound on RRA, inf(-v')
    rra_lo: float
    #: certified upper bound on RRA, sup(-v'); may be np.inf
    rra_hi: float

    def v(self, y):
        raise NotImplementedError

    def v_prime(self, y):
        raise NotImplementedError

    def v_inv(self, t):
        """Inverse of v (strictly decreasing bijection of R)."""
        return self.w(0.0, t)

    def w(self, mu, t):
        """Inverse of u -> v(u) + (mu/(1+mu)) u at value t.

        Requires rra_lo > mu/(1+mu); the inverse then has slope in
        [-1/eps, 0) with eps = rra_lo - mu/(1+mu).
        """
        c = mu / (1.0 + mu)
        return _invert_shifted_v(self, c, t)

    def w_prime(self, mu, t):
        """Derivative of w at t, computed through the inverse rule."""
        c = mu / (1.0 + mu)
        u = _invert_shifted_v(self, c, t)
        return 1.0 / (self.v_prime(u) + c)

    def inverse_marginal(self, y):
        """Inverse marginal utility I = (U')^{-1}, i.e. exp(v^{-1}(ln y))."""
        y = np.asarray(y, dtype=float)
        if np.any(y <= 0.0):
            raise ValueError("inverse marginal utility requires y > 0")
        return np.exp(self.v_inv(np.log(y)))


@dataclass(frozen=True)
class CRRA(Preference):
    """Constant relative risk aversion r: v(y) = -r*y."""

    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("CRRA coefficient r must be positive")

    @property
    def rra_lo(self):
        return self.r

    @property
    def rra_hi(self):
        return self.r

    def v(self, y):
        return -self.r * np.asarray(y, dtype=float)

    def v_prime(self, y):
        return np.full_like(np.asarray(y, dtype=float), -self.r)

    def v_inv(self, t):
        return np.asarray(t, dtype=float) / (-self.r)

    def w(self, mu, t):
        c = mu / (1.0 + mu)
        if not self.r > c:
            raise ValueError("w requires rra_lo > mu/(1+mu)")
        return np.asarray(t, dtype=float) / (c - self.r)

    def w_prime(self, mu, t):
        c = mu / (1.0 + mu)
        return np.full_like(np.asarray(t, dtype=float), 1.0 / (c - self.r))


@dataclass(frozen=True)
class SinePerturbedCRRA(Preference):
    """RRA oscillating in [r - eps_amp, r + eps_amp]:

    v(y) = -r*y + eps_amp*(cos y - 1),  -v'(y) = r + eps_amp*sin(y).
    """

    r: float
    eps_amp: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("mean RRA r must be positive")
        if not 0.0 <= self.eps_amp < self.r:
            raise ValueError("perturbation amplitude must satisfy 0 <= eps_amp < r")

    @property
    def rra_lo(self):
        return self.r - self.eps_amp

    @property
    def rra_hi(self):
        return self.r + self.eps_amp

    def v(self, y):
        y = np.asarray(y, dtype=float)
        return -self.r * y + self.eps_amp * (np.cos(y) - 1.0)

    def v_prime(self, y):
        y = np.asarray(y, dtype=float)
        return -self.r - self.eps_amp * np.sin(y)


@dataclass(frozen=True)
class TanhBlendCRRA(Preference):
    """RRA sliding between r_mean - delta and r_mean + delta:

    v(y) = -r_mean*y - delta*ln cosh(y),  -v'(y) = r_mean + delta*tanh(y).
    """

    r_mean: float
    delta: float

    def __post_init__(self):
        if not self.r_mean > 0:
            raise ValueError("mean RRA r_mean must be positive")
        if not 0.0 <= self.delta < self.r_mean:
            raise ValueError("blend width must satisfy 0 <= delta < r_mean")

    @property
    def rra_lo(self):
        return self.r_mean - self.delta

    @property
    def rra_hi(self):
        return self.r_mean + self.delta

    def v(self, y):
        y = np.asarray(y, dtype=float)
        # ln cosh(y) = |y| + log1p(exp(-2|y|)) - ln 2, stable for large |y|
        a = np.abs(y)
        log_cosh = a + np.log1p(np.exp(-2.0 * a)) - np.log(2.0)
        return -self.r_mean * y - self.delta * log_cosh

    def v_prime(self, y):
        y = np.asarray(y, dtype=float)
        return -self.r_mean - self.delta * np.tanh(y)


def _invert_shifted_v(pref: Preference, c: float, t):
    """Solve v(u) + c*u = t for u, vectorized over t.

    The map f(u) = v(u) + c*u has f(0) = 0 and slope in [-b, -a] with
    a = rra_lo - c > 0 and b = rra_hi - c (possibly infinite), which
    brackets the root between -t/a and -t/b.  Bisect, then Newton-polish.
    """
    a = pref.rra_lo - c
    b = pref.rra_hi - c
    if not a > 0:
        raise ValueError("inversion requires rra_lo > mu/(1+mu)")
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)

    end_a = -t / a
    end_b = -t / b if np.isfinite(b) else np.zeros_like(t)
    pad = 1e-9 * (1.0 + np.abs(t))
    lo = np.minimum(end_a, end_b) - pad
    hi = np.maximum(end_a, end_b) + pad

    def f(u):
        return pref.v(u) + c * u - t

    # widen against roundoff at the bracket ends (f is decreasing, so we
    # need f(lo) >= 0 >= f(hi))
    for _ in range(60):
        width = hi - lo
        bad_lo = f(lo) < 0.0
        bad_hi = f(hi) > 0.0
        if not (bad_lo.any() or bad_hi.any()):
            break
        lo = np.where(bad_lo, lo - width, lo)
        hi = np.where(bad_hi, hi + width, hi)
    else:
        raise RootBracketError(
            "failed to bracket v-inversion root (lo=%r, hi=%r)" % (lo, hi)
        )

    for _ in range(MAX_BISECT):
        if np.max(hi - lo) <= BISECT_WIDTH:
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        lo = np.where(fm >= 0.0, mid, lo)
        hi = np.where(fm < 0.0, mid, hi)

    u = 0.5 * (lo + hi)
    atol = POLISH_RESIDUAL * (1.0 + np.max(np.abs(t)))
    for _ in range(MAX_POLISH):
        fu = f(u)
        if np.max(np.abs(fu)) <= atol:
            break
        u = np.clip(u - fu / (pref.v_prime(u) + c), lo, hi)
    return u[0] if scalar else u


@dataclass(frozen=True)
class AgentSpec:
    """One agent: preference, competition weight and initial wealth."""

    pref: Preference
    lam: float
    x0: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("competition weight lam must lie in [0, 1]")
        if not self.x0 > 0:
            raise ValueError("initial wealth x0 must be positive")


def bar_transform(agent: AgentSpec, n_players: int):
    """Change of variables to competition against the all-player average.

    Comparing against the geometric average of *all* players (including
    oneself) with weight bar_lambda = lam*N/(N-1+lam) and the rescaled
    utility U(x^(1+mu)) gives the same optimization problem.  Returns
    ``(bar_lambda, rra_relation_check)`` where the check evaluates both
    sides of the RRA identity of the rescaled utility at x > 0.
    """
    if n_players < 2:
        raise ValueError("need at least two players")
    lam = agent.lam
    mu = lam / (n_players - 1)
    bar_lambda = lam * n_players / (n_players - 1 + lam)
    pref = agent.pref

    def rra_relation_check(x):
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise ValueError("check requires x > 0")
        # left side: RRA of x -> U(x^(1+mu)) from its own log-marginal,
        # ln Ubar'(e^y) = ln(1+mu) + mu*y + v((1+mu)*y)
        y = np.log(x)
        lhs = -mu - (1.0 + mu) * pref.v_prime((1.0 + mu) * y)
        # right side: the claimed identity, with the inner power taken
        # literally on x
        rhs = -mu + (1.0 + mu) * (-pref.v_prime(np.log(x ** (1.0 + mu))))
        return lhs, rhs

    return bar_lambda, rra_relation_check
